use crate::algebra::Algebra;
use crate::axioms::{CheckError, CheckReport, Checker, Defect, Witness};
use crate::constructions::{lemma21_check, twisted_product};

use super::{expand_branches, Branch, MorphismFamily};

/// Morphism identity, product-table match and the composite identities for one branch.
pub fn verify_branch(alg: &Algebra, fam: &MorphismFamily, branch: &Branch) -> Result<Vec<CheckReport>, CheckError> {
    let a = branch.algebra(alg, fam)?;
    let m = branch.matrix(fam)?;
    let c = Checker::exact();
    let mut out = vec![c.multiplicative(&a, &m)?.with_note("inequations not consulted")];
    if fam.expected.is_some() {
        let twisted = twisted_product(&a, &m)?;
        let mut report = CheckReport::pass("product");
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let expected = fam.expected_product(i, j).expect("table present").substitute(&branch.substitution)?;
                let diff = twisted.product(i, j).try_sub(&expected)?;
                if let Some(d) = c.element_defect(&diff)? {
                    report.record(Witness {
                        identity: "twisted product vs table".into(),
                        indices: vec![i + 1, j + 1],
                        defect: Defect::Element(d),
                    });
                }
            }
        }
        out.push(report);
    }
    out.push(lemma21_check(&a, &m)?);
    Ok(out)
}

/// Verifies every branch of a family; any error becomes a failed report.
pub fn verify_family(alg: &Algebra, fam: &MorphismFamily) -> CheckReport {
    let id = format!("{}/{}", alg.name, fam.name);
    let branches = match expand_branches(alg, fam) {
        Ok(b) => b,
        Err(e) => {
            return CheckReport::fail(
                id,
                Witness { identity: "branch expansion".into(), indices: vec![], defect: Defect::Message(e.to_string()) },
            )
        }
    };
    let mut parts = Vec::new();
    for (k, b) in branches.iter().enumerate() {
        match verify_branch(alg, fam, b) {
            Ok(reports) => parts.extend(reports),
            Err(e) => parts.push(CheckReport::fail(
                format!("branch {}", k + 1),
                Witness { identity: "evaluation".into(), indices: vec![], defect: Defect::Message(e.to_string()) },
            )),
        }
    }
    CheckReport::all(id, parts).with_note(format!("{} branches", branches.len()))
}
