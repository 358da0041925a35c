//! The qualitative remarks about the two-dimensional table, each turned into a
//! report. Finite-field parts run over `F_5`; the parameter of N6 is sampled at
//! 2 and 3.

use std::collections::BTreeMap;

use crate::algebra::{Algebra, EndoMatrix};
use crate::axioms::{CheckReport, Checker, Defect, Witness};
use crate::catalog::CatalogDocument;
use crate::par::Execution;
use crate::scalars::{FieldSpec, Scalar};

use super::{enumerate_fp, expand_branches, MorphismFamily};

const PRIME: u64 = 5;
const ALL: [&str; 9] = ["T1", "T2", "T3", "N1", "N2", "N3", "N4", "N5", "N6"];

fn message(identity: &str, text: String) -> Witness {
    Witness { identity: identity.into(), indices: vec![], defect: Defect::Message(text) }
}

/// Field specs to sample an algebra at.
fn specs(alg: &Algebra) -> Vec<FieldSpec> {
    let base = FieldSpec::new(PRIME).with_i(2);
    if alg.ring().params().iter().any(|p| p == "lambda") {
        vec![base.clone().assign("lambda", 2), base.assign("lambda", 3)]
    } else {
        vec![base]
    }
}

fn table_mod_p(alg: &Algebra, spec: &FieldSpec) -> Vec<u64> {
    let n = alg.dim();
    let mut d = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                d.push(alg.constant(i, j, k).eval_mod_p(spec).unwrap_or(0));
            }
        }
    }
    d
}

/// Structure constants of `α∘μ` for a residue matrix.
fn twisted_mod_p(d: &[u64], m: &[u64], n: usize, p: u64) -> Vec<u64> {
    let mut out = vec![0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = 0;
                for t in 0..n {
                    s += m[k * n + t] * d[(i * n + j) * n + t];
                }
                out[(i * n + j) * n + k] = s % p;
            }
        }
    }
    out
}

fn mat_mul(a: &[u64], b: &[u64], n: usize, p: u64) -> Vec<u64> {
    let mut out = vec![0; n * n];
    for r in 0..n {
        for c in 0..n {
            out[r * n + c] = (0..n).map(|t| a[r * n + t] * b[t * n + c]).sum::<u64>() % p;
        }
    }
    out
}

fn det2(m: &[u64], p: u64) -> u64 {
    (m[0] * m[3] + p * p - m[1] * m[2] % p) % p
}

fn is_nilpotent(m: &[u64], n: usize, p: u64) -> bool {
    let mut acc = m.to_vec();
    for _ in 1..n {
        acc = mat_mul(&acc, m, n, p);
    }
    acc.iter().all(|&x| x == 0)
}

fn enumerate(alg: &Algebra, spec: &FieldSpec, exec: Execution) -> Vec<Vec<u64>> {
    enumerate_fp(alg, spec, exec).unwrap_or_default()
}

/// (1) T1 and N2 admit no twist other than the zero table and the original one.
fn nontrivial_twists(doc: &CatalogDocument, exec: Execution) -> CheckReport {
    let mut report = CheckReport::pass("observation-1");
    for name in ALL {
        let Some(alg) = doc.algebra(name) else { continue };
        let n = alg.dim();
        let mut found = None;
        for spec in specs(alg) {
            let d = table_mod_p(alg, &spec);
            for m in enumerate(alg, &spec, exec) {
                let t = twisted_mod_p(&d, &m, n, PRIME);
                if t.iter().any(|&x| x != 0) && t != d {
                    found = Some(m);
                    break;
                }
            }
        }
        let expect_none = matches!(name, "T1" | "N2");
        match (&found, expect_none) {
            (Some(m), true) => report.record(message(
                "no non-trivial twist",
                format!("{name}: morphism [{}] gives a new product", super::format_matrix(m)),
            )),
            (None, false) => {
                report.record(message("non-trivial twist exists", format!("{name}: none found over F_{PRIME}")))
            }
            _ => {}
        }
    }
    report
}

/// (2) N1 has exactly nine morphisms; every other row has a family with a free parameter.
fn n1_count(doc: &CatalogDocument, exec: Execution) -> CheckReport {
    let mut report = CheckReport::pass("observation-2");
    let Some(n1) = doc.algebra("N1") else {
        return CheckReport::fail("observation-2", message("N1 present", "missing".into()));
    };
    let branches: usize = doc.families_of("N1").map(|f| expand_branches(n1, f).map(|b| b.len()).unwrap_or(0)).sum();
    if branches != 9 {
        report.record(message("N1 branch count", format!("{branches} branches, expected 9")));
    }
    let found = enumerate(n1, &specs(n1)[0], exec).len();
    if found != 9 {
        report.record(message("N1 morphisms over F_5", format!("{found}, expected 9")));
    }
    for name in ALL.iter().filter(|n| **n != "N1") {
        let Some(alg) = doc.algebra(name) else { continue };
        let free = doc.families_of(name).any(|f| {
            expand_branches(alg, f)
                .map(|bs| bs.iter().any(|b| b.residual.iter().any(|s| f.params.contains(s))))
                .unwrap_or(false)
        });
        if !free {
            report.record(message("infinitely many morphisms", format!("{name}: no family with a free parameter")));
        }
    }
    report.with_note(format!("N1: {branches} branches, {found} morphisms over F_{PRIME}"))
}

fn int_matrix(m: &EndoMatrix) -> Option<Vec<i64>> {
    m.entries()
        .iter()
        .map(|s| {
            let c = s.constant_value()?;
            if !c.is_real() || !c.re.is_integer() {
                return None;
            }
            i64::try_from(c.re.to_integer()).ok()
        })
        .collect()
}

/// (3) N1 has exactly one automorphism besides the identity, the swap of e1 and e2.
fn n1_automorphisms(doc: &CatalogDocument) -> CheckReport {
    let mut report = CheckReport::pass("observation-3");
    let Some(n1) = doc.algebra("N1") else {
        return CheckReport::fail("observation-3", message("N1 present", "missing".into()));
    };
    let mut invertible = Vec::new();
    for f in doc.families_of("N1") {
        for b in expand_branches(n1, f).unwrap_or_default() {
            let Ok(m) = b.matrix(f) else { continue };
            if m.determinant().map(|d| !d.is_zero()).unwrap_or(false) {
                invertible.push(int_matrix(&m));
            }
        }
    }
    invertible.sort();
    let expected = vec![Some(vec![0, 1, 1, 0]), Some(vec![1, 0, 0, 1])];
    if invertible != expected {
        report.record(message("N1 automorphisms", format!("found {invertible:?}")));
    }
    report.with_note(format!("{} invertible members of the N1 family", invertible.len()))
}

/// (4) For N5 and N6 every nonzero morphism is invertible.
fn invertibility(doc: &CatalogDocument, exec: Execution) -> CheckReport {
    let mut report = CheckReport::pass("observation-4");
    for name in ["N5", "N6"] {
        let Some(alg) = doc.algebra(name) else { continue };
        for spec in specs(alg) {
            for m in enumerate(alg, &spec, exec) {
                if m.iter().any(|&x| x != 0) && det2(&m, PRIME) == 0 {
                    report.record(message(
                        "nonzero morphisms invertible",
                        format!("{name}: [{}] is singular", super::format_matrix(&m)),
                    ));
                }
            }
        }
        for f in doc.families_of(name) {
            for b in expand_branches(alg, f).unwrap_or_default() {
                let det = b.matrix(f).and_then(|m| m.determinant().map_err(|_| crate::scalars::ScalarError::RingMismatch));
                if let Ok(det) = det {
                    if det.num_terms() != 1 {
                        report.record(message("determinant is a unit", format!("{name}/{}: det = {det}", f.name)));
                    }
                }
            }
        }
    }
    report
}

/// The family matrix with every family parameter `p` renamed `p_2`, over a
/// ring holding both copies.
fn fresh_pair(fam: &MorphismFamily, branch_matrix: &EndoMatrix) -> Option<(EndoMatrix, EndoMatrix)> {
    let base = fam.ring.params_ring();
    let algebra_params: Vec<&String> = base.params().iter().filter(|p| !fam.params.contains(p)).collect();
    let mut names: Vec<String> = algebra_params.iter().map(|s| s.to_string()).collect();
    names.extend(fam.params.iter().cloned());
    names.extend(fam.params.iter().map(|p| format!("{p}_2")));
    let ring = crate::scalars::ParameterRing::new(&names).ok()?;
    let first = branch_matrix.lift(&ring).ok()?;
    let renaming: BTreeMap<String, Scalar> = fam
        .params
        .iter()
        .map(|p| Scalar::symbol(&ring, &format!("{p}_2")).map(|s| (p.clone(), s)))
        .collect::<Result<_, _>>()
        .ok()?;
    let second = first.substitute(&renaming).ok()?;
    Some((first, second))
}

/// (5) Morphisms of N2, N3, N5 and N6 commute with one another.
fn commuting(doc: &CatalogDocument) -> CheckReport {
    let checker = Checker::exact();
    let mut parts = Vec::new();
    for name in ["N2", "N3", "N5", "N6"] {
        let Some(alg) = doc.algebra(name) else { continue };
        let mut members = Vec::new();
        for f in doc.families_of(name) {
            for b in expand_branches(alg, f).unwrap_or_default() {
                if let Ok(m) = b.matrix(f) {
                    members.push((f, m));
                }
            }
        }
        for (f, m) in &members {
            for (g, n) in &members {
                if f.name != g.name {
                    continue;
                }
                let Some((x, _)) = fresh_pair(f, m) else { continue };
                let Some((_, y)) = fresh_pair(g, n) else { continue };
                if let Ok(r) = checker.commuting(&x, &y) {
                    parts.push(CheckReport { check_id: name.into(), ..r });
                }
            }
        }
    }
    CheckReport::all("observation-5", parts)
}

/// Small integer points of a branch that keep its inequations nonzero.
fn integer_points(fam: &MorphismFamily, branch: &super::Branch) -> Vec<EndoMatrix> {
    let free: Vec<&String> = branch.residual.iter().filter(|s| fam.params.contains(s)).collect();
    let Ok(m) = branch.matrix(fam) else { return vec![] };
    let mut out = Vec::new();
    let total = 3usize.pow(free.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut point = BTreeMap::new();
        for s in &free {
            point.insert(s.to_string(), Scalar::from_int(&fam.ring, [0, 1, -1][c % 3]));
            c /= 3;
        }
        let ok = branch.inequations.iter().all(|q| q.substitute(&point).map(|v| !v.is_zero()).unwrap_or(false));
        if ok {
            if let Ok(x) = m.substitute(&point) {
                out.push(x);
            }
        }
    }
    out
}

/// (6) T1, T2, T3 and N1 have nonzero nilpotent morphisms; the others do not.
fn nilpotents(doc: &CatalogDocument, exec: Execution) -> CheckReport {
    let mut report = CheckReport::pass("observation-6");
    for name in ALL {
        let Some(alg) = doc.algebra(name) else { continue };
        let expected = matches!(name, "T1" | "T2" | "T3" | "N1");
        if expected {
            let mut witness = None;
            'families: for f in doc.families_of(name) {
                for b in expand_branches(alg, f).unwrap_or_default() {
                    for m in integer_points(f, &b) {
                        let nil = m.pow(alg.dim() as u32).map(|p| p.is_zero()).unwrap_or(false);
                        if !m.is_zero() && nil {
                            witness = Some(m);
                            break 'families;
                        }
                    }
                }
            }
            match witness {
                Some(m) => report = report.with_note(format!("{name}: {m}")),
                None => report.record(message("nilpotent morphism exists", format!("{name}: none found"))),
            }
        } else {
            for spec in specs(alg) {
                if let Some(m) = enumerate(alg, &spec, exec)
                    .into_iter()
                    .find(|m| m.iter().any(|&x| x != 0) && is_nilpotent(m, alg.dim(), PRIME))
                {
                    report.record(message(
                        "no nilpotent morphism",
                        format!("{name}: [{}] is nilpotent", super::format_matrix(&m)),
                    ));
                }
            }
        }
    }
    report
}

/// Reports for the six remarks on the two-dimensional table, in order.
pub fn observation_suite(doc: &CatalogDocument, exec: Execution) -> Vec<CheckReport> {
    vec![
        nontrivial_twists(doc, exec),
        n1_count(doc, exec),
        n1_automorphisms(doc),
        invertibility(doc, exec),
        commuting(doc),
        nilpotents(doc, exec),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::bundled;

    #[test]
    fn observations_other_than_invertibility_hold() {
        let doc = bundled("dim2").unwrap();
        for r in observation_suite(&doc, Execution::default()) {
            if r.check_id != "observation-4" {
                assert!(r.passed, "{}: {}", r.check_id, r.summary());
            }
        }
    }

    #[test]
    fn n6_projection_is_a_singular_morphism() {
        // diag(0, 1) is a morphism of N6 that the family excludes with a != 0.
        let doc = bundled("dim2").unwrap();
        let r = invertibility(&doc, Execution::Sequential);
        assert!(!r.passed);
        assert_eq!(r.failures, 2);
        assert!(r.witnesses.iter().all(|w| w.to_string().contains("N6: [0 0 0 1]")));
    }

    #[test]
    fn t2_nilpotent_witness() {
        let doc = bundled("dim2").unwrap();
        let r = nilpotents(&doc, Execution::Sequential);
        assert!(r.notes.iter().any(|n| n == "T2: [0, 0; 1, 0]"), "{:?}", r.notes);
    }
}
