//! Products `x ⋆ y = [f(x), y]` and `x ⋆' y = [x, f(y)]` on a Hom-Lie
//! algebra, and the four conditions that decide when they are Hom-Novikov.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Algebra, AlgebraError, Element, EndoMatrix};
use crate::axioms::{CheckError, CheckReport, Checker, Defect, Witness};
use crate::par::Execution;
use crate::scalars::FieldSpec;

use super::lie::{sample_grid, SampleField, Thm14Sample};
use super::{require, ConstructionError};

fn star(l: &Algebra, f: &EndoMatrix, left: bool) -> Result<Algebra, AlgebraError> {
    if l.dim() != f.dim() {
        return Err(AlgebraError::Dimension { expected: l.dim(), found: f.dim() });
    }
    let suffix = if left { "star" } else { "star'" };
    let mut out = l.renamed(&format!("{}.{}", l.name, suffix));
    for i in 0..l.dim() {
        for j in 0..l.dim() {
            let v = if left {
                l.multiply(&f.column(i), &l.basis(j))?
            } else {
                l.multiply(&l.basis(i), &f.column(j))?
            };
            out.set_product(i, j, &v)?;
        }
    }
    Ok(out)
}

/// `x ⋆ y = [f(x), y]`.
pub fn star_left(l: &Algebra, f: &EndoMatrix) -> Result<Algebra, ConstructionError> {
    require(Checker::exact().skew(l)?)?;
    Ok(star(l, f, true)?)
}

/// `x ⋆' y = [x, f(y)]`.
pub fn star_right(l: &Algebra, f: &EndoMatrix) -> Result<Algebra, ConstructionError> {
    require(Checker::exact().skew(l)?)?;
    Ok(star(l, f, false)?)
}

/// Whether `x` lies in `Z(α(L))`; witnesses name the failing `j` with `[x, α(e_j)]`.
pub fn alpha_center_defect(l: &Algebra, alpha: &EndoMatrix, x: &Element) -> Result<CheckReport, CheckError> {
    Checker::exact().alpha_center(l, alpha, x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thm14Conditions {
    pub cond_142: CheckReport,
    pub cond_143: CheckReport,
    pub cond_144: CheckReport,
    pub cond_145: CheckReport,
}

impl Thm14Conditions {
    /// The pair governing `⋆`.
    pub fn left_holds(&self) -> bool {
        self.cond_142.passed && self.cond_143.passed
    }

    /// The pair governing `⋆'`.
    pub fn right_holds(&self) -> bool {
        self.cond_144.passed && self.cond_145.passed
    }
}

pub fn thm14_conditions(l: &Algebra, alpha: &EndoMatrix, f: &EndoMatrix) -> Result<Thm14Conditions, ConstructionError> {
    thm14_conditions_with(&Checker::exact(), l, alpha, f)
}

pub fn thm14_conditions_with(
    c: &Checker,
    l: &Algebra,
    alpha: &EndoMatrix,
    f: &EndoMatrix,
) -> Result<Thm14Conditions, ConstructionError> {
    require(c.hom_lie(l, alpha)?)?;
    require(c.commuting(f, alpha)?)?;
    let n = l.dim();
    let br = |x: &Element, y: &Element| l.multiply(x, y);
    let fe: Vec<Element> = (0..n).map(|i| f.column(i)).collect();
    let ae: Vec<Element> = (0..n).map(|i| alpha.column(i)).collect();
    let e: Vec<Element> = (0..n).map(|i| l.basis(i)).collect();
    let fae: Vec<Element> = (0..n).map(|i| f.apply(&ae[i])).collect::<Result<_, _>>()?;

    let mut r142 = CheckReport::pass("cond-142");
    let mut r143 = CheckReport::pass("cond-143");
    let mut r144 = CheckReport::pass("cond-144");
    let mut r145 = CheckReport::pass("cond-145");
    let note = |report: &mut CheckReport, identity: &str, idx: [usize; 3], d: &Element| -> Result<(), CheckError> {
        if let Some(d) = c.element_defect(d)? {
            report.record(Witness {
                identity: identity.into(),
                indices: idx.iter().map(|i| i + 1).collect(),
                defect: Defect::Element(d),
            });
        }
        Ok(())
    };
    for i in 0..n {
        for j in 0..n {
            let fx_y = br(&fe[i], &e[j])?;
            let x_fy = br(&e[i], &fe[j])?;
            let fx_fy = br(&fe[i], &fe[j])?;
            let x142 = f.apply(&fx_y.try_add(&x_fy)?)?.try_sub(&fx_fy)?;
            for k in 0..n {
                note(&mut r142, "rota-baxter type defect in alpha-center", [i, j, k], &br(&x142, &ae[k])?)?;
                note(&mut r145, "[f(x), f(y)] in alpha-center", [i, j, k], &br(&fx_fy, &ae[k])?)?;
                let lhs143 = br(&f.apply(&fx_y)?, &ae[k])?;
                let rhs143 = br(&f.apply(&br(&fe[i], &e[k])?)?, &ae[j])?;
                note(&mut r143, "twisted right symmetry of f-bracket", [i, j, k], &lhs143.try_sub(&rhs143)?)?;
                let t1 = br(&x_fy.try_add(&fx_y)?, &fae[k])?;
                let t2 = br(&ae[i], &f.apply(&br(&e[j], &fe[k])?)?)?;
                let t3 = br(&ae[j], &f.apply(&br(&e[i], &fe[k])?)?)?;
                note(&mut r144, "twisted left symmetry of f-bracket", [i, j, k], &t1.try_sub(&t2)?.try_add(&t3)?)?;
            }
        }
    }
    Ok(Thm14Conditions { cond_142: r142, cond_143: r143, cond_144: r144, cond_145: r145 })
}

/// Verdicts for one sample: Hom-Novikov status of `⋆`/`⋆'` and of the condition pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleOutcome {
    pub label: String,
    pub field: SampleField,
    pub left_product: bool,
    pub left_conditions: bool,
    pub right_product: bool,
    pub right_conditions: bool,
}

impl SampleOutcome {
    pub fn consistent(&self) -> bool {
        self.left_product == self.left_conditions && self.right_product == self.right_conditions
    }
}

pub fn evaluate_sample(s: &Thm14Sample) -> Result<SampleOutcome, ConstructionError> {
    let checker = match s.field {
        SampleField::Rationals => Checker::exact(),
        SampleField::Prime(p) => Checker::mod_p(FieldSpec::new(p))?,
    };
    let conds = thm14_conditions_with(&checker, &s.lie, &s.alpha, &s.f)?;
    let left = star(&s.lie, &s.f, true)?;
    let right = star(&s.lie, &s.f, false)?;
    Ok(SampleOutcome {
        label: s.label.clone(),
        field: s.field,
        left_product: checker.hom_novikov(&left, &s.alpha)?.passed,
        left_conditions: conds.left_holds(),
        right_product: checker.hom_novikov(&right, &s.alpha)?.passed,
        right_conditions: conds.right_holds(),
    })
}

/// Aggregate of the equivalence suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thm14SuiteReport {
    pub outcomes: Vec<SampleOutcome>,
}

impl Thm14SuiteReport {
    pub fn count(&self, field: fn(&SampleField) -> bool) -> usize {
        self.outcomes.iter().filter(|o| field(&o.field)).count()
    }

    pub fn mismatches(&self) -> Vec<&SampleOutcome> {
        self.outcomes.iter().filter(|o| !o.consistent()).collect()
    }

    /// Samples where the `⋆` (resp. `⋆'`) product is Hom-Novikov.
    pub fn passing(&self) -> (usize, usize) {
        let l = self.outcomes.iter().filter(|o| o.left_product).count();
        let r = self.outcomes.iter().filter(|o| o.right_product).count();
        (l, r)
    }
}

/// Runs the seeded sample grid: `fp_per_cell` maps per cell over `F_7` and
/// `q_per_cell` per cell over the rationals.
pub fn thm14_suite(
    seed: u64,
    fp_per_cell: usize,
    q_per_cell: usize,
    exec: Execution,
) -> Result<Thm14SuiteReport, ConstructionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = sample_grid(&mut rng, SampleField::Prime(7), fp_per_cell);
    samples.extend(sample_grid(&mut rng, SampleField::Rationals, q_per_cell));
    let outcomes = exec.map(&samples, evaluate_sample).into_iter().collect::<Result<_, _>>()?;
    Ok(Thm14SuiteReport { outcomes })
}
