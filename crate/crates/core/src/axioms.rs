//! Basis-tuple checkers for the defining identities.
//!
//! Every identity here is multilinear, so it holds for all elements exactly
//! when it holds on all basis tuples. Each checker walks the tuples in
//! lexicographic order and reports up to [`MAX_WITNESSES`] failures.
//!
//! Zero-testing is pluggable: [`ZeroTest::Exact`] asks for the zero
//! polynomial, [`ZeroTest::ModP`] reduces each defect into `F_p` first. The
//! free functions use exact testing. Inequation metadata on algebras is never
//! consulted.

use std::fmt;

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, Element, EndoMatrix};
use crate::scalars::{FieldSpec, Scalar, ScalarError};

pub const MAX_WITNESSES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// The nonzero residue of a failed identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Defect {
    Element(Element),
    Scalar(Scalar),
    Message(String),
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::Element(e) => write!(f, "{e}"),
            Defect::Scalar(s) => write!(f, "{s}"),
            Defect::Message(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Which identity failed, e.g. `left-symmetry`.
    pub identity: String,
    /// 1-based basis indices (or matrix position for map checks).
    pub indices: Vec<usize>,
    pub defect: Defect,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{} at ({}): {}", self.identity, idx.join(","), self.defect)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub check_id: String,
    pub passed: bool,
    /// Total number of failing tuples; `witnesses` keeps the first few.
    pub failures: usize,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn pass(check_id: impl Into<String>) -> Self {
        CheckReport { check_id: check_id.into(), passed: true, failures: 0, witnesses: Vec::new(), notes: Vec::new() }
    }

    pub fn fail(check_id: impl Into<String>, witness: Witness) -> Self {
        let mut r = Self::pass(check_id);
        r.record(witness);
        r
    }

    pub fn record(&mut self, witness: Witness) {
        self.passed = false;
        self.failures += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Conjunction of several reports under a new id; witnesses keep part order.
    pub fn all(check_id: impl Into<String>, parts: impl IntoIterator<Item = CheckReport>) -> Self {
        let mut out = Self::pass(check_id);
        for part in parts {
            out.failures += part.failures;
            if !part.passed {
                out.passed = false;
            }
            for w in part.witnesses {
                if out.witnesses.len() < MAX_WITNESSES {
                    out.witnesses.push(w);
                }
            }
            out.notes.extend(part.notes);
        }
        out
    }

    /// One-line human summary: `ok` or the first witness.
    pub fn summary(&self) -> String {
        match self.witnesses.first() {
            None if self.passed => "ok".to_string(),
            None => "failed".to_string(),
            Some(w) if self.failures > 1 => format!("{w} (+{} more)", self.failures - 1),
            Some(w) => w.to_string(),
        }
    }
}

/// How a defect is decided to be zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroTest {
    /// The defect must be the zero polynomial.
    Exact,
    /// The defect must vanish under evaluation into `F_p`.
    ModP(FieldSpec),
}

/// Identity checker parametrized by its zero test.
#[derive(Clone, Debug)]
pub struct Checker {
    zero: ZeroTest,
}

impl Default for Checker {
    fn default() -> Self {
        Self::exact()
    }
}

fn tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(arity as u32);
    (0..total).map(move |mut code| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = code % n;
            code /= n;
        }
        t
    })
}

impl Checker {
    pub fn exact() -> Self {
        Checker { zero: ZeroTest::Exact }
    }

    pub fn mod_p(spec: FieldSpec) -> Result<Self, CheckError> {
        spec.validate()?;
        Ok(Checker { zero: ZeroTest::ModP(spec) })
    }

    pub fn zero_test(&self) -> &ZeroTest {
        &self.zero
    }

    /// `None` when `s` counts as zero, otherwise the defect to report.
    pub fn scalar_defect(&self, s: &Scalar) -> Result<Option<Scalar>, CheckError> {
        match &self.zero {
            ZeroTest::Exact => Ok((!s.is_zero()).then(|| s.clone())),
            ZeroTest::ModP(spec) => {
                let r = s.eval_mod_p(spec)?;
                Ok((r != 0).then(|| Scalar::from_int(s.ring(), r as i64)))
            }
        }
    }

    pub fn element_defect(&self, e: &Element) -> Result<Option<Element>, CheckError> {
        match &self.zero {
            ZeroTest::Exact => Ok((!e.is_zero()).then(|| e.clone())),
            ZeroTest::ModP(spec) => {
                let mut any = false;
                let mut coords = Vec::with_capacity(e.dim());
                for c in &e.coords {
                    let r = c.eval_mod_p(spec)?;
                    any |= r != 0;
                    coords.push(Scalar::from_int(c.ring(), r as i64));
                }
                Ok(any.then_some(Element { coords }))
            }
        }
    }

    pub fn is_zero(&self, e: &Element) -> Result<bool, CheckError> {
        Ok(self.element_defect(e)?.is_none())
    }

    /// Runs `defect` on every basis tuple of the given arity.
    fn run<F>(&self, id: &str, identity: &str, n: usize, arity: usize, defect: F) -> Result<CheckReport, CheckError>
    where
        F: Fn(&[usize]) -> Result<Element, CheckError>,
    {
        let mut report = CheckReport::pass(id);
        for t in tuples(n, arity) {
            if let Some(d) = self.element_defect(&defect(&t)?)? {
                report.record(Witness {
                    identity: identity.to_string(),
                    indices: t.iter().map(|i| i + 1).collect(),
                    defect: Defect::Element(d),
                });
            }
        }
        Ok(report)
    }

    pub fn left_symmetric(&self, a: &Algebra) -> Result<CheckReport, CheckError> {
        self.run("left-symmetric", "left-symmetry", a.dim(), 3, |t| {
            let (x, y, z) = (a.basis(t[0]), a.basis(t[1]), a.basis(t[2]));
            Ok(left_symmetric_defect(a, &x, &y, &z)?)
        })
    }

    pub fn right_commutative(&self, a: &Algebra) -> Result<CheckReport, CheckError> {
        self.run("right-commutative", "right-commutativity", a.dim(), 3, |t| {
            let (x, y, z) = (a.basis(t[0]), a.basis(t[1]), a.basis(t[2]));
            Ok(right_commutative_defect(a, &x, &y, &z)?)
        })
    }

    pub fn novikov(&self, a: &Algebra) -> Result<CheckReport, CheckError> {
        Ok(CheckReport::all("novikov", [self.left_symmetric(a)?, self.right_commutative(a)?]))
    }

    pub fn commutative(&self, a: &Algebra) -> Result<CheckReport, CheckError> {
        self.run("commutative", "commutativity", a.dim(), 2, |t| {
            let (x, y) = (a.basis(t[0]), a.basis(t[1]));
            Ok(a.multiply(&x, &y)?.try_sub(&a.multiply(&y, &x)?)?)
        })
    }

    pub fn multiplicative(&self, a: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
        check_dims(a, alpha)?;
        self.run("multiplicative", "multiplicativity", a.dim(), 2, |t| {
            let (x, y) = (a.basis(t[0]), a.basis(t[1]));
            Ok(multiplicative_defect(a, alpha, &x, &y)?)
        })
    }

    pub fn hom_left_symmetric(&self, a: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
        check_dims(a, alpha)?;
        self.run("hom-left-symmetric", "hom-left-symmetry", a.dim(), 3, |t| {
            let (x, y, z) = (a.basis(t[0]), a.basis(t[1]), a.basis(t[2]));
            Ok(hom_left_symmetric_defect(a, alpha, &x, &y, &z)?)
        })
    }

    pub fn hom_right_commutative(&self, a: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
        check_dims(a, alpha)?;
        self.run("hom-right-commutative", "hom-right-commutativity", a.dim(), 3, |t| {
            let (x, y, z) = (a.basis(t[0]), a.basis(t[1]), a.basis(t[2]));
            Ok(hom_right_commutative_defect(a, alpha, &x, &y, &z)?)
        })
    }

    pub fn hom_novikov(&self, a: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
        Ok(CheckReport::all(
            "hom-novikov",
            [
                self.multiplicative(a, alpha)?,
                self.hom_left_symmetric(a, alpha)?,
                self.hom_right_commutative(a, alpha)?,
            ],
        ))
    }

    pub fn hom_associative(&self, a: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
        check_dims(a, alpha)?;
        self.run("hom-associative", "hom-associativity", a.dim(), 3, |t| {
            let (x, y, z) = (a.basis(t[0]), a.basis(t[1]), a.basis(t[2]));
            Ok(hom_associator(a, alpha, &x, &y, &z)?)
        })
    }

    /// Skew-symmetry of the product, checked on pairs `i ≤ j`.
    pub fn skew(&self, l: &Algebra) -> Result<CheckReport, CheckError> {
        let mut report = CheckReport::pass("skew");
        let n = l.dim();
        for i in 0..n {
            for j in i..n {
                let d = if i == j {
                    l.product(i, i)
                } else {
                    l.product(i, j).try_add(&l.product(j, i))?
                };
                if let Some(d) = self.element_defect(&d)? {
                    report.record(Witness {
                        identity: "skew-symmetry".into(),
                        indices: vec![i + 1, j + 1],
                        defect: Defect::Element(d),
                    });
                }
            }
        }
        Ok(report)
    }

    pub fn hom_jacobi(&self, l: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
        check_dims(l, alpha)?;
        self.run("hom-jacobi", "hom-jacobi", l.dim(), 3, |t| {
            let (x, y, z) = (l.basis(t[0]), l.basis(t[1]), l.basis(t[2]));
            Ok(hom_jacobi_defect(l, alpha, &x, &y, &z)?)
        })
    }

    pub fn hom_lie(&self, l: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
        Ok(CheckReport::all(
            "hom-lie",
            [self.skew(l)?, self.hom_jacobi(l, alpha)?, self.multiplicative(l, alpha)?],
        ))
    }

    pub fn derivation(&self, a: &Algebra, d: &EndoMatrix) -> Result<CheckReport, CheckError> {
        check_dims(a, d)?;
        self.run("derivation", "leibniz", a.dim(), 2, |t| {
            let (x, y) = (a.basis(t[0]), a.basis(t[1]));
            let lhs = d.apply(&a.multiply(&x, &y)?)?;
            let rhs = a.multiply(&d.apply(&x)?, &y)?.try_add(&a.multiply(&x, &d.apply(&y)?)?)?;
            Ok(lhs.try_sub(&rhs)?)
        })
    }

    /// `MN = NM`, entrywise; witnesses carry the 1-based matrix position.
    pub fn commuting(&self, m: &EndoMatrix, n: &EndoMatrix) -> Result<CheckReport, CheckError> {
        let diff = m.compose(n)?.try_sub(&n.compose(m)?)?;
        let mut report = CheckReport::pass("commuting");
        for r in 0..diff.dim() {
            for c in 0..diff.dim() {
                if let Some(d) = self.scalar_defect(diff.get(r, c))? {
                    report.record(Witness {
                        identity: "commutation".into(),
                        indices: vec![r + 1, c + 1],
                        defect: Defect::Scalar(d),
                    });
                }
            }
        }
        Ok(report)
    }

    /// Entrywise equality of two maps.
    pub fn maps_equal(&self, id: &str, m: &EndoMatrix, n: &EndoMatrix) -> Result<CheckReport, CheckError> {
        let diff = m.try_sub(n)?;
        let mut report = CheckReport::pass(id);
        for r in 0..diff.dim() {
            for c in 0..diff.dim() {
                if let Some(d) = self.scalar_defect(diff.get(r, c))? {
                    report.record(Witness {
                        identity: "map equality".into(),
                        indices: vec![r + 1, c + 1],
                        defect: Defect::Scalar(d),
                    });
                }
            }
        }
        Ok(report)
    }

    /// Membership of `x` in `Z(α(L))`: `[x, α(e_j)] = 0` for every `j`.
    pub fn alpha_center(&self, l: &Algebra, alpha: &EndoMatrix, x: &Element) -> Result<CheckReport, CheckError> {
        check_dims(l, alpha)?;
        self.run("alpha-center", "alpha-center membership", l.dim(), 1, |t| {
            Ok(l.multiply(x, &alpha.column(t[0]))?)
        })
    }
}

fn check_dims(a: &Algebra, m: &EndoMatrix) -> Result<(), CheckError> {
    if a.dim() != m.dim() {
        return Err(AlgebraError::Dimension { expected: a.dim(), found: m.dim() }.into());
    }
    Ok(())
}

/// `a(x,y,z) − a(y,x,z)` with `a` the associator.
pub fn left_symmetric_defect(a: &Algebra, x: &Element, y: &Element, z: &Element) -> Result<Element, AlgebraError> {
    a.associator(x, y, z)?.try_sub(&a.associator(y, x, z)?)
}

/// `(xy)z − (xz)y`.
pub fn right_commutative_defect(a: &Algebra, x: &Element, y: &Element, z: &Element) -> Result<Element, AlgebraError> {
    a.multiply(&a.multiply(x, y)?, z)?.try_sub(&a.multiply(&a.multiply(x, z)?, y)?)
}

/// `α(xy) − α(x)α(y)`.
pub fn multiplicative_defect(a: &Algebra, alpha: &EndoMatrix, x: &Element, y: &Element) -> Result<Element, AlgebraError> {
    alpha.apply(&a.multiply(x, y)?)?.try_sub(&a.multiply(&alpha.apply(x)?, &alpha.apply(y)?)?)
}

/// `(xy)α(z) − α(x)(yz)`.
pub fn hom_associator(a: &Algebra, alpha: &EndoMatrix, x: &Element, y: &Element, z: &Element) -> Result<Element, AlgebraError> {
    let left = a.multiply(&a.multiply(x, y)?, &alpha.apply(z)?)?;
    let right = a.multiply(&alpha.apply(x)?, &a.multiply(y, z)?)?;
    left.try_sub(&right)
}

/// Hom-associator of `(x,y,z)` minus that of `(y,x,z)`.
pub fn hom_left_symmetric_defect(
    a: &Algebra,
    alpha: &EndoMatrix,
    x: &Element,
    y: &Element,
    z: &Element,
) -> Result<Element, AlgebraError> {
    hom_associator(a, alpha, x, y, z)?.try_sub(&hom_associator(a, alpha, y, x, z)?)
}

/// `(xy)α(z) − (xz)α(y)`.
pub fn hom_right_commutative_defect(
    a: &Algebra,
    alpha: &EndoMatrix,
    x: &Element,
    y: &Element,
    z: &Element,
) -> Result<Element, AlgebraError> {
    let left = a.multiply(&a.multiply(x, y)?, &alpha.apply(z)?)?;
    let right = a.multiply(&a.multiply(x, z)?, &alpha.apply(y)?)?;
    left.try_sub(&right)
}

/// `[[x,y],α(z)] + [[z,x],α(y)] + [[y,z],α(x)]`.
pub fn hom_jacobi_defect(
    l: &Algebra,
    alpha: &EndoMatrix,
    x: &Element,
    y: &Element,
    z: &Element,
) -> Result<Element, AlgebraError> {
    let t1 = l.multiply(&l.multiply(x, y)?, &alpha.apply(z)?)?;
    let t2 = l.multiply(&l.multiply(z, x)?, &alpha.apply(y)?)?;
    let t3 = l.multiply(&l.multiply(y, z)?, &alpha.apply(x)?)?;
    t1.try_add(&t2)?.try_add(&t3)
}

pub fn check_left_symmetric(a: &Algebra) -> Result<CheckReport, CheckError> {
    Checker::exact().left_symmetric(a)
}

pub fn check_right_commutative(a: &Algebra) -> Result<CheckReport, CheckError> {
    Checker::exact().right_commutative(a)
}

pub fn check_novikov(a: &Algebra) -> Result<CheckReport, CheckError> {
    Checker::exact().novikov(a)
}

pub fn check_commutative(a: &Algebra) -> Result<CheckReport, CheckError> {
    Checker::exact().commutative(a)
}

pub fn check_multiplicative(a: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
    Checker::exact().multiplicative(a, alpha)
}

pub fn check_hom_left_symmetric(a: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
    Checker::exact().hom_left_symmetric(a, alpha)
}

pub fn check_hom_novikov(a: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
    Checker::exact().hom_novikov(a, alpha)
}

pub fn check_hom_associative(a: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
    Checker::exact().hom_associative(a, alpha)
}

pub fn check_hom_lie(l: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
    Checker::exact().hom_lie(l, alpha)
}

pub fn check_derivation(a: &Algebra, d: &EndoMatrix) -> Result<CheckReport, CheckError> {
    Checker::exact().derivation(a, d)
}

pub fn check_commuting(m: &EndoMatrix, n: &EndoMatrix) -> Result<CheckReport, CheckError> {
    Checker::exact().commuting(m, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::ParameterRing;

    fn n4() -> Algebra {
        Algebra::from_int_constants("N4", 2, &[(0, 1, 0, 1), (1, 1, 1, 1)])
    }

    #[test]
    fn n4_is_novikov_but_not_commutative() {
        assert!(check_novikov(&n4()).unwrap().passed);
        let c = check_commutative(&n4()).unwrap();
        assert!(!c.passed);
        assert_eq!(c.witnesses[0].indices, vec![1, 2]);
    }

    #[test]
    fn zero_algebra_passes() {
        let t1 = Algebra::from_int_constants("T1", 2, &[]);
        assert!(check_left_symmetric(&t1).unwrap().passed);
    }

    #[test]
    fn heisenberg_product_is_not_right_commutative() {
        let h = Algebra::from_int_constants("h3", 3, &[(0, 1, 2, 1), (1, 0, 2, -1)]);
        let r = check_right_commutative(&h).unwrap();
        assert!(r.passed, "every double product vanishes in h3");
        let sl2 = Algebra::from_int_constants(
            "sl2",
            3,
            &[(0, 1, 1, 2), (1, 0, 1, -2), (0, 2, 2, -2), (2, 0, 2, 2), (1, 2, 0, 1), (2, 1, 0, -1)],
        );
        let ls = check_left_symmetric(&sl2).unwrap();
        assert!(!ls.passed);
        assert!(ls.witnesses.len() <= MAX_WITNESSES);
        assert!(!check_right_commutative(&sl2).unwrap().passed);
    }

    #[test]
    fn t2_wrong_corner_fails_with_expected_defect() {
        let ring = ParameterRing::new(&["a1", "a2"]).unwrap();
        let t2 = Algebra::from_int_constants("T2", 2, &[(0, 0, 1, 1)]).lift(&ring).unwrap();
        let a1 = Scalar::symbol(&ring, "a1").unwrap();
        let a2 = Scalar::symbol(&ring, "a2").unwrap();
        let good = EndoMatrix::from_rows(vec![
            vec![a1.clone(), Scalar::zero(&ring)],
            vec![a2.clone(), a1.pow(2)],
        ])
        .unwrap();
        assert!(check_multiplicative(&t2, &good).unwrap().passed);
        let bad = EndoMatrix::from_rows(vec![vec![a1.clone(), Scalar::zero(&ring)], vec![a2, a1.clone()]]).unwrap();
        let r = check_multiplicative(&t2, &bad).unwrap();
        assert!(!r.passed);
        assert_eq!(r.failures, 1);
        assert_eq!(r.witnesses[0].indices, vec![1, 1]);
        assert_eq!(r.witnesses[0].defect.to_string(), "(-a1^2 + a1)*e2");
    }

    #[test]
    fn mod_p_checker_reduces_defects() {
        // 2*id leaves the defect 14*e2, which vanishes in F_7 but not over Q.
        let a = Algebra::from_int_constants("X", 2, &[(0, 0, 1, 7)]);
        let id = EndoMatrix::identity(a.ring(), 2);
        let two = EndoMatrix::from_ints(a.ring(), &[&[2, 0], &[0, 2]]);
        assert!(!check_multiplicative(&a, &two).unwrap().passed);
        let c = Checker::mod_p(FieldSpec::new(7)).unwrap();
        assert!(c.multiplicative(&a, &two).unwrap().passed);
        assert!(c.hom_novikov(&a, &id).unwrap().passed);
    }

    #[test]
    fn report_conjunction_keeps_counts() {
        let w = Witness { identity: "x".into(), indices: vec![1], defect: Defect::Message("m".into()) };
        let r = CheckReport::all("both", [CheckReport::pass("a"), CheckReport::fail("b", w)]);
        assert!(!r.passed);
        assert_eq!(r.failures, 1);
        assert_eq!(r.summary(), "x at (1): m");
    }
}
