//! Ways of producing Hom-type algebras from ordinary ones.
//!
//! * [`yau_twist`]: compose the product with an algebra morphism.
//! * [`dorfman_gelfand_product`] and [`cor13_product`]: products `x·D(y)` and
//!   `α(x·D(y))` from a derivation of a commutative algebra.
//! * [`thm14`]: the products `[f(x), y]` and `[x, f(y)]` on a Hom-Lie algebra.
//!
//! Preconditions are checked unless the `_unchecked` variant is used.

pub mod lie;
pub mod thm14;

pub use thm14::{alpha_center_defect, star_left, star_right, thm14_conditions, Thm14Conditions};

use num_bigint::BigInt;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, EndoMatrix};
use crate::axioms::{CheckError, CheckReport, Checker, Defect, Witness};
use crate::scalars::{GaussRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("precondition `{}` failed: {}", .0.check_id, .0.summary())]
    Precondition(Box<CheckReport>),
    #[error("postcondition `{}` failed: {}", .0.check_id, .0.summary())]
    Postcondition(Box<CheckReport>),
    #[error("map is not nilpotent within {bound} steps")]
    NotNilpotent { bound: usize },
    #[error(transparent)]
    Check(#[from] CheckError),
}

impl From<AlgebraError> for ConstructionError {
    fn from(e: AlgebraError) -> Self {
        ConstructionError::Check(e.into())
    }
}

fn require(report: CheckReport) -> Result<(), ConstructionError> {
    if report.passed {
        Ok(())
    } else {
        Err(ConstructionError::Precondition(Box::new(report)))
    }
}

fn ensure(report: CheckReport) -> Result<(), ConstructionError> {
    if report.passed {
        Ok(())
    } else {
        Err(ConstructionError::Postcondition(Box::new(report)))
    }
}

/// A product together with a twisting map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomAlgebra {
    pub base: Algebra,
    pub twist: EndoMatrix,
}

/// The algebra with product `α ∘ μ`. No precondition.
pub fn twisted_product(a: &Algebra, alpha: &EndoMatrix) -> Result<Algebra, AlgebraError> {
    if a.dim() != alpha.dim() {
        return Err(AlgebraError::Dimension { expected: a.dim(), found: alpha.dim() });
    }
    let mut out = a.renamed(&format!("{}.twisted", a.name));
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            out.set_product(i, j, &alpha.apply(&a.product(i, j))?)?;
        }
    }
    Ok(out)
}

/// `(A, α∘μ, α)` for an algebra morphism `α`.
pub fn yau_twist(a: &Algebra, alpha: &EndoMatrix) -> Result<HomAlgebra, ConstructionError> {
    require(Checker::exact().multiplicative(a, alpha)?)?;
    yau_twist_unchecked(a, alpha)
}

/// [`yau_twist`] without the morphism check, for negative tests.
pub fn yau_twist_unchecked(a: &Algebra, alpha: &EndoMatrix) -> Result<HomAlgebra, ConstructionError> {
    Ok(HomAlgebra { base: twisted_product(a, alpha)?, twist: alpha.clone() })
}

/// Twists a Lie bracket along one of its morphisms.
pub fn hom_twist_bracket(l: &Algebra, alpha: &EndoMatrix) -> Result<HomAlgebra, ConstructionError> {
    let c = Checker::exact();
    require(c.skew(l)?)?;
    let id = EndoMatrix::identity(l.ring(), l.dim());
    require(c.hom_jacobi(l, &id)?.with_note("jacobi"))?;
    require(c.multiplicative(l, alpha)?)?;
    yau_twist_unchecked(l, alpha)
}

/// The two composite identities for `μ_α = α∘μ` and the multiplicativity of
/// `α` for `μ_α`, on basis triples.
pub fn lemma21_check(a: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
    lemma21_with(&Checker::exact(), a, alpha)
}

pub fn lemma21_with(c: &Checker, a: &Algebra, alpha: &EndoMatrix) -> Result<CheckReport, CheckError> {
    let twisted = twisted_product(a, alpha)?;
    let alpha2 = alpha.compose(alpha)?;
    let n = a.dim();
    let mut left = CheckReport::pass("lemma21-left");
    let mut right = CheckReport::pass("lemma21-right");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (x, y, z) = (a.basis(i), a.basis(j), a.basis(k));
                let idx = vec![i + 1, j + 1, k + 1];
                let l1 = twisted.multiply(&twisted.multiply(&x, &y)?, &alpha.apply(&z)?)?;
                let r1 = alpha2.apply(&a.multiply(&a.multiply(&x, &y)?, &z)?)?;
                if let Some(d) = c.element_defect(&l1.try_sub(&r1)?)? {
                    left.record(Witness {
                        identity: "twisted left composite".into(),
                        indices: idx.clone(),
                        defect: Defect::Element(d),
                    });
                }
                let l2 = twisted.multiply(&alpha.apply(&x)?, &twisted.multiply(&y, &z)?)?;
                let r2 = alpha2.apply(&a.multiply(&x, &a.multiply(&y, &z)?)?)?;
                if let Some(d) = c.element_defect(&l2.try_sub(&r2)?)? {
                    right.record(Witness {
                        identity: "twisted right composite".into(),
                        indices: idx,
                        defect: Defect::Element(d),
                    });
                }
            }
        }
    }
    let mult = c.multiplicative(&twisted, alpha)?;
    Ok(CheckReport::all("lemma21", [left, right, mult]))
}

/// `x ∗ y = x·D(y)` with twist `α`, for `A` commutative and Hom-associative,
/// `D` a derivation commuting with `α`.
pub fn dorfman_gelfand_product(a: &Algebra, alpha: &EndoMatrix, d: &EndoMatrix) -> Result<HomAlgebra, ConstructionError> {
    let c = Checker::exact();
    require(c.commutative(a)?)?;
    require(c.hom_associative(a, alpha)?)?;
    require(c.derivation(a, d)?)?;
    require(c.commuting(d, alpha)?)?;
    Ok(HomAlgebra { base: derivation_product(a, d)?, twist: alpha.clone() })
}

fn derivation_product(a: &Algebra, d: &EndoMatrix) -> Result<Algebra, AlgebraError> {
    let mut out = a.renamed(&format!("{}.dg", a.name));
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            out.set_product(i, j, &a.multiply(&a.basis(i), &d.column(j))?)?;
        }
    }
    Ok(out)
}

/// `x ∗ y = α(x·D(y))` with twist `α`, for `A` commutative and associative,
/// `α` a morphism, `D` a derivation commuting with `α`.
pub fn cor13_product(a: &Algebra, alpha: &EndoMatrix, d: &EndoMatrix) -> Result<HomAlgebra, ConstructionError> {
    let c = Checker::exact();
    let id = EndoMatrix::identity(a.ring(), a.dim());
    require(c.commutative(a)?)?;
    require(c.hom_associative(a, &id)?)?;
    require(c.multiplicative(a, alpha)?)?;
    require(c.derivation(a, d)?)?;
    require(c.commuting(d, alpha)?)?;
    // D stays a derivation for the twisted product.
    let twisted = twisted_product(a, alpha)?;
    ensure(c.derivation(&twisted, d)?)?;
    let product = twisted_product(&derivation_product(a, d)?, alpha)?;
    Ok(HomAlgebra { base: product.renamed(&format!("{}.cor", a.name)), twist: alpha.clone() })
}

/// Smallest `m ≤ bound` with `D^m = 0`.
fn nilpotency_index(d: &EndoMatrix, bound: usize) -> Result<Option<usize>, AlgebraError> {
    let mut power = EndoMatrix::identity(&d.ring(), d.dim());
    for m in 0..=bound {
        if power.is_zero() {
            return Ok(Some(m));
        }
        power = power.compose(d)?;
    }
    Ok(None)
}

fn exp_series(d: &EndoMatrix, terms: usize) -> Result<EndoMatrix, AlgebraError> {
    let ring = d.ring();
    let mut acc = EndoMatrix::zero(&ring, d.dim());
    let mut power = EndoMatrix::identity(&ring, d.dim());
    let mut factorial = BigInt::from(1);
    for k in 0..terms {
        if k > 0 {
            factorial *= k;
        }
        let coeff = GaussRational::from_rational(Rational::new(BigInt::from(1), factorial.clone()));
        let term = EndoMatrix::from_rows(
            (0..d.dim()).map(|r| (0..d.dim()).map(|c| power.get(r, c).scale(&coeff)).collect()).collect(),
        )?;
        acc = acc.try_add(&term)?;
        power = power.compose(d)?;
    }
    Ok(acc)
}

/// `exp(D) = Σ D^k/k!` for a nilpotent derivation `D`, with its automorphism
/// properties checked on the way out.
pub fn exp_nilpotent_derivation(a: &Algebra, d: &EndoMatrix) -> Result<EndoMatrix, ConstructionError> {
    let c = Checker::exact();
    require(c.derivation(a, d)?)?;
    let bound = a.dim() + 1;
    let m = nilpotency_index(d, bound)?.ok_or(ConstructionError::NotNilpotent { bound })?;
    let e = exp_series(d, m)?;
    ensure(c.multiplicative(a, &e)?)?;
    let neg = d.scale(&crate::scalars::Scalar::from_int(&d.ring(), -1))?;
    let inv = exp_series(&neg, m)?;
    let id = EndoMatrix::identity(&d.ring(), d.dim());
    ensure(c.maps_equal("exp-inverse", &inv.compose(&e)?, &id)?)?;
    ensure(c.commuting(&e, d)?)?;
    Ok(e)
}

/// `Q[x]/(x^m)` on the basis `1, x, …, x^{m-1}`.
pub fn truncated_polynomial(m: usize) -> Algebra {
    let mut constants = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i + j < m {
                constants.push((i, j, i + j, 1));
            }
        }
    }
    Algebra::from_int_constants(&format!("Q[x]/(x^{m})"), m, &constants)
}

/// The Euler derivation `x·d/dx`: `diag(0, 1, …, m−1)`.
pub fn euler_derivation(m: usize) -> EndoMatrix {
    let ring = crate::scalars::ParameterRing::empty();
    let mut d = EndoMatrix::zero(&ring, m);
    for k in 0..m {
        d.set(k, k, crate::scalars::Scalar::from_int(&ring, k as i64));
    }
    d
}

/// `x²·d/dx` on `Q[x]/(x^m)`: `x^k ↦ k·x^{k+1}`, truncated.
pub fn x2_derivation(m: usize) -> EndoMatrix {
    let ring = crate::scalars::ParameterRing::empty();
    let mut d = EndoMatrix::zero(&ring, m);
    for k in 0..m.saturating_sub(1) {
        d.set(k + 1, k, crate::scalars::Scalar::from_int(&ring, k as i64));
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Element;
    use crate::axioms::check_hom_novikov;
    use crate::scalars::{ParameterRing, Scalar};

    fn x_pow(ring: &std::sync::Arc<ParameterRing>, m: usize, coeffs: &[i64]) -> Element {
        let mut coords = vec![Scalar::zero(ring); m];
        for (k, &c) in coeffs.iter().enumerate() {
            coords[k] = Scalar::from_int(ring, c);
        }
        Element { coords }
    }

    #[test]
    fn t2_twist_matches_table() {
        let ring = ParameterRing::new(&["a1", "a2"]).unwrap();
        let t2 = Algebra::from_int_constants("T2", 2, &[(0, 0, 1, 1)]).lift(&ring).unwrap();
        let a1 = Scalar::symbol(&ring, "a1").unwrap();
        let a2 = Scalar::symbol(&ring, "a2").unwrap();
        let alpha =
            EndoMatrix::from_rows(vec![vec![a1.clone(), Scalar::zero(&ring)], vec![a2, a1.pow(2)]]).unwrap();
        let h = yau_twist(&t2, &alpha).unwrap();
        assert_eq!(h.base.product(0, 0).to_string(), "a1^2*e2");
        assert!(h.base.product(1, 0).is_zero());
        assert!(check_hom_novikov(&h.base, &h.twist).unwrap().passed);
        let zero = yau_twist(&t2, &EndoMatrix::zero(&ring, 2)).unwrap();
        assert!(zero.base.is_zero_product());
    }

    #[test]
    fn non_morphism_is_rejected() {
        let t2 = Algebra::from_int_constants("T2", 2, &[(0, 0, 1, 1)]);
        let bad = EndoMatrix::from_ints(t2.ring(), &[&[2, 0], &[0, 2]]);
        assert!(matches!(yau_twist(&t2, &bad), Err(ConstructionError::Precondition(_))));
        assert!(yau_twist_unchecked(&t2, &bad).is_ok());
    }

    #[test]
    fn euler_dg_product() {
        let a = truncated_polynomial(5);
        let id = EndoMatrix::identity(a.ring(), 5);
        let d = euler_derivation(5);
        let h = dorfman_gelfand_product(&a, &id, &d).unwrap();
        // x * x = x·D(x) = x^2
        assert_eq!(h.base.product(1, 1), x_pow(a.ring(), 5, &[0, 0, 1]));
        assert!(check_hom_novikov(&h.base, &h.twist).unwrap().passed);
    }

    #[test]
    fn exp_of_x2_derivation() {
        let a = truncated_polynomial(4);
        let d = x2_derivation(4);
        let e = exp_nilpotent_derivation(&a, &d).unwrap();
        let r = a.ring();
        assert_eq!(e.column(0), x_pow(r, 4, &[1]));
        assert_eq!(e.column(1), x_pow(r, 4, &[0, 1, 1, 1]));
        assert_eq!(e.column(2), x_pow(r, 4, &[0, 0, 1, 2]));
        assert_eq!(e.column(3), x_pow(r, 4, &[0, 0, 0, 1]));
        let h = cor13_product(&a, &e, &d).unwrap();
        assert_eq!(h.base.product(1, 1), x_pow(r, 4, &[0, 0, 0, 1]));
        assert!(check_hom_novikov(&h.base, &h.twist).unwrap().passed);
    }

    #[test]
    fn exp_of_zero_is_identity_and_euler_is_not_nilpotent() {
        let a = truncated_polynomial(3);
        let zero = EndoMatrix::zero(a.ring(), 3);
        assert_eq!(exp_nilpotent_derivation(&a, &zero).unwrap(), EndoMatrix::identity(a.ring(), 3));
        assert!(matches!(
            exp_nilpotent_derivation(&a, &euler_derivation(3)),
            Err(ConstructionError::NotNilpotent { bound: 4 })
        ));
    }

    #[test]
    fn lemma21_negative_control() {
        let n3 = Algebra::from_int_constants("N3", 2, &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1)]);
        let good = EndoMatrix::from_ints(n3.ring(), &[&[1, 0], &[0, 3]]);
        assert!(lemma21_check(&n3, &good).unwrap().passed);
        let bad = EndoMatrix::from_ints(n3.ring(), &[&[2, 0], &[0, 3]]);
        assert!(!lemma21_check(&n3, &bad).unwrap().passed);
    }
}
