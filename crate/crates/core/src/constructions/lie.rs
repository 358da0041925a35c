//! Small Lie algebras and the sample grid for the `[f(x), y]` products.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Algebra, EndoMatrix};
use crate::scalars::{GaussRational, ParameterRing, Rational, Scalar};

use super::twisted_product;

pub fn abelian3() -> Algebra {
    Algebra::from_int_constants("abelian3", 3, &[])
}

/// `[e1, e2] = e3`.
pub fn heisenberg() -> Algebra {
    Algebra::from_int_constants("heisenberg", 3, &[(0, 1, 2, 1), (1, 0, 2, -1)])
}

/// Basis `(h, e, f)` with `[h,e] = 2e`, `[h,f] = −2f`, `[e,f] = h`.
pub fn sl2() -> Algebra {
    Algebra::from_int_constants(
        "sl2",
        3,
        &[(0, 1, 1, 2), (1, 0, 1, -2), (0, 2, 2, -2), (2, 0, 2, 2), (1, 2, 0, 1), (2, 1, 0, -1)],
    )
}

/// `[e1, e2] = e2`.
pub fn nonabelian2() -> Algebra {
    Algebra::from_int_constants("nonabelian2", 2, &[(0, 1, 1, 1), (1, 0, 1, -1)])
}

/// Where a sample's scalars live.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleField {
    Rationals,
    /// Integer entries read modulo this prime.
    Prime(u64),
}

/// A Hom-Lie algebra `(L, β∘[,], β)` with a map `f` commuting with `β`.
#[derive(Clone, Debug)]
pub struct Thm14Sample {
    pub label: String,
    pub lie: Algebra,
    pub alpha: EndoMatrix,
    pub f: EndoMatrix,
    pub field: SampleField,
}

/// A diagonal automorphism of each base algebra plus the blocks of its eigenspaces.
fn twist_variant(name: &str, field: SampleField) -> (Vec<Scalar>, Vec<Vec<usize>>) {
    let ring = ParameterRing::empty();
    let int = |v: i64| Scalar::from_int(&ring, v);
    let half = Scalar::from_gauss(&ring, GaussRational::from_rational(Rational::new(1.into(), 2.into())));
    // 2 and its inverse: 1/2 over Q, 4 over F_7
    let inv2 = match field {
        SampleField::Rationals => half,
        SampleField::Prime(p) => int(crate::scalars::inv_mod(2, p).unwrap_or(1) as i64),
    };
    match name {
        "abelian3" => (vec![int(2), int(2), int(3)], vec![vec![0, 1], vec![2]]),
        "heisenberg" => (vec![int(2), int(1), int(2)], vec![vec![0, 2], vec![1]]),
        "sl2" => (vec![int(1), int(2), inv2], vec![vec![0], vec![1], vec![2]]),
        _ => (vec![int(1), int(2)], vec![vec![0], vec![1]]),
    }
}

fn random_f(rng: &mut ChaCha8Rng, n: usize, blocks: &[Vec<usize>], field: SampleField) -> EndoMatrix {
    let ring = ParameterRing::empty();
    let mut f = EndoMatrix::zero(&ring, n);
    // sparse draws make the conditions hold often enough to exercise both verdicts
    let density = if rng.gen_bool(0.5) { 0.3 } else { 1.0 };
    for block in blocks {
        for &r in block {
            for &c in block {
                if !rng.gen_bool(density) {
                    continue;
                }
                let v = match field {
                    SampleField::Rationals => rng.gen_range(-2..=2),
                    SampleField::Prime(p) => rng.gen_range(0..p as i64),
                };
                f.set(r, c, Scalar::from_int(&ring, v));
            }
        }
    }
    f
}

/// The grid: four base algebras, each untwisted and twisted by a diagonal
/// automorphism, with `per_cell` random maps `f` in the commutant of the twist.
/// Over the rationals the case `sl2, α = id, f = id` is always included.
pub fn sample_grid(rng: &mut ChaCha8Rng, field: SampleField, per_cell: usize) -> Vec<Thm14Sample> {
    let mut out = Vec::new();
    if field == SampleField::Rationals {
        let l = sl2();
        let id = EndoMatrix::identity(l.ring(), 3);
        out.push(Thm14Sample { label: "sl2/id/f=id".into(), lie: l, alpha: id.clone(), f: id, field });
    }
    for base in [abelian3(), heisenberg(), sl2(), nonabelian2()] {
        let n = base.dim();
        let (diag, blocks) = twist_variant(&base.name, field);
        let beta = EndoMatrix::diagonal(diag);
        let id = EndoMatrix::identity(base.ring(), n);
        let twisted = twisted_product(&base, &beta).expect("dimensions agree");
        let all: Vec<usize> = (0..n).collect();
        let variants = [("id", base.clone(), id, vec![all]), ("twist", twisted, beta, blocks)];
        for (tag, lie, alpha, blocks) in variants {
            for k in 0..per_cell {
                let f = random_f(rng, n, &blocks, field);
                out.push(Thm14Sample {
                    label: format!("{}/{}/{}", base.name, tag, k),
                    lie: lie.clone(),
                    alpha: alpha.clone(),
                    f,
                    field,
                });
            }
        }
    }
    out
}
