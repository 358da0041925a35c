//! Polynomial rings `Q[x1, ..., xn]` with a shift endomorphism and a partial
//! derivative, and the twisted product `f * g = α(f ∂g/∂x_i)` on them.
//!
//! These algebras are infinite-dimensional, so the Hom-Novikov identities are
//! checked on sampled monomial triples rather than on a basis.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::axioms::{CheckReport, Defect, Witness};
use crate::par::Execution;
use crate::scalars::Rational;

/// Highest total degree of a sampled monomial.
pub const SAMPLE_DEGREE: u32 = 8;
/// Largest variable count the sampler accepts.
pub const SAMPLE_VARS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("polynomials in {0} and {1} variables cannot be combined")]
    VariableMismatch(usize, usize),
}

/// A polynomial with rational coefficients, keyed by exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(c, vec![0; nvars])
    }

    pub fn monomial(c: Rational, exps: Vec<u32>) -> Self {
        let mut p = Self::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// The variable `x_{index+1}`.
    pub fn var(nvars: usize, index: usize) -> Result<Self, PolyError> {
        if index >= nvars {
            return Err(PolyError::IndexOutOfRange { index, nvars });
        }
        let mut e = vec![0; nvars];
        e[index] = 1;
        Ok(Self::monomial(Rational::one(), e))
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let sum = self.terms.remove(&e).unwrap_or_else(Rational::zero) + c;
        if !sum.is_zero() {
            self.terms.insert(e, sum);
        }
    }

    fn same_ring(&self, other: &SparsePoly) -> Result<(), PolyError> {
        if self.nvars == other.nvars {
            Ok(())
        } else {
            Err(PolyError::VariableMismatch(self.nvars, other.nvars))
        }
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> SparsePoly {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }
}

impl fmt::Display for SparsePoly {
    /// Highest total degree first, ties in reverse lexicographic exponent order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Vec<u32>, &Rational)> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(j, &p)| {
                    let name = if self.nvars == 1 { "x".to_string() } else { format!("x{}", j + 1) };
                    if p == 1 {
                        name
                    } else {
                        format!("{name}^{p}")
                    }
                })
                .collect();
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write!(f, "{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// The substitution `x_j ↦ x_j + c_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftEndo {
    pub offsets: Vec<Rational>,
}

impl ShiftEndo {
    pub fn new(offsets: Vec<Rational>) -> Self {
        ShiftEndo { offsets }
    }

    pub fn from_ints(offsets: &[i64]) -> Self {
        ShiftEndo { offsets: offsets.iter().map(|&c| Rational::from_integer(c.into())).collect() }
    }

    pub fn nvars(&self) -> usize {
        self.offsets.len()
    }
}

pub fn pmul(f: &SparsePoly, g: &SparsePoly) -> Result<SparsePoly, PolyError> {
    f.same_ring(g)?;
    let mut out = SparsePoly::zero(f.nvars);
    for (ea, ca) in &f.terms {
        for (eb, cb) in &g.terms {
            let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
            out.add_term(e, ca * cb);
        }
    }
    Ok(out)
}

/// `∂f/∂x_{i+1}`.
pub fn pderiv(f: &SparsePoly, i: usize) -> Result<SparsePoly, PolyError> {
    if i >= f.nvars {
        return Err(PolyError::IndexOutOfRange { index: i, nvars: f.nvars });
    }
    let mut out = SparsePoly::zero(f.nvars);
    for (e, c) in &f.terms {
        if e[i] > 0 {
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c * Rational::from_integer(BigInt::from(e[i])));
        }
    }
    Ok(out)
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut r = BigInt::one();
    for t in 0..k {
        r = r * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    r
}

/// `f(x_1 + c_1, ..., x_n + c_n)`, expanded binomially.
pub fn pshift(f: &SparsePoly, endo: &ShiftEndo) -> Result<SparsePoly, PolyError> {
    if endo.nvars() != f.nvars {
        return Err(PolyError::VariableMismatch(f.nvars, endo.nvars()));
    }
    let mut out = SparsePoly::zero(f.nvars);
    for (e, c) in &f.terms {
        // (x_j + c_j)^{e_j} = Σ_k C(e_j, k) c_j^{e_j - k} x_j^k, one factor per variable.
        let mut partial: Vec<(Vec<u32>, Rational)> = vec![(Vec::new(), c.clone())];
        for (j, &p) in e.iter().enumerate() {
            let cj = &endo.offsets[j];
            let mut next = Vec::new();
            for (pre, coef) in &partial {
                for k in 0..=p {
                    let w = Rational::from_integer(binomial(p, k)) * num_traits::pow(cj.clone(), (p - k) as usize);
                    if w.is_zero() {
                        continue;
                    }
                    let mut ex = pre.clone();
                    ex.push(k);
                    next.push((ex, coef * &w));
                }
            }
            partial = next;
        }
        for (ex, coef) in partial {
            out.add_term(ex, coef);
        }
    }
    Ok(out)
}

/// `α(f · ∂g/∂x_{i+1})` with `α` the shift.
pub fn star_22(f: &SparsePoly, g: &SparsePoly, endo: &ShiftEndo, i: usize) -> Result<SparsePoly, PolyError> {
    pshift(&pmul(f, &pderiv(g, i)?)?, endo)
}

/// Which product the sampled check runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarVariant {
    /// `α(f ∂g)`.
    Standard,
    /// `α(f) ∂g`, with the twist in the wrong place. Used as a negative control.
    MisplacedTwist,
}

impl StarVariant {
    fn apply(self, f: &SparsePoly, g: &SparsePoly, endo: &ShiftEndo, i: usize) -> Result<SparsePoly, PolyError> {
        match self {
            StarVariant::Standard => star_22(f, g, endo, i),
            StarVariant::MisplacedTwist => pmul(&pshift(f, endo)?, &pderiv(g, i)?),
        }
    }
}

type Triple = (SparsePoly, SparsePoly, SparsePoly);

/// Defects of the three Hom-Novikov identities on one triple.
fn triple_defects(
    variant: StarVariant,
    endo: &ShiftEndo,
    i: usize,
    (x, y, z): &Triple,
) -> Result<Vec<(&'static str, SparsePoly)>, PolyError> {
    let star = |f: &SparsePoly, g: &SparsePoly| variant.apply(f, g, endo, i);
    let alpha = |f: &SparsePoly| pshift(f, endo);
    let (ax, ay, az) = (alpha(x)?, alpha(y)?, alpha(z)?);

    let mult = alpha(&star(x, y)?)?.sub(&star(&ax, &ay)?)?;
    let assoc = |a: &SparsePoly, b: &SparsePoly, c: &SparsePoly, aa: &SparsePoly, ac: &SparsePoly| {
        star(&star(a, b)?, ac)?.sub(&star(aa, &star(b, c)?)?)
    };
    let left = assoc(x, y, z, &ax, &az)?.sub(&assoc(y, x, z, &ay, &az)?)?;
    let right = star(&star(x, y)?, &az)?.sub(&star(&star(x, z)?, &ay)?)?;
    Ok(vec![("multiplicativity", mult), ("hom-left-symmetry", left), ("hom-right-commutativity", right)])
}

fn check_triples(id: &str, variant: StarVariant, endo: &ShiftEndo, i: usize, triples: &[Triple]) -> CheckReport {
    let results = Execution::default().map(triples, |t| triple_defects(variant, endo, i, t));
    let mut report = CheckReport::pass(id);
    for (t, res) in triples.iter().zip(results) {
        match res {
            Ok(defects) => {
                for (identity, d) in defects {
                    if !d.is_zero() {
                        report.record(Witness {
                            identity: identity.into(),
                            indices: vec![],
                            defect: Defect::Message(format!("x = {}, y = {}, z = {}: {}", t.0, t.1, t.2, d)),
                        });
                    }
                }
            }
            Err(e) => report.record(Witness {
                identity: "evaluation".into(),
                indices: vec![],
                defect: Defect::Message(e.to_string()),
            }),
        }
    }
    report.with_note(format!("{} triples", triples.len()))
}

fn random_monomial(rng: &mut ChaCha8Rng, nvars: usize, max_degree: u32) -> SparsePoly {
    let total = rng.gen_range(0..=max_degree);
    let mut e = vec![0u32; nvars];
    for _ in 0..total {
        e[rng.gen_range(0..nvars)] += 1;
    }
    SparsePoly::monomial(Rational::one(), e)
}

/// A polynomial with a few monomials and small nonzero integer coefficients.
pub fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, max_degree: u32, max_terms: usize) -> SparsePoly {
    let mut p = SparsePoly::zero(nvars);
    for _ in 0..rng.gen_range(1..=max_terms) {
        let m = random_monomial(rng, nvars, max_degree);
        let mut c = rng.gen_range(-5i64..=5);
        if c == 0 {
            c = 1;
        }
        p = p.add(&m.scale(&Rational::from_integer(c.into()))).expect("same ring");
    }
    p
}

fn validate(endo: &ShiftEndo, i: usize) -> Result<(), String> {
    let n = endo.nvars();
    if n == 0 || n > SAMPLE_VARS {
        return Err(format!("sampler supports 1 to {SAMPLE_VARS} variables, got {n}"));
    }
    if i >= n {
        return Err(PolyError::IndexOutOfRange { index: i, nvars: n }.to_string());
    }
    Ok(())
}

fn invalid(id: &str, msg: String) -> CheckReport {
    CheckReport::fail(id, Witness { identity: "input".into(), indices: vec![], defect: Defect::Message(msg) })
}

/// The Hom-Novikov identities for `(Q[x], *, α)` on `samples` seeded random
/// monomial triples of degree at most [`SAMPLE_DEGREE`].
pub fn check_hom_novikov_sampled(endo: &ShiftEndo, i: usize, samples: usize, seed: u64) -> CheckReport {
    check_sampled_variant(StarVariant::Standard, endo, i, samples, seed)
}

pub fn check_sampled_variant(variant: StarVariant, endo: &ShiftEndo, i: usize, samples: usize, seed: u64) -> CheckReport {
    let id = "poly-hom-novikov";
    if let Err(msg) = validate(endo, i) {
        return invalid(id, msg);
    }
    if samples == 0 {
        return invalid(id, "sample count must be at least 1".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = endo.nvars();
    let triples: Vec<Triple> = (0..samples)
        .map(|_| {
            (
                random_monomial(&mut rng, n, SAMPLE_DEGREE),
                random_monomial(&mut rng, n, SAMPLE_DEGREE),
                random_monomial(&mut rng, n, SAMPLE_DEGREE),
            )
        })
        .collect();
    check_triples(id, variant, endo, i, &triples)
}

/// The same identities on random polynomials with several terms.
pub fn check_hom_novikov_polys(endo: &ShiftEndo, i: usize, samples: usize, seed: u64) -> CheckReport {
    let id = "poly-hom-novikov-general";
    if let Err(msg) = validate(endo, i) {
        return invalid(id, msg);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = endo.nvars();
    let triples: Vec<Triple> = (0..samples)
        .map(|_| {
            (
                random_poly(&mut rng, n, SAMPLE_DEGREE / 2, 4),
                random_poly(&mut rng, n, SAMPLE_DEGREE / 2, 4),
                random_poly(&mut rng, n, SAMPLE_DEGREE / 2, 4),
            )
        })
        .collect();
    check_triples(id, StarVariant::Standard, endo, i, &triples)
}

/// `∂α = α∂` on every monomial of total degree at most `max_degree`.
pub fn check_shift_commutes(endo: &ShiftEndo, i: usize, max_degree: u32) -> CheckReport {
    let id = "poly-shift-commutes";
    let n = endo.nvars();
    if i >= n {
        return invalid(id, PolyError::IndexOutOfRange { index: i, nvars: n }.to_string());
    }
    let mut report = CheckReport::pass(id);
    let mut count = 0usize;
    let mut stack = vec![Vec::<u32>::new()];
    while let Some(pre) = stack.pop() {
        let used: u32 = pre.iter().sum();
        if pre.len() == n {
            count += 1;
            let m = SparsePoly::monomial(Rational::one(), pre);
            let lhs = pderiv(&pshift(&m, endo).expect("arity"), i).expect("index");
            let rhs = pshift(&pderiv(&m, i).expect("index"), endo).expect("arity");
            if lhs != rhs {
                report.record(Witness {
                    identity: "shift commutes with derivative".into(),
                    indices: vec![],
                    defect: Defect::Message(format!("{m}: {}", lhs.sub(&rhs).expect("same ring"))),
                });
            }
            continue;
        }
        for k in 0..=(max_degree - used) {
            let mut e = pre.clone();
            e.push(k);
            stack.push(e);
        }
    }
    report.with_note(format!("{count} monomials"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn x() -> SparsePoly {
        SparsePoly::var(1, 0).unwrap()
    }

    fn c(n: i64) -> SparsePoly {
        SparsePoly::constant(1, q(n))
    }

    #[test]
    fn product_and_derivative() {
        let f = x().add(&c(1)).unwrap();
        let g = x().sub(&c(1)).unwrap();
        assert_eq!(pmul(&f, &g).unwrap().to_string(), "x^2 - 1");
        assert!(pderiv(&c(7), 0).unwrap().is_zero());
        assert_eq!(pderiv(&c(7), 1), Err(PolyError::IndexOutOfRange { index: 1, nvars: 1 }));
    }

    #[test]
    fn shift_expands_binomially() {
        let x3 = SparsePoly::monomial(q(1), vec![3]);
        let s = pshift(&x3, &ShiftEndo::from_ints(&[2])).unwrap();
        assert_eq!(s.to_string(), "x^3 + 6*x^2 + 12*x + 8");
        // D(α(x^n)) = n(x+c)^(n-1) = α(D(x^n))
        let endo = ShiftEndo::from_ints(&[2]);
        let lhs = pderiv(&s, 0).unwrap();
        let rhs = pshift(&pderiv(&x3, 0).unwrap(), &endo).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.to_string(), "3*x^2 + 12*x + 12");
    }

    #[test]
    fn star_examples() {
        let one = ShiftEndo::from_ints(&[1]);
        assert_eq!(star_22(&x(), &x(), &one, 0).unwrap().to_string(), "x + 1");
        assert!(star_22(&x(), &c(3), &one, 0).unwrap().is_zero());
        let id = ShiftEndo::from_ints(&[0]);
        let f = pmul(&x(), &x()).unwrap().add(&c(2)).unwrap();
        let g = pmul(&x(), &pmul(&x(), &x()).unwrap()).unwrap();
        let classical = pmul(&f, &pderiv(&g, 0).unwrap()).unwrap();
        assert_eq!(star_22(&f, &g, &id, 0).unwrap(), classical);
    }

    #[test]
    fn sampled_identities_hold() {
        let r = check_hom_novikov_sampled(&ShiftEndo::from_ints(&[1]), 0, 100, 0);
        assert!(r.passed, "{}", r.summary());
        let r = check_hom_novikov_sampled(&ShiftEndo::from_ints(&[1, -1]), 1, 100, 0);
        assert!(r.passed, "{}", r.summary());
    }

    #[test]
    fn misplaced_twist_is_caught() {
        let r = check_sampled_variant(StarVariant::MisplacedTwist, &ShiftEndo::from_ints(&[1]), 0, 100, 0);
        assert!(!r.passed);
        assert!(r.witnesses[0].to_string().contains("x = "));
    }

    #[test]
    fn general_polynomials() {
        let r = check_hom_novikov_polys(&ShiftEndo::from_ints(&[2, -1]), 0, 20, 3);
        assert!(r.passed, "{}", r.summary());
    }

    #[test]
    fn shift_commutes_up_to_degree_12() {
        for c in [-1, 1, 2] {
            let r = check_shift_commutes(&ShiftEndo::from_ints(&[c]), 0, 12);
            assert!(r.passed, "{}", r.summary());
            let r = check_shift_commutes(&ShiftEndo::from_ints(&[c, 1]), 1, 12);
            assert!(r.passed, "{}", r.summary());
        }
    }

    #[test]
    fn bad_sampler_input() {
        assert!(!check_hom_novikov_sampled(&ShiftEndo::from_ints(&[1]), 1, 10, 0).passed);
        assert!(!check_hom_novikov_sampled(&ShiftEndo::from_ints(&[1, 1, 1]), 0, 10, 0).passed);
        assert!(!check_hom_novikov_sampled(&ShiftEndo::from_ints(&[1]), 0, 0, 0).passed);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn leibniz(seed in any::<u64>(), i in 0usize..2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_poly(&mut rng, 2, 6, 4);
            let g = random_poly(&mut rng, 2, 6, 4);
            let lhs = pderiv(&pmul(&f, &g).unwrap(), i).unwrap();
            let rhs = pmul(&pderiv(&f, i).unwrap(), &g).unwrap().add(&pmul(&f, &pderiv(&g, i).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn shift_is_a_ring_map(seed in any::<u64>(), c1 in -3i64..=3, c2 in -3i64..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let endo = ShiftEndo::from_ints(&[c1, c2]);
            let f = random_poly(&mut rng, 2, 5, 3);
            let g = random_poly(&mut rng, 2, 5, 3);
            let lhs = pshift(&pmul(&f, &g).unwrap(), &endo).unwrap();
            let rhs = pmul(&pshift(&f, &endo).unwrap(), &pshift(&g, &endo).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
