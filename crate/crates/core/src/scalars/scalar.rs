use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{GaussRational, ParameterRing, Rational, ScalarError};

/// Exponent vector over the symbols of a ring (parameters, then roots).
///
/// Parameter exponents may be negative (Laurent monomials); root exponents are
/// always 0 or 1 in reduced form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Box<[i32]>);

pub(crate) type Terms = BTreeMap<Monomial, GaussRational>;

impl Monomial {
    pub fn new(exps: Vec<i32>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn one(width: usize) -> Self {
        Monomial(vec![0; width].into_boxed_slice())
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }
}

/// Graded lexicographic order; printing walks it from the largest term down.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of `Q(i)[params^±1][roots] / (root² = target)` in reduced form.
#[derive(Clone)]
pub struct Scalar {
    ring: Arc<ParameterRing>,
    terms: Terms,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        ParameterRing::same_as(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Scalar {}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

fn add_term(terms: &mut Terms, mono: Monomial, coeff: GaussRational) {
    if coeff.is_zero() {
        return;
    }
    match terms.entry(mono) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(coeff);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get() + &coeff;
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

/// Adds `coeff·mono` to `terms`, rewriting `root²` by its relation target.
fn add_reduced(ring: &ParameterRing, terms: &mut Terms, mono: Monomial, coeff: GaussRational) {
    let np = ring.num_params();
    let over = mono.exponents()[np..].iter().position(|&e| e >= 2);
    let Some(pos) = over else {
        add_term(terms, mono, coeff);
        return;
    };
    let mut exps = mono.exponents().to_vec();
    exps[np + pos] -= 2;
    let rest = Monomial::new(exps);
    for (tm, tc) in &ring.relation(pos).square {
        add_reduced(ring, terms, rest.mul(tm), &coeff * tc);
    }
}

impl Scalar {
    pub fn zero(ring: &Arc<ParameterRing>) -> Self {
        Scalar { ring: ring.clone(), terms: Terms::new() }
    }

    pub fn one(ring: &Arc<ParameterRing>) -> Self {
        Self::from_gauss(ring, GaussRational::one())
    }

    pub fn from_int(ring: &Arc<ParameterRing>, n: i64) -> Self {
        Self::from_gauss(ring, GaussRational::from_int(n))
    }

    pub fn from_rational(ring: &Arc<ParameterRing>, r: Rational) -> Self {
        Self::from_gauss(ring, GaussRational::from_rational(r))
    }

    pub fn from_gauss(ring: &Arc<ParameterRing>, c: GaussRational) -> Self {
        let mut terms = Terms::new();
        add_term(&mut terms, Monomial::one(ring.num_symbols()), c);
        Scalar { ring: ring.clone(), terms }
    }

    pub fn imaginary_unit(ring: &Arc<ParameterRing>) -> Self {
        Self::from_gauss(ring, GaussRational::i())
    }

    /// The scalar consisting of a single declared symbol.
    pub fn symbol(ring: &Arc<ParameterRing>, name: &str) -> Result<Self, ScalarError> {
        let idx = ring.symbol_index(name).ok_or_else(|| ScalarError::UnknownSymbol(name.into()))?;
        let mut exps = vec![0; ring.num_symbols()];
        exps[idx] = 1;
        Ok(Self::from_terms(ring, [(Monomial::new(exps), GaussRational::one())].into()))
    }

    /// Normalizes arbitrary terms: drops zeros and rewrites root powers.
    pub(crate) fn from_terms(ring: &Arc<ParameterRing>, raw: Terms) -> Self {
        let mut terms = Terms::new();
        for (m, c) in raw {
            add_reduced(ring, &mut terms, m, c);
        }
        Scalar { ring: ring.clone(), terms }
    }

    pub fn ring(&self) -> &Arc<ParameterRing> {
        &self.ring
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// The value if this scalar mentions no symbol.
    pub fn constant_value(&self) -> Option<GaussRational> {
        match self.terms.len() {
            0 => Some(GaussRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Names of the symbols with a nonzero exponent somewhere.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut used = BTreeSet::new();
        for m in self.terms.keys() {
            for (idx, &e) in m.exponents().iter().enumerate() {
                if e != 0 {
                    used.insert(self.ring.symbol_name(idx).to_string());
                }
            }
        }
        used
    }

    fn check_ring(&self, other: &Scalar) -> Result<(), ScalarError> {
        if ParameterRing::same_as(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(ScalarError::RingMismatch)
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_ring(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Ok(Scalar { ring: self.ring.clone(), terms })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_ring(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), -c);
        }
        Ok(Scalar { ring: self.ring.clone(), terms })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_ring(other)?;
        let mut terms = Terms::new();
        if self.terms.is_empty() || other.terms.is_empty() {
            return Ok(Scalar { ring: self.ring.clone(), terms });
        }
        let has_roots = self.ring.num_roots() > 0;
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                let c = c1 * c2;
                if has_roots {
                    add_reduced(&self.ring, &mut terms, m, c);
                } else {
                    add_term(&mut terms, m, c);
                }
            }
        }
        Ok(Scalar { ring: self.ring.clone(), terms })
    }

    pub fn scale(&self, c: &GaussRational) -> Scalar {
        let mut terms = Terms::new();
        for (m, t) in &self.terms {
            add_term(&mut terms, m.clone(), t * c);
        }
        Scalar { ring: self.ring.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Inverse of a unit: a nonzero coefficient times a Laurent monomial in parameters.
    pub fn inverse(&self) -> Result<Scalar, ScalarError> {
        let not_unit = || ScalarError::NotInvertible(self.to_string());
        if self.terms.len() != 1 {
            return Err(not_unit());
        }
        let (m, c) = self.terms.iter().next().ok_or_else(not_unit)?;
        let np = self.ring.num_params();
        if m.exponents()[np..].iter().any(|&e| e != 0) {
            return Err(not_unit());
        }
        let inv = c.inverse().ok_or_else(not_unit)?;
        let exps = m.exponents().iter().map(|e| -e).collect();
        Ok(Scalar::from_terms(&self.ring, [(Monomial::new(exps), inv)].into()))
    }

    pub fn pow_i(&self, e: i32) -> Result<Scalar, ScalarError> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inverse()?.pow(e.unsigned_abs()))
        }
    }

    /// Re-expresses this scalar over `target`, matching symbols by name.
    pub fn lift(&self, target: &Arc<ParameterRing>) -> Result<Scalar, ScalarError> {
        if ParameterRing::same_as(&self.ring, target) {
            return Ok(Scalar { ring: target.clone(), terms: self.terms.clone() });
        }
        let map: Vec<usize> = (0..self.ring.num_symbols())
            .map(|idx| {
                let name = self.ring.symbol_name(idx);
                target
                    .symbol_index(name)
                    .filter(|&t| target.is_root_index(t) == self.ring.is_root_index(idx))
                    .ok_or_else(|| ScalarError::UnknownSymbol(name.to_string()))
            })
            .collect::<Result<_, _>>()?;
        let mut raw = Terms::new();
        for (m, c) in &self.terms {
            let mut exps = vec![0; target.num_symbols()];
            for (idx, &e) in m.exponents().iter().enumerate() {
                exps[map[idx]] += e;
            }
            add_term(&mut raw, Monomial::new(exps), c.clone());
        }
        Ok(Scalar::from_terms(target, raw))
    }

    /// Replaces symbols by scalars. Values may live over this ring or over any
    /// ring whose symbols this ring contains. Substituting a root checks that the
    /// value squares to the (substituted) relation target.
    pub fn substitute(&self, assignment: &BTreeMap<String, Scalar>) -> Result<Scalar, ScalarError> {
        let n = self.ring.num_symbols();
        let mut values: Vec<Option<Scalar>> = vec![None; n];
        for (name, value) in assignment {
            let Some(idx) = self.ring.symbol_index(name) else { continue };
            values[idx] = Some(value.lift(&self.ring)?);
        }
        for (pos, rel) in self.ring.roots().iter().enumerate() {
            if let Some(v) = &values[self.ring.num_params() + pos] {
                let target = Scalar::from_terms(&self.ring, rel.square.clone());
                let target = target.substitute_plain(&values)?;
                if v * v != target {
                    return Err(ScalarError::InconsistentRoot { symbol: rel.symbol.clone() });
                }
            }
        }
        self.substitute_plain(&values)
    }

    fn substitute_plain(&self, values: &[Option<Scalar>]) -> Result<Scalar, ScalarError> {
        if values.iter().all(Option::is_none) {
            return Ok(self.clone());
        }
        let mut cache: BTreeMap<(usize, i32), Scalar> = BTreeMap::new();
        let mut acc = Scalar::zero(&self.ring);
        for (m, c) in &self.terms {
            let mut kept = m.exponents().to_vec();
            let mut factor = Scalar::from_gauss(&self.ring, c.clone());
            for (idx, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if let Some(v) = &values[idx] {
                    kept[idx] = 0;
                    let p = match cache.get(&(idx, e)) {
                        Some(p) => p.clone(),
                        None => {
                            let p = v.pow_i(e)?;
                            cache.insert((idx, e), p.clone());
                            p
                        }
                    };
                    factor = &factor * &p;
                }
            }
            let mono = Scalar::from_terms(&self.ring, [(Monomial::new(kept), GaussRational::one())].into());
            acc = &acc + &(&factor * &mono);
        }
        Ok(acc)
    }

    /// Convenience wrapper around [`Scalar::substitute`] for a single symbol.
    pub fn substitute_one(&self, name: &str, value: &Scalar) -> Result<Scalar, ScalarError> {
        self.substitute(&[(name.to_string(), value.clone())].into())
    }

    /// Parses catalog scalar syntax over `ring`.
    pub fn parse(ring: &Arc<ParameterRing>, text: &str) -> Result<Scalar, ScalarError> {
        crate::catalog::parse_scalar(ring, text).map_err(|e| ScalarError::Parse(e.to_string()))
    }

    fn fmt_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (idx, &e) in m.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.ring.symbol_name(idx).to_string()),
                _ => parts.push(format!("{}^{}", self.ring.symbol_name(idx), e)),
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for Scalar {
    /// Canonical text: terms in decreasing graded-lex order, explicit `*`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (pos, (m, c)) in self.terms.iter().rev().enumerate() {
            let body = if m.is_one() {
                c.to_string()
            } else if c.is_one() {
                self.fmt_monomial(m)
            } else if (-c).is_one() {
                format!("-{}", self.fmt_monomial(m))
            } else {
                format!("{}*{}", c, self.fmt_monomial(m))
            };
            if pos == 0 {
                write!(f, "{body}")?;
            } else if let Some(rest) = body.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        /// Panics when the operands live over different rings; use the
        /// `try_*` methods for a fallible version.
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$inner(rhs).expect("scalar ring mismatch")
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$inner(&rhs).expect("scalar ring mismatch")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}
