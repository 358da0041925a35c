use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{GaussRational, Rational, Scalar, ScalarError};

/// Target of the evaluation homomorphism into `F_prime`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub prime: u64,
    /// Residue standing in for `i`; only consulted when a coefficient is non-real.
    pub i_residue: Option<u64>,
    /// Residues for parameters and root symbols.
    pub assignment: BTreeMap<String, u64>,
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime; `None` for zero.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    (a != 0).then(|| pow_mod(a, p - 2, p))
}

fn is_odd_prime(p: u64) -> bool {
    p >= 3 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn int_mod(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().unwrap_or(0)
}

pub fn rational_mod_p(r: &Rational, p: u64) -> Result<u64, ScalarError> {
    let num = int_mod(r.numer(), p);
    let den = int_mod(r.denom(), p);
    let inv = inv_mod(den, p).ok_or(ScalarError::Characteristic { prime: p })?;
    Ok(num * inv % p)
}

impl FieldSpec {
    pub fn new(prime: u64) -> Self {
        FieldSpec { prime, i_residue: None, assignment: BTreeMap::new() }
    }

    pub fn with_i(mut self, residue: u64) -> Self {
        self.i_residue = Some(residue);
        self
    }

    pub fn assign(mut self, symbol: &str, residue: u64) -> Self {
        self.assignment.insert(symbol.to_string(), residue % self.prime.max(1));
        self
    }

    pub fn validate(&self) -> Result<(), ScalarError> {
        if !is_odd_prime(self.prime) {
            return Err(ScalarError::InvalidPrime(self.prime));
        }
        if let Some(r) = self.i_residue {
            if (r * r + 1) % self.prime != 0 {
                return Err(ScalarError::InvalidI { residue: r, prime: self.prime });
            }
        }
        Ok(())
    }

    pub fn gauss_mod_p(&self, c: &GaussRational) -> Result<u64, ScalarError> {
        let p = self.prime;
        let re = rational_mod_p(&c.re, p)?;
        if c.im.is_zero() {
            return Ok(re);
        }
        let i = self.i_residue.ok_or(ScalarError::MissingI { prime: p })?;
        let im = rational_mod_p(&c.im, p)?;
        Ok((re + im * i) % p)
    }
}

impl Scalar {
    /// Image of this scalar under the evaluation homomorphism described by `spec`.
    pub fn eval_mod_p(&self, spec: &FieldSpec) -> Result<u64, ScalarError> {
        spec.validate()?;
        let p = spec.prime;
        let ring = self.ring();
        let residues: Vec<Option<u64>> = (0..ring.num_symbols())
            .map(|idx| spec.assignment.get(ring.symbol_name(idx)).map(|r| r % p))
            .collect();
        // Root residues must square to their relation targets.
        for (pos, rel) in ring.roots().iter().enumerate() {
            let idx = ring.num_params() + pos;
            if let Some(sigma) = residues[idx] {
                let target = ring.root_square(&rel.symbol).expect("declared root");
                let t = eval_terms(&target, spec, &residues)?;
                if sigma * sigma % p != t {
                    return Err(ScalarError::InvalidRootResidue { symbol: rel.symbol.clone() });
                }
            }
        }
        eval_terms(self, spec, &residues)
    }
}

fn eval_terms(s: &Scalar, spec: &FieldSpec, residues: &[Option<u64>]) -> Result<u64, ScalarError> {
    let p = spec.prime;
    let ring = s.ring();
    let mut acc = 0u64;
    for (m, c) in s.terms() {
        let mut v = spec.gauss_mod_p(c)?;
        for (idx, &e) in m.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let r = residues[idx]
                .ok_or_else(|| ScalarError::IncompleteAssignment(ring.symbol_name(idx).to_string()))?;
            let base = if e < 0 {
                inv_mod(r, p).ok_or_else(|| ScalarError::NotInvertible(ring.symbol_name(idx).to_string()))?
            } else {
                r
            };
            v = v * pow_mod(base, e.unsigned_abs() as u64, p) % p;
        }
        acc = (acc + v) % p;
    }
    Ok(acc)
}
