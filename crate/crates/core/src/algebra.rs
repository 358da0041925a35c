//! Finite-dimensional algebras given by structure constants.
//!
//! Basis vectors are `e1..en` in text and `0..n` in code. An [`Algebra`]
//! stores `d[i][j][k]`, the coefficient of `e_k` in `e_i e_j`. An
//! [`EndoMatrix`] stores `a[k][j]`, the coefficient of `e_k` in `α(e_j)`, so
//! column `j` holds the image of `e_j`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::morphisms::Constraint;
use crate::scalars::{ParameterRing, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Provenance and annotations attached to catalog entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Meta {
    /// Source row label, e.g. `Table 1, N6`.
    pub label: Option<String>,
    /// Free-form notes kept verbatim (order relations, transcription remarks).
    pub notes: Vec<String>,
    /// When set, verification reports this entry as SKIP with the given reason.
    pub skip: Option<String>,
}

/// A vector in the fixed basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub coords: Vec<Scalar>,
}

impl Element {
    pub fn zero(ring: &Arc<ParameterRing>, dim: usize) -> Self {
        Element { coords: vec![Scalar::zero(ring); dim] }
    }

    pub fn basis(ring: &Arc<ParameterRing>, dim: usize, idx: usize) -> Self {
        let mut e = Self::zero(ring, dim);
        e.coords[idx] = Scalar::one(ring);
        e
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    fn check(&self, other: &Element) -> Result<(), AlgebraError> {
        if self.dim() != other.dim() {
            return Err(AlgebraError::Dimension { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.check(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_, _>>()?;
        Ok(Element { coords })
    }

    pub fn try_sub(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.check(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<_, _>>()?;
        Ok(Element { coords })
    }

    pub fn scale(&self, c: &Scalar) -> Result<Element, AlgebraError> {
        let coords = self.coords.iter().map(|a| c.try_mul(a)).collect::<Result<_, _>>()?;
        Ok(Element { coords })
    }

    pub fn neg(&self) -> Element {
        Element { coords: self.coords.iter().map(|c| -c).collect() }
    }

    pub fn lift(&self, ring: &Arc<ParameterRing>) -> Result<Element, ScalarError> {
        let coords = self.coords.iter().map(|c| c.lift(ring)).collect::<Result<_, _>>()?;
        Ok(Element { coords })
    }

    pub fn substitute(
        &self,
        assignment: &std::collections::BTreeMap<String, Scalar>,
    ) -> Result<Element, ScalarError> {
        let coords = self.coords.iter().map(|c| c.substitute(assignment)).collect::<Result<_, _>>()?;
        Ok(Element { coords })
    }
}

impl fmt::Display for Element {
    /// Linear-expression text such as `a*e1 + (1 + b)*e2`, or `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let basis = format!("e{}", k + 1);
            let term = if c.is_one() {
                basis
            } else if (-c).is_one() {
                format!("-{basis}")
            } else if c.num_terms() == 1 {
                format!("{c}*{basis}")
            } else {
                format!("({c})*{basis}")
            };
            if first {
                write!(f, "{term}")?;
                first = false;
            } else if let Some(rest) = term.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {term}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A linear self-map in the fixed basis; entry `(k, j)` is the `e_k`-coordinate of `α(e_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoMatrix {
    dim: usize,
    entries: Vec<Scalar>,
}

impl EndoMatrix {
    pub fn zero(ring: &Arc<ParameterRing>, dim: usize) -> Self {
        EndoMatrix { dim, entries: vec![Scalar::zero(ring); dim * dim] }
    }

    pub fn identity(ring: &Arc<ParameterRing>, dim: usize) -> Self {
        let mut m = Self::zero(ring, dim);
        for i in 0..dim {
            m.set(i, i, Scalar::one(ring));
        }
        m
    }

    /// Builds from rows: `rows[k][j]` is the `e_k`-coordinate of `α(e_j)`.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, AlgebraError> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(AlgebraError::Dimension { expected: dim, found: row.len() });
            }
            entries.extend(row);
        }
        Ok(EndoMatrix { dim, entries })
    }

    /// Builds from images: `cols[j]` is `α(e_j)`.
    pub fn from_columns(cols: &[Element]) -> Result<Self, AlgebraError> {
        let dim = cols.len();
        let ring = cols
            .first()
            .and_then(|c| c.coords.first())
            .map(|s| s.ring().clone())
            .unwrap_or_else(ParameterRing::empty);
        let mut m = Self::zero(&ring, dim);
        for (j, col) in cols.iter().enumerate() {
            if col.dim() != dim {
                return Err(AlgebraError::Dimension { expected: dim, found: col.dim() });
            }
            for k in 0..dim {
                m.set(k, j, col.coords[k].clone());
            }
        }
        Ok(m)
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: Vec<Scalar>) -> Self {
        let dim = entries.len();
        let ring = entries.first().map(|s| s.ring().clone()).unwrap_or_else(ParameterRing::empty);
        let mut m = Self::zero(&ring, dim);
        for (i, s) in entries.into_iter().enumerate() {
            m.set(i, i, s);
        }
        m
    }

    /// Integer matrix over `ring`, given row by row.
    pub fn from_ints(ring: &Arc<ParameterRing>, rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| Scalar::from_int(ring, v)).collect())
            .collect();
        Self::from_rows(rows).expect("square integer matrix")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Scalar) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn ring(&self) -> Arc<ParameterRing> {
        self.entries.first().map(|s| s.ring().clone()).unwrap_or_else(ParameterRing::empty)
    }

    /// `α(e_j)`.
    pub fn column(&self, j: usize) -> Element {
        Element { coords: (0..self.dim).map(|k| self.get(k, j).clone()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    fn check_dim(&self, n: usize) -> Result<(), AlgebraError> {
        if self.dim != n {
            return Err(AlgebraError::Dimension { expected: n, found: self.dim });
        }
        Ok(())
    }

    pub fn apply(&self, x: &Element) -> Result<Element, AlgebraError> {
        self.check_dim(x.dim())?;
        let ring = self.ring();
        let mut coords = Vec::with_capacity(self.dim);
        for k in 0..self.dim {
            let mut acc = Scalar::zero(&ring);
            for (j, xj) in x.coords.iter().enumerate() {
                if xj.is_zero() || self.get(k, j).is_zero() {
                    continue;
                }
                acc = acc.try_add(&self.get(k, j).try_mul(xj)?)?;
            }
            coords.push(acc);
        }
        Ok(Element { coords })
    }

    /// Matrix product `self · other`, i.e. the map `x ↦ self(other(x))`.
    pub fn compose(&self, other: &EndoMatrix) -> Result<EndoMatrix, AlgebraError> {
        other.check_dim(self.dim)?;
        let n = self.dim;
        let ring = self.ring();
        let mut out = EndoMatrix::zero(&ring, n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = Scalar::zero(&ring);
                for m in 0..n {
                    if self.get(r, m).is_zero() || other.get(m, c).is_zero() {
                        continue;
                    }
                    acc = acc.try_add(&self.get(r, m).try_mul(other.get(m, c))?)?;
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<EndoMatrix, AlgebraError> {
        let mut acc = EndoMatrix::identity(&self.ring(), self.dim);
        for _ in 0..e {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    pub fn try_add(&self, other: &EndoMatrix) -> Result<EndoMatrix, AlgebraError> {
        other.check_dim(self.dim)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_, _>>()?;
        Ok(EndoMatrix { dim: self.dim, entries })
    }

    pub fn try_sub(&self, other: &EndoMatrix) -> Result<EndoMatrix, AlgebraError> {
        other.check_dim(self.dim)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<_, _>>()?;
        Ok(EndoMatrix { dim: self.dim, entries })
    }

    pub fn scale(&self, c: &Scalar) -> Result<EndoMatrix, AlgebraError> {
        let entries = self.entries.iter().map(|a| c.try_mul(a)).collect::<Result<_, _>>()?;
        Ok(EndoMatrix { dim: self.dim, entries })
    }

    pub fn map_equal(&self, other: &EndoMatrix) -> Result<bool, AlgebraError> {
        other.check_dim(self.dim)?;
        Ok(self.entries == other.entries)
    }

    /// Determinant by cofactor expansion (dimensions here are tiny).
    pub fn determinant(&self) -> Result<Scalar, AlgebraError> {
        let idx: Vec<usize> = (0..self.dim).collect();
        self.minor_det(&idx, &idx)
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> Result<Scalar, AlgebraError> {
        let ring = self.ring();
        match rows.len() {
            0 => Ok(Scalar::one(&ring)),
            1 => Ok(self.get(rows[0], cols[0]).clone()),
            _ => {
                let mut acc = Scalar::zero(&ring);
                for (pos, &c) in cols.iter().enumerate() {
                    let entry = self.get(rows[0], c);
                    if entry.is_zero() {
                        continue;
                    }
                    let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = entry.try_mul(&self.minor_det(&rows[1..], &sub_cols)?)?;
                    acc = if pos % 2 == 0 { acc.try_add(&term)? } else { acc.try_sub(&term)? };
                }
                Ok(acc)
            }
        }
    }

    pub fn lift(&self, ring: &Arc<ParameterRing>) -> Result<EndoMatrix, ScalarError> {
        let entries = self.entries.iter().map(|c| c.lift(ring)).collect::<Result<_, _>>()?;
        Ok(EndoMatrix { dim: self.dim, entries })
    }

    pub fn substitute(
        &self,
        assignment: &std::collections::BTreeMap<String, Scalar>,
    ) -> Result<EndoMatrix, ScalarError> {
        let entries = self.entries.iter().map(|c| c.substitute(assignment)).collect::<Result<_, _>>()?;
        Ok(EndoMatrix { dim: self.dim, entries })
    }
}

impl fmt::Display for EndoMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.dim {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.dim {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

/// An `n`-dimensional algebra with structure constants over a parameter ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    pub name: String,
    dim: usize,
    ring: Arc<ParameterRing>,
    table: Vec<Scalar>,
    /// `lhs ≠ rhs` side conditions. Recorded only; identity checks never read them.
    pub inequations: Vec<(Scalar, Scalar)>,
    /// Constraints every morphism family of this algebra inherits.
    pub requires: Vec<Constraint>,
    pub meta: Meta,
}

impl Algebra {
    /// The zero product on `dim` basis vectors.
    pub fn zero(name: &str, dim: usize, ring: &Arc<ParameterRing>) -> Self {
        Algebra {
            name: name.to_string(),
            dim,
            ring: ring.clone(),
            table: vec![Scalar::zero(ring); dim * dim * dim],
            inequations: Vec::new(),
            requires: Vec::new(),
            meta: Meta::default(),
        }
    }

    /// Builds an algebra from the products `e_i e_j` (indices from 0); unspecified products are 0.
    pub fn from_products(
        name: &str,
        ring: &Arc<ParameterRing>,
        dim: usize,
        products: &[((usize, usize), Element)],
    ) -> Result<Self, AlgebraError> {
        let mut a = Self::zero(name, dim, ring);
        for ((i, j), v) in products {
            a.set_product(*i, *j, v)?;
        }
        Ok(a)
    }

    /// Integer structure constants: `(i, j, k, c)` means `e_i e_j` has `c·e_k` (0-based).
    pub fn from_int_constants(name: &str, dim: usize, constants: &[(usize, usize, usize, i64)]) -> Self {
        let ring = ParameterRing::empty();
        let mut a = Self::zero(name, dim, &ring);
        for &(i, j, k, c) in constants {
            let cur = a.constant(i, j, k).clone();
            a.set_constant(i, j, k, cur + Scalar::from_int(&ring, c));
        }
        a
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ring(&self) -> &Arc<ParameterRing> {
        &self.ring
    }

    /// Coefficient of `e_k` in `e_i e_j`.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.table[(i * self.dim + j) * self.dim + k]
    }

    pub fn set_constant(&mut self, i: usize, j: usize, k: usize, value: Scalar) {
        let n = self.dim;
        self.table[(i * n + j) * n + k] = value;
    }

    /// `e_i e_j` as an element.
    pub fn product(&self, i: usize, j: usize) -> Element {
        Element { coords: (0..self.dim).map(|k| self.constant(i, j, k).clone()).collect() }
    }

    pub fn set_product(&mut self, i: usize, j: usize, v: &Element) -> Result<(), AlgebraError> {
        if v.dim() != self.dim {
            return Err(AlgebraError::Dimension { expected: self.dim, found: v.dim() });
        }
        for k in 0..self.dim {
            self.set_constant(i, j, k, v.coords[k].clone());
        }
        Ok(())
    }

    pub fn basis(&self, i: usize) -> Element {
        Element::basis(&self.ring, self.dim, i)
    }

    pub fn zero_element(&self) -> Element {
        Element::zero(&self.ring, self.dim)
    }

    pub fn is_zero_product(&self) -> bool {
        self.table.iter().all(Scalar::is_zero)
    }

    fn check_dim(&self, n: usize) -> Result<(), AlgebraError> {
        if n != self.dim {
            return Err(AlgebraError::Dimension { expected: self.dim, found: n });
        }
        Ok(())
    }

    /// Bilinear product of two elements.
    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element, AlgebraError> {
        self.check_dim(x.dim())?;
        self.check_dim(y.dim())?;
        let n = self.dim;
        let mut out: Vec<Scalar> = vec![Scalar::zero(&self.ring); n];
        for (i, xi) in x.coords.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.coords.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let mut coeff: Option<Scalar> = None;
                for (k, slot) in out.iter_mut().enumerate() {
                    let d = self.constant(i, j, k);
                    if d.is_zero() {
                        continue;
                    }
                    let c = coeff.get_or_insert_with(|| xi * yj);
                    *slot = slot.try_add(&d.try_mul(c)?)?;
                }
            }
        }
        Ok(Element { coords: out })
    }

    /// `(xy)z − x(yz)`.
    pub fn associator(&self, x: &Element, y: &Element, z: &Element) -> Result<Element, AlgebraError> {
        let left = self.multiply(&self.multiply(x, y)?, z)?;
        let right = self.multiply(x, &self.multiply(y, z)?)?;
        left.try_sub(&right)
    }

    /// The algebra with product `[x, y] = xy − yx`.
    pub fn commutator_bracket(&self) -> Algebra {
        let mut out = Algebra::zero(&format!("{}.bracket", self.name), self.dim, &self.ring);
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.set_constant(i, j, k, self.constant(i, j, k) - self.constant(j, i, k));
                }
            }
        }
        out
    }

    /// Re-expresses the structure constants over a larger ring.
    pub fn lift(&self, ring: &Arc<ParameterRing>) -> Result<Algebra, ScalarError> {
        let table = self.table.iter().map(|c| c.lift(ring)).collect::<Result<_, _>>()?;
        let inequations = self
            .inequations
            .iter()
            .map(|(l, r)| Ok((l.lift(ring)?, r.lift(ring)?)))
            .collect::<Result<_, ScalarError>>()?;
        let requires = self.requires.iter().map(|c| c.lift(ring)).collect::<Result<_, _>>()?;
        Ok(Algebra {
            name: self.name.clone(),
            dim: self.dim,
            ring: ring.clone(),
            table,
            inequations,
            requires,
            meta: self.meta.clone(),
        })
    }

    pub fn substitute(
        &self,
        assignment: &std::collections::BTreeMap<String, Scalar>,
    ) -> Result<Algebra, ScalarError> {
        let mut out = self.clone();
        out.table = self.table.iter().map(|c| c.substitute(assignment)).collect::<Result<_, _>>()?;
        Ok(out)
    }

    /// Same structure constants under a different name.
    pub fn renamed(&self, name: &str) -> Algebra {
        let mut out = self.clone();
        out.name = name.to_string();
        out
    }
}
