//! Exhaustive search for algebra morphisms over a small prime field, used as an
//! independent check that the tabulated families miss nothing.
//!
//! Matrices are row-major residue vectors: entry `k*n + j` is the
//! `e_k`-coordinate of `α(e_j)`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::algebra::Algebra;
use crate::par::Execution;
use crate::scalars::{inv_mod, pow_mod, FieldSpec, ParameterRing, Scalar, ScalarError};

use super::{expand_branches, BranchError, MorphismFamily};

/// Dimension-3 rows whose completeness is a hard requirement.
pub const SPOT_ROWS: [&str; 6] = ["A2", "A4", "A8", "C3", "D1", "E1"];

const MAX_DIM: usize = 3;
const MAX_PRIME: u64 = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FpError {
    #[error("search space too large: dimension {dim} over F_{prime} (limits: dimension {MAX_DIM}, prime {MAX_PRIME})")]
    Oversized { dim: usize, prime: u64 },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Branch(#[from] BranchError),
}

fn check_size(n: usize, p: u64) -> Result<(), FpError> {
    if n > MAX_DIM || p > MAX_PRIME {
        return Err(FpError::Oversized { dim: n, prime: p });
    }
    Ok(())
}

fn structure_mod_p(alg: &Algebra, spec: &FieldSpec) -> Result<Vec<u64>, FpError> {
    let n = alg.dim();
    let mut d = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                d.push(alg.constant(i, j, k).eval_mod_p(spec)?);
            }
        }
    }
    Ok(d)
}

/// A basis pair together with the column index after which it can be checked.
struct PairCheck {
    i: usize,
    j: usize,
    ready: usize,
}

struct Search<'a> {
    n: usize,
    p: u64,
    d: &'a [u64],
    checks: Vec<Vec<PairCheck>>,
}

impl Search<'_> {
    fn pair_holds(&self, m: &[u64], pc: &PairCheck) -> bool {
        let (n, p, d) = (self.n, self.p, self.d);
        let dij = |a: usize, b: usize, k: usize| d[(a * n + b) * n + k];
        for k in 0..n {
            let mut lhs = 0;
            for t in 0..n {
                lhs += m[k * n + t] * dij(pc.i, pc.j, t);
            }
            let mut rhs = 0;
            for a in 0..n {
                let x = m[a * n + pc.i];
                if x == 0 {
                    continue;
                }
                for b in 0..n {
                    rhs += x * m[b * n + pc.j] % p * dij(a, b, k);
                }
            }
            if lhs % p != rhs % p {
                return false;
            }
        }
        true
    }

    /// Fills column `col` (rows 1..n) and recurses.
    fn fill(&self, m: &mut Vec<u64>, col: usize, out: &mut Vec<Vec<u64>>) {
        if col == self.n {
            out.push(m.clone());
            return;
        }
        let free = self.n - 1;
        let total = self.p.pow(free as u32);
        for code in 0..total {
            let mut c = code;
            for row in (1..self.n).rev() {
                m[row * self.n + col] = c % self.p;
                c /= self.p;
            }
            if self.checks[col].iter().all(|pc| self.pair_holds(m, pc)) {
                self.fill(m, col + 1, out);
            }
        }
    }
}

/// Every `n×n` matrix over `F_p` satisfying the `n²` morphism equations,
/// sorted lexicographically. Algebra parameters take their residues from `spec`.
pub fn enumerate_fp(alg: &Algebra, spec: &FieldSpec, exec: Execution) -> Result<Vec<Vec<u64>>, FpError> {
    spec.validate()?;
    let (n, p) = (alg.dim(), spec.prime);
    check_size(n, p)?;
    let d = structure_mod_p(alg, spec)?;
    let mut checks: Vec<Vec<PairCheck>> = (0..n).map(|_| Vec::new()).collect();
    for i in 0..n {
        for j in 0..n {
            let support = (0..n).filter(|&k| d[(i * n + j) * n + k] != 0).max().unwrap_or(0);
            let ready = i.max(j).max(support);
            checks[ready].push(PairCheck { i, j, ready });
        }
    }
    debug_assert!(checks.iter().flatten().all(|c| c.ready < n));
    let search = Search { n, p, d: &d, checks };
    let prefixes: Vec<u64> = (0..p.pow(n as u32)).collect();
    let parts = exec.map(&prefixes, |&code| {
        let mut m = vec![0u64; n * n];
        let mut c = code;
        for col in (0..n).rev() {
            m[col] = c % p;
            c /= p;
        }
        let mut out = Vec::new();
        search.fill(&mut m, 0, &mut out);
        out
    });
    let mut all: Vec<Vec<u64>> = parts.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}

/// A polynomial compiled to residues: `(coefficient, [(symbol, exponent)])` terms.
struct Compiled {
    terms: Vec<(u64, Vec<(usize, i32)>)>,
}

impl Compiled {
    fn new(s: &Scalar, spec: &FieldSpec) -> Result<Self, ScalarError> {
        let mut terms = Vec::new();
        for (m, c) in s.terms() {
            let coeff = spec.gauss_mod_p(c)?;
            let vars = m.exponents().iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, &e)| (i, e)).collect();
            terms.push((coeff, vars));
        }
        Ok(Compiled { terms })
    }

    /// `None` when a negative power hits a zero residue.
    fn eval(&self, vals: &[u64], p: u64) -> Option<u64> {
        let mut acc = 0;
        for (c, vars) in &self.terms {
            let mut v = *c;
            for &(idx, e) in vars {
                let base = if e < 0 { inv_mod(vals[idx], p)? } else { vals[idx] };
                v = v * pow_mod(base, e.unsigned_abs() as u64, p) % p;
            }
            acc = (acc + v) % p;
        }
        Some(acc)
    }
}

/// All residue matrices obtained from the family by choosing residues for the
/// free parameters of each branch, honouring the branch inequations and any
/// branch assignment of algebra parameters.
pub fn family_image_fp(alg: &Algebra, fam: &MorphismFamily, spec: &FieldSpec) -> Result<BTreeSet<Vec<u64>>, FpError> {
    spec.validate()?;
    let p = spec.prime;
    let ring: &ParameterRing = &fam.ring;
    check_size(fam.dim(), p)?;
    let alg_params: Vec<&String> = alg.ring().params().iter().collect();
    let mut out = BTreeSet::new();
    for branch in expand_branches(alg, fam)? {
        let m = branch.matrix(fam)?;
        let entries: Vec<Compiled> = m.entries().iter().map(|s| Compiled::new(s, spec)).collect::<Result<_, _>>()?;
        let ineqs: Vec<Compiled> = branch.inequations.iter().map(|s| Compiled::new(s, spec)).collect::<Result<_, _>>()?;
        // algebra parameters fixed by the branch must agree with the requested residues
        let mut pinned: Vec<(u64, Compiled)> = Vec::new();
        let mut vals = vec![0u64; ring.num_symbols()];
        let mut free: Vec<usize> = Vec::new();
        for idx in 0..ring.num_symbols() {
            let name = ring.symbol_name(idx);
            let is_alg = alg_params.iter().any(|a| a.as_str() == name);
            if is_alg {
                let r = *spec.assignment.get(name).ok_or_else(|| ScalarError::IncompleteAssignment(name.to_string()))?;
                vals[idx] = r % p;
                if let Some(v) = branch.substitution.get(name) {
                    pinned.push((r % p, Compiled::new(v, spec)?));
                }
            } else if branch.residual.iter().any(|s| s == name) {
                free.push(idx);
            }
        }
        let roots: Vec<(usize, Compiled)> = (0..ring.num_roots())
            .map(|pos| {
                let idx = ring.num_params() + pos;
                let sq = fam.ring.root_square(ring.symbol_name(idx)).expect("declared root");
                Ok((idx, Compiled::new(&sq, spec)?))
            })
            .collect::<Result<_, ScalarError>>()?;
        let total = p.pow(free.len() as u32);
        'points: for code in 0..total {
            let mut c = code;
            for &idx in free.iter().rev() {
                vals[idx] = c % p;
                c /= p;
            }
            for (idx, sq) in &roots {
                if !free.contains(idx) {
                    continue;
                }
                match sq.eval(&vals, p) {
                    Some(t) if vals[*idx] * vals[*idx] % p == t => {}
                    _ => continue 'points,
                }
            }
            for (r, v) in &pinned {
                if v.eval(&vals, p) != Some(*r) {
                    continue 'points;
                }
            }
            for q in &ineqs {
                match q.eval(&vals, p) {
                    Some(v) if v != 0 => {}
                    _ => continue 'points,
                }
            }
            let mut mat = Vec::with_capacity(entries.len());
            for e in &entries {
                match e.eval(&vals, p) {
                    Some(v) => mat.push(v),
                    None => continue 'points,
                }
            }
            out.insert(mat);
        }
    }
    Ok(out)
}

/// Whether `m` is reproduced by some branch of the family.
pub fn match_family_fp(m: &[u64], alg: &Algebra, fam: &MorphismFamily, spec: &FieldSpec) -> Result<bool, FpError> {
    Ok(family_image_fp(alg, fam, spec)?.contains(m))
}

/// Renders a matrix as one line of space-separated residues.
pub fn format_matrix(m: &[u64]) -> String {
    m.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Parses the output of [`format_matrix`].
pub fn decode_matrix(line: &str) -> Option<Vec<u64>> {
    line.split_whitespace().map(|t| t.parse().ok()).collect()
}

/// Two-sided comparison of the enumeration with the union of family images.
/// The zero map is always a morphism and is counted as matched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessReport {
    pub algebra: String,
    pub assignment: BTreeMap<String, u64>,
    pub morphisms: usize,
    pub matched: usize,
    /// Morphisms no family produces.
    pub unmatched: Vec<Vec<u64>>,
    /// Family points that are not morphisms over `F_p`.
    pub spurious: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompletenessOutcome {
    Pass,
    Fail(String),
    Skip(String),
}

impl CompletenessReport {
    pub fn agrees(&self) -> bool {
        self.unmatched.is_empty() && self.spurious.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} morphisms, {} matched, {} unmatched",
            self.morphisms,
            self.matched,
            self.unmatched.len()
        );
        if !self.spurious.is_empty() {
            s.push_str(&format!(", {} spurious", self.spurious.len()));
        }
        s
    }

    /// Hard rows fail on disagreement; other rows report it as a finding.
    pub fn outcome(&self, hard: bool) -> CompletenessOutcome {
        if self.agrees() {
            return CompletenessOutcome::Pass;
        }
        let mut detail = self.summary();
        if let Some(m) = self.unmatched.first() {
            detail.push_str(&format!("; first unmatched [{}]", format_matrix(m)));
        }
        if let Some(m) = self.spurious.first() {
            detail.push_str(&format!("; first spurious [{}]", format_matrix(m)));
        }
        if hard {
            CompletenessOutcome::Fail(detail)
        } else {
            CompletenessOutcome::Skip(format!("finding over F_p, not a hard failure: {detail}"))
        }
    }
}

pub fn completeness(
    alg: &Algebra,
    families: &[&MorphismFamily],
    spec: &FieldSpec,
    exec: Execution,
) -> Result<CompletenessReport, FpError> {
    let found = enumerate_fp(alg, spec, exec)?;
    let mut image: HashSet<Vec<u64>> = HashSet::new();
    image.insert(vec![0; alg.dim() * alg.dim()]);
    let images = exec.map(families, |f| family_image_fp(alg, f, spec));
    for img in images {
        image.extend(img?);
    }
    let found_set: HashSet<&Vec<u64>> = found.iter().collect();
    let unmatched: Vec<Vec<u64>> = found.iter().filter(|m| !image.contains(*m)).cloned().collect();
    let mut spurious: Vec<Vec<u64>> = image.iter().filter(|m| !found_set.contains(m)).cloned().collect();
    spurious.sort();
    Ok(CompletenessReport {
        algebra: alg.name.clone(),
        assignment: spec.assignment.clone(),
        morphisms: found.len(),
        matched: found.len() - unmatched.len(),
        unmatched,
        spurious,
    })
}
