//! Morphism families, their case splits, and the checks built on them.
//!
//! A [`MorphismFamily`] is a matrix over a ring that extends the algebra's
//! ring by the family's own parameters and square roots, together with
//! side constraints. [`expand_branches`] resolves the equations and
//! memberships into a list of [`Branch`]es, each a substitution that makes
//! every constraint hold identically.

mod finite;
mod observations;
mod verify;

pub use finite::{
    completeness, decode_matrix, enumerate_fp, family_image_fp, format_matrix, match_family_fp, CompletenessOutcome,
    CompletenessReport, FpError, SPOT_ROWS,
};
pub use observations::observation_suite;
pub use verify::{verify_branch, verify_family};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{Algebra, Element, EndoMatrix, Meta};
use crate::scalars::{ParameterRing, Scalar, ScalarError};

/// A side condition on family (or algebra) parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// `p = 0`.
    Equation(Scalar),
    /// `symbol ∈ {values}`; sign choices are the two-element case `{w, -w}`.
    Membership { symbol: String, values: Vec<Scalar> },
    /// `lhs ≠ rhs`. Never used for case splitting.
    Inequation { lhs: Scalar, rhs: Scalar },
}

impl Constraint {
    pub fn lift(&self, ring: &Arc<ParameterRing>) -> Result<Constraint, ScalarError> {
        Ok(match self {
            Constraint::Equation(p) => Constraint::Equation(p.lift(ring)?),
            Constraint::Membership { symbol, values } => Constraint::Membership {
                symbol: symbol.clone(),
                values: values.iter().map(|v| v.lift(ring)).collect::<Result<_, _>>()?,
            },
            Constraint::Inequation { lhs, rhs } => {
                Constraint::Inequation { lhs: lhs.lift(ring)?, rhs: rhs.lift(ring)? }
            }
        })
    }

    pub fn is_inequation(&self) -> bool {
        matches!(self, Constraint::Inequation { .. })
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Equation(p) => write!(f, "{p} = 0"),
            Constraint::Membership { symbol, values } => {
                let vals: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                write!(f, "{symbol} in {{{}}}", vals.join(", "))
            }
            Constraint::Inequation { lhs, rhs } => write!(f, "{lhs} = {rhs}"),
        }
    }
}

/// A parametrized matrix of algebra morphisms, as one block of a table row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismFamily {
    pub name: String,
    /// Name of the algebra the family lives on.
    pub algebra: String,
    /// Parameters declared by the family itself (the ring also holds the algebra's).
    pub params: Vec<String>,
    /// Algebra parameters, then `params`, then root symbols.
    pub ring: Arc<ParameterRing>,
    pub matrix: EndoMatrix,
    pub constraints: Vec<Constraint>,
    /// Expected twisted products `α(e_i e_j)`, row-major over `(i, j)`.
    pub expected: Option<Vec<Element>>,
    pub meta: Meta,
}

impl MorphismFamily {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Expected product `α(e_i e_j)` if the family carries a product table.
    pub fn expected_product(&self, i: usize, j: usize) -> Option<&Element> {
        self.expected.as_ref().map(|t| &t[i * self.dim() + j])
    }
}

/// One case of a family: a substitution satisfying every equation and membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    /// Values for the substituted symbols, over the family ring.
    pub substitution: BTreeMap<String, Scalar>,
    /// Symbols of the family ring left free (parameters and roots).
    pub residual: Vec<String>,
    /// Inequation differences `lhs − rhs` after substitution; each must stay nonzero.
    pub inequations: Vec<Scalar>,
}

impl Branch {
    pub fn matrix(&self, fam: &MorphismFamily) -> Result<EndoMatrix, ScalarError> {
        fam.matrix.substitute(&self.substitution)
    }

    /// The algebra re-expressed over the family ring with this branch's substitution applied.
    pub fn algebra(&self, alg: &Algebra, fam: &MorphismFamily) -> Result<Algebra, ScalarError> {
        alg.lift(&fam.ring)?.substitute(&self.substitution)
    }

    /// Short description such as `a1=0, b2=1`, or `generic`.
    pub fn label(&self) -> String {
        if self.substitution.is_empty() {
            return "generic".to_string();
        }
        let parts: Vec<String> = self.substitution.iter().map(|(k, v)| format!("{k}={v}")).collect();
        parts.join(", ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BranchError {
    #[error("unsupported constraint shape: {0}")]
    Unsupported(String),
    #[error("membership constraint names `{0}`, which is not a parameter of the family")]
    UnknownSymbol(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

enum Step {
    Satisfied,
    Infeasible,
    /// Alternatives, each a single assignment.
    Assign(Vec<(String, Scalar)>),
}

/// Decides how an equation `q = 0` splits, after the current substitution.
fn classify(q: &Scalar, prefer: Option<&str>) -> Option<Step> {
    if q.is_zero() {
        return Some(Step::Satisfied);
    }
    if q.constant_value().is_some() {
        return Some(Step::Infeasible);
    }
    let ring = q.ring();
    if let Some(step) = solve_linear(q, prefer) {
        return Some(step);
    }
    if q.num_terms() == 1 {
        let (m, _) = q.terms().next()?;
        let mut alts = Vec::new();
        for (idx, &e) in m.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            // a zero root or a zero Laurent variable is not a point of the variety
            if ring.is_root_index(idx) || e < 0 {
                return None;
            }
            alts.push((ring.symbol_name(idx).to_string(), Scalar::zero(ring)));
        }
        return Some(Step::Assign(alts));
    }
    None
}

/// Finds a parameter `x` occurring only as a bare linear term `c·x` and solves for it.
fn solve_linear(q: &Scalar, prefer: Option<&str>) -> Option<Step> {
    let ring = q.ring();
    let mut candidates: Vec<usize> = Vec::new();
    for idx in (0..ring.num_params()).rev() {
        let mut hits = q.terms().filter(|(m, _)| m.exponents()[idx] != 0);
        let Some((m, _)) = hits.next() else { continue };
        if hits.next().is_some() {
            continue;
        }
        let bare = m.exponents().iter().enumerate().all(|(k, &e)| if k == idx { e == 1 } else { e == 0 });
        if bare {
            candidates.push(idx);
        }
    }
    if q.num_terms() == 1 && candidates.is_empty() {
        return None;
    }
    let pick = prefer
        .and_then(|name| ring.symbol_index(name))
        .filter(|idx| candidates.contains(idx))
        .or_else(|| candidates.first().copied())?;
    let name = ring.symbol_name(pick).to_string();
    let x = Scalar::symbol(ring, &name).ok()?;
    let (_, c) = q.terms().find(|(m, _)| m.exponents()[pick] != 0)?;
    let c = c.clone();
    let rest = q.try_sub(&x.scale(&c)).ok()?;
    let value = (-rest).scale(&c.inverse()?);
    Some(Step::Assign(vec![(name, value)]))
}

fn extend_map(
    map: &BTreeMap<String, Scalar>,
    name: &str,
    value: &Scalar,
) -> Result<BTreeMap<String, Scalar>, ScalarError> {
    let single: BTreeMap<String, Scalar> = [(name.to_string(), value.clone())].into();
    let mut out = BTreeMap::new();
    for (k, v) in map {
        out.insert(k.clone(), v.substitute(&single)?);
    }
    out.insert(name.to_string(), value.clone());
    Ok(out)
}

/// What a pending constraint reduces to under the current substitution.
fn constraint_step(c: &Constraint, map: &BTreeMap<String, Scalar>) -> Result<Option<Step>, BranchError> {
    match c {
        Constraint::Equation(p) => Ok(classify(&p.substitute(map)?, None)),
        Constraint::Membership { symbol, values } => {
            let Some(first) = values.first() else { return Ok(Some(Step::Infeasible)) };
            let ring = first.ring();
            let x = Scalar::symbol(ring, symbol).map_err(|_| BranchError::UnknownSymbol(symbol.clone()))?;
            let x = x.substitute(map)?;
            let mut alts = Vec::new();
            let mut satisfied = false;
            for v in values {
                match classify(&x.try_sub(&v.substitute(map)?)?, Some(symbol)) {
                    Some(Step::Satisfied) => satisfied = true,
                    Some(Step::Infeasible) => {}
                    Some(Step::Assign(a)) => alts.extend(a),
                    None => return Ok(None),
                }
            }
            if satisfied {
                // one value already holds; the others would duplicate or contradict it
                return Ok(Some(Step::Satisfied));
            }
            if alts.is_empty() {
                Ok(Some(Step::Infeasible))
            } else {
                Ok(Some(Step::Assign(alts)))
            }
        }
        Constraint::Inequation { .. } => Ok(Some(Step::Satisfied)),
    }
}

fn expand_rec(
    pending: &[Constraint],
    map: BTreeMap<String, Scalar>,
    out: &mut Vec<BTreeMap<String, Scalar>>,
) -> Result<(), BranchError> {
    if pending.is_empty() {
        out.push(map);
        return Ok(());
    }
    for (k, c) in pending.iter().enumerate() {
        let Some(step) = constraint_step(c, &map)? else { continue };
        let rest: Vec<Constraint> =
            pending.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, c)| c.clone()).collect();
        match step {
            Step::Satisfied => expand_rec(&rest, map, out)?,
            Step::Infeasible => {}
            Step::Assign(alts) => {
                for (name, value) in alts {
                    expand_rec(&rest, extend_map(&map, &name, &value)?, out)?;
                }
            }
        }
        return Ok(());
    }
    Err(BranchError::Unsupported(pending[0].to_string()))
}

/// Resolves the family's equations and memberships (plus those inherited from
/// the algebra) into branches. Inequations are carried along, never split on.
pub fn expand_branches(alg: &Algebra, fam: &MorphismFamily) -> Result<Vec<Branch>, BranchError> {
    let mut constraints: Vec<Constraint> = Vec::new();
    for c in &alg.requires {
        constraints.push(c.lift(&fam.ring)?);
    }
    constraints.extend(fam.constraints.iter().cloned());
    let mut inequations: Vec<Scalar> = Vec::new();
    for (l, r) in &alg.inequations {
        inequations.push(l.lift(&fam.ring)?.try_sub(&r.lift(&fam.ring)?)?);
    }
    for c in &constraints {
        if let Constraint::Inequation { lhs, rhs } = c {
            inequations.push(lhs.try_sub(rhs)?);
        }
    }
    let splitting: Vec<Constraint> = constraints.into_iter().filter(|c| !c.is_inequation()).collect();
    let mut maps = Vec::new();
    expand_rec(&splitting, BTreeMap::new(), &mut maps)?;
    let ring = &fam.ring;
    let mut branches = Vec::with_capacity(maps.len());
    for map in maps {
        let residual = (0..ring.num_symbols())
            .map(|i| ring.symbol_name(i).to_string())
            .filter(|s| !map.contains_key(s))
            .collect();
        let ineqs = inequations.iter().map(|q| q.substitute(&map)).collect::<Result<_, _>>()?;
        branches.push(Branch { substitution: map, residual, inequations: ineqs });
    }
    Ok(branches)
}

/// Whether a point (symbol ↦ value) satisfies every non-inequation constraint.
/// The point must assign every symbol the constraints mention.
pub fn satisfies(constraints: &[Constraint], point: &BTreeMap<String, Scalar>) -> Result<bool, ScalarError> {
    for c in constraints {
        match c {
            Constraint::Equation(p) => {
                if !p.substitute(point)?.is_zero() {
                    return Ok(false);
                }
            }
            Constraint::Membership { symbol, values } => {
                let Some(x) = point.get(symbol) else { return Ok(false) };
                let mut hit = false;
                for v in values {
                    if &v.substitute(point)?.lift(x.ring())? == x {
                        hit = true;
                        break;
                    }
                }
                if !hit {
                    return Ok(false);
                }
            }
            Constraint::Inequation { .. } => {}
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(ring: &Arc<ParameterRing>, params: &[&str], constraints: Vec<Constraint>) -> MorphismFamily {
        MorphismFamily {
            name: "f".into(),
            algebra: "A".into(),
            params: params.iter().map(|s| s.to_string()).collect(),
            ring: ring.clone(),
            matrix: EndoMatrix::identity(ring, 2),
            constraints,
            expected: None,
            meta: Meta::default(),
        }
    }

    fn sym(ring: &Arc<ParameterRing>, s: &str) -> Scalar {
        Scalar::symbol(ring, s).unwrap()
    }

    #[test]
    fn product_zero_gives_two_branches() {
        let ring = ParameterRing::new(&["b1", "b2"]).unwrap();
        let alg = Algebra::zero("A", 2, &ParameterRing::empty());
        let fam = family(&ring, &["b1", "b2"], vec![Constraint::Equation(sym(&ring, "b1") * sym(&ring, "b2"))]);
        let br = expand_branches(&alg, &fam).unwrap();
        assert_eq!(br.len(), 2);
        assert_eq!(br[0].label(), "b1=0");
        assert_eq!(br[1].label(), "b2=0");
        assert_eq!(br[0].residual, vec!["b2".to_string()]);
    }

    #[test]
    fn n1_style_constraints_give_nine_branches() {
        let ring = ParameterRing::new(&["a1", "a2", "b1", "b2"]).unwrap();
        let alg = Algebra::zero("A", 2, &ParameterRing::empty());
        let zero_one = |s: &str| Constraint::Membership {
            symbol: s.into(),
            values: vec![Scalar::zero(&ring), Scalar::one(&ring)],
        };
        let fam = family(
            &ring,
            &["a1", "a2", "b1", "b2"],
            vec![
                zero_one("a1"),
                zero_one("a2"),
                zero_one("b1"),
                zero_one("b2"),
                Constraint::Equation(sym(&ring, "a1") * sym(&ring, "b1")),
                Constraint::Equation(sym(&ring, "a2") * sym(&ring, "b2")),
            ],
        );
        assert_eq!(expand_branches(&alg, &fam).unwrap().len(), 9);
    }

    #[test]
    fn sign_choice_over_a_root() {
        let base = ParameterRing::new(&["lambda", "b"]).unwrap();
        let lambda = Scalar::symbol(&base, "lambda").unwrap();
        let ring = base.extend::<&str>(&[], &[("s".into(), lambda)]).unwrap();
        let s = sym(&ring, "s");
        let alg = Algebra::zero("A", 2, &ParameterRing::new(&["lambda"]).unwrap());
        let fam = family(&ring, &["b"], vec![Constraint::Membership { symbol: "b".into(), values: vec![s.clone(), -&s] }]);
        let br = expand_branches(&alg, &fam).unwrap();
        assert_eq!(br.len(), 2);
        assert_eq!(br[1].substitution["b"], -&s);
        let sq = &br[1].substitution["b"] * &br[1].substitution["b"];
        assert_eq!(sq, sym(&ring, "lambda"));
    }

    #[test]
    fn linear_equation_solves_for_later_symbol() {
        let ring = ParameterRing::new(&["lambda", "eta"]).unwrap();
        let alg = Algebra::zero("A", 2, &ring);
        let fam = family(&ring, &[], vec![Constraint::Equation(sym(&ring, "eta") - sym(&ring, "lambda"))]);
        let br = expand_branches(&alg, &fam).unwrap();
        assert_eq!(br.len(), 1);
        assert_eq!(br[0].label(), "eta=lambda");
    }

    #[test]
    fn unsupported_shape_is_named() {
        let ring = ParameterRing::new(&["a"]).unwrap();
        let alg = Algebra::zero("A", 2, &ParameterRing::empty());
        let a = sym(&ring, "a");
        let eq = &a * &a - Scalar::one(&ring);
        let fam = family(&ring, &["a"], vec![Constraint::Equation(eq)]);
        let err = expand_branches(&alg, &fam).unwrap_err();
        assert_eq!(err.to_string(), "unsupported constraint shape: a^2 - 1 = 0");
    }

    #[test]
    fn inequations_do_not_split() {
        let ring = ParameterRing::new(&["a"]).unwrap();
        let alg = Algebra::zero("A", 2, &ParameterRing::empty());
        let fam = family(
            &ring,
            &["a"],
            vec![Constraint::Inequation { lhs: sym(&ring, "a"), rhs: Scalar::zero(&ring) }],
        );
        let br = expand_branches(&alg, &fam).unwrap();
        assert_eq!(br.len(), 1);
        assert_eq!(br[0].inequations, vec![sym(&ring, "a")]);
    }
}
