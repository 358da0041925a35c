use std::sync::Arc;

use super::scalar::{Monomial, Scalar, Terms};
use super::ScalarError;

/// A declared square root: `symbol² = square`, where `square` involves parameters only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootRelation {
    pub symbol: String,
    pub(crate) square: Terms,
}

/// Named parameters (Laurent variables) plus adjoined square-root symbols.
///
/// Symbols are indexed parameters first, then roots, in declaration order;
/// that order also drives canonical printing.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ParameterRing {
    params: Vec<String>,
    roots: Vec<RootRelation>,
}

pub(crate) fn is_reserved(name: &str) -> bool {
    name == "i"
        || (name.len() > 1 && name.starts_with('e') && name[1..].bytes().all(|b| b.is_ascii_digit()))
}

fn validate_name(name: &str, seen: &mut Vec<String>) -> Result<(), ScalarError> {
    let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !valid {
        return Err(ScalarError::InvalidRing(format!("`{name}` is not a valid symbol name")));
    }
    if is_reserved(name) {
        return Err(ScalarError::InvalidRing(format!("`{name}` is reserved")));
    }
    if seen.iter().any(|s| s == name) {
        return Err(ScalarError::InvalidRing(format!("symbol `{name}` declared twice")));
    }
    seen.push(name.to_string());
    Ok(())
}

impl ParameterRing {
    /// The ring with no parameters: plain Gaussian rationals.
    pub fn empty() -> Arc<Self> {
        Arc::new(ParameterRing::default())
    }

    pub fn new<S: AsRef<str>>(params: &[S]) -> Result<Arc<Self>, ScalarError> {
        Self::with_roots(params, &[])
    }

    /// Builds a ring with root relations. Each relation target must live over a
    /// root-free ring whose parameters are all among `params`.
    pub fn with_roots<S: AsRef<str>>(
        params: &[S],
        roots: &[(String, Scalar)],
    ) -> Result<Arc<Self>, ScalarError> {
        let mut seen = Vec::new();
        for p in params {
            validate_name(p.as_ref(), &mut seen)?;
        }
        for (name, _) in roots {
            validate_name(name, &mut seen)?;
        }
        let params: Vec<String> = params.iter().map(|p| p.as_ref().to_string()).collect();
        let width = params.len() + roots.len();
        let mut relations = Vec::with_capacity(roots.len());
        for (name, target) in roots {
            if target.ring().num_roots() > 0 {
                return Err(ScalarError::InvalidRing(format!(
                    "relation target for `{name}` must not mention root symbols"
                )));
            }
            let mut square = Terms::new();
            for (mono, coeff) in target.terms() {
                let mut exps = vec![0i32; width];
                for (idx, &e) in mono.exponents().iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let sym = &target.ring().params[idx];
                    let pos = params.iter().position(|p| p == sym).ok_or_else(|| {
                        ScalarError::InvalidRing(format!(
                            "relation target for `{name}` mentions undeclared parameter `{sym}`"
                        ))
                    })?;
                    exps[pos] = e;
                }
                square.insert(Monomial::new(exps), coeff.clone());
            }
            relations.push(RootRelation { symbol: name.clone(), square });
        }
        Ok(Arc::new(ParameterRing { params, roots: relations }))
    }

    /// A ring with the parameters and roots of `self` followed by new ones.
    /// Root targets in `roots` may mention any parameter of the combined ring.
    pub fn extend<S: AsRef<str>>(
        &self,
        params: &[S],
        roots: &[(String, Scalar)],
    ) -> Result<Arc<Self>, ScalarError> {
        let mut all_params: Vec<String> = self.params.clone();
        all_params.extend(params.iter().map(|p| p.as_ref().to_string()));
        let base = ParameterRing::new(&all_params)?;
        let mut all_roots = Vec::new();
        for rel in &self.roots {
            all_roots.push((rel.symbol.clone(), self.relation_target(rel).lift(&base)?));
        }
        for (name, target) in roots {
            all_roots.push((name.clone(), target.lift(&base)?));
        }
        Self::with_roots(&all_params, &all_roots)
    }

    /// The params-only ring underlying this one.
    pub fn params_ring(&self) -> Arc<Self> {
        Arc::new(ParameterRing { params: self.params.clone(), roots: Vec::new() })
    }

    fn relation_target(&self, rel: &RootRelation) -> Scalar {
        let base = self.params_ring();
        let np = self.params.len();
        let terms = rel
            .square
            .iter()
            .map(|(m, c)| (Monomial::new(m.exponents()[..np].to_vec()), c.clone()))
            .collect();
        Scalar::from_terms(&base, terms)
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn roots(&self) -> &[RootRelation] {
        &self.roots
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.params.len() + self.roots.len()
    }

    /// Name of symbol `idx` (parameters first, then roots).
    pub fn symbol_name(&self, idx: usize) -> &str {
        if idx < self.params.len() {
            &self.params[idx]
        } else {
            &self.roots[idx - self.params.len()].symbol
        }
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.params
            .iter()
            .position(|p| p == name)
            .or_else(|| self.roots.iter().position(|r| r.symbol == name).map(|i| i + self.params.len()))
    }

    pub fn is_root_index(&self, idx: usize) -> bool {
        idx >= self.params.len()
    }

    /// The relation target of root `name`, as a scalar of this ring.
    pub fn root_square(self: &Arc<Self>, name: &str) -> Option<Scalar> {
        let rel = self.roots.iter().find(|r| r.symbol == name)?;
        Some(Scalar::from_terms(self, rel.square.clone()))
    }

    pub(crate) fn relation(&self, root_pos: usize) -> &RootRelation {
        &self.roots[root_pos]
    }

    pub(crate) fn same_as(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}
