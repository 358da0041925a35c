use std::fmt::Write;
use std::sync::Arc;

use crate::algebra::{Algebra, Element, Meta};
use crate::morphisms::{Constraint, MorphismFamily};
use crate::scalars::{ParameterRing, Scalar};

use super::CatalogDocument;

/// Canonical text for a document: each algebra followed by its families.
///
/// Parsing the output and rendering again gives the same bytes.
pub fn render_catalog(doc: &CatalogDocument) -> String {
    let mut blocks = Vec::new();
    for a in &doc.algebras {
        blocks.push(render_algebra(a));
        for f in doc.families_of(&a.name) {
            blocks.push(render_family(f, a));
        }
    }
    let mut out = blocks.join("\n");
    if out.is_empty() {
        return out;
    }
    if !out.ends_with('\n') {
        out.push('\n');
    }
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn list<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn options(
    out: &mut String,
    params: &[String],
    ring: &Arc<ParameterRing>,
    skip_roots: usize,
    require: &[&Constraint],
    forbid: &[(&Scalar, &Scalar)],
    meta: &Meta,
) {
    if !params.is_empty() {
        let _ = write!(out, " params=({})", params.join(", "));
    }
    let roots: Vec<String> = ring.roots()[skip_roots..]
        .iter()
        .map(|r| {
            let sq = ring.root_square(&r.symbol).expect("declared root");
            format!("{}^2 = {}", r.symbol, sq)
        })
        .collect();
    if !roots.is_empty() {
        let _ = write!(out, " roots=({})", roots.join(", "));
    }
    if !require.is_empty() {
        let _ = write!(
            out,
            " require=({})",
            list(require, |c| match c {
                Constraint::Equation(p) => format!("{p} = 0"),
                other => other.to_string(),
            })
        );
    }
    if !forbid.is_empty() {
        let _ = write!(out, " forbid=({})", list(forbid, |(l, r)| format!("{l} = {r}")));
    }
    if let Some(l) = &meta.label {
        let _ = write!(out, " label={}", quote(l));
    }
    for n in &meta.notes {
        let _ = write!(out, " note={}", quote(n));
    }
    if let Some(s) = &meta.skip {
        let _ = write!(out, " skip={}", quote(s));
    }
}

fn products(out: &mut String, dim: usize, get: impl Fn(usize, usize) -> Element) {
    for i in 0..dim {
        for j in 0..dim {
            let v = get(i, j);
            if !v.is_zero() {
                let _ = writeln!(out, "  e{}*e{} = {};", i + 1, j + 1, v);
            }
        }
    }
}

fn render_algebra(a: &Algebra) -> String {
    let mut out = format!("algebra {} dim={}", a.name, a.dim());
    let require: Vec<&Constraint> = a.requires.iter().collect();
    let forbid: Vec<(&Scalar, &Scalar)> = a.inequations.iter().map(|(l, r)| (l, r)).collect();
    options(&mut out, a.ring().params(), a.ring(), 0, &require, &forbid, &a.meta);
    out.push_str(" {\n");
    products(&mut out, a.dim(), |i, j| a.product(i, j));
    out.push_str("}\n");
    out
}

fn render_family(f: &MorphismFamily, a: &Algebra) -> String {
    let mut out = format!("morphism {} on {}", f.name, f.algebra);
    let require: Vec<&Constraint> = f.constraints.iter().filter(|c| !c.is_inequation()).collect();
    let forbid: Vec<(&Scalar, &Scalar)> = f
        .constraints
        .iter()
        .filter_map(|c| match c {
            Constraint::Inequation { lhs, rhs } => Some((lhs, rhs)),
            _ => None,
        })
        .collect();
    options(&mut out, &f.params, &f.ring, a.ring().num_roots(), &require, &forbid, &f.meta);
    out.push_str(" {\n");
    for j in 0..f.dim() {
        let col = f.matrix.column(j);
        if !col.is_zero() {
            let _ = writeln!(out, "  alpha(e{}) = {};", j + 1, col);
        }
    }
    out.push('}');
    if f.expected.is_some() {
        out.push_str(" expect {\n");
        products(&mut out, f.dim(), |i, j| f.expected_product(i, j).expect("table").clone());
        out.push('}');
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_catalog;
    use super::*;

    #[test]
    fn round_trip_fixpoint() {
        let text = "morphism_free # comment\n";
        assert!(parse_catalog(text).is_err());
        let text = r#"
algebra A dim=2 params=(lambda) forbid=(lambda = 0) label="Table \"x\"" {
  e2*e2 = 1/2*lambda^-1*e1 - i*e2;
  e1*e2 = (1 + lambda)*e1;
}
morphism A.f on A params=(a, b) roots=(s^2 = lambda) require=(a*b = 0, b in {s, -s}) forbid=(a = 1) note="n" {
  alpha(e1) = a*e1 + b*e2;
} expect {
  e1*e1 = 0;
}
"#;
        let doc = parse_catalog(text).unwrap();
        let once = render_catalog(&doc);
        let doc2 = parse_catalog(&once).unwrap();
        assert_eq!(doc, doc2);
        assert_eq!(render_catalog(&doc2), once);
        assert!(once.contains("e1*e2 = (lambda + 1)*e1;"));
    }
}
