use super::{parse_catalog, CatalogDocument};

/// Two-dimensional algebras and their morphism families.
pub const DIM2_SOURCE: &str = include_str!("../../data/dim2.hnov");
/// Three-dimensional algebras and their morphism families.
pub const DIM3_SOURCE: &str = include_str!("../../data/dim3.hnov");

/// A bundled document by name: `dim2` or `dim3`.
pub fn bundled(name: &str) -> Option<CatalogDocument> {
    let text = match name {
        "dim2" => DIM2_SOURCE,
        "dim3" => DIM3_SOURCE,
        _ => return None,
    };
    Some(parse_catalog(text).expect("bundled catalog parses"))
}

pub fn bundled_catalogs() -> (CatalogDocument, CatalogDocument) {
    (bundled("dim2").expect("dim2"), bundled("dim3").expect("dim3"))
}
