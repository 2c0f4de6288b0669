//! Embedded datasets (overridable from files via the CLI).

/// Hecke-eigenvalue tables for all form blocks.
pub const FORMS_JSON: &str = include_str!("../data/forms.json");

/// Genus-2 curve models matching the forms.
pub const CURVES_JSON: &str = include_str!("../data/curves.json");

/// Built-in surface model for coefficient discriminant 8 (with invariant map).
pub const SURFACE8_JSON: &str = include_str!("../data/surface8.json");

/// Built-in surface model for coefficient discriminant 17 (cover only).
pub const SURFACE17_JSON: &str = include_str!("../data/surface17.json");
