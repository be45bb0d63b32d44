//! Shared fixtures for the criterion benches.

use rotframe::{parse_expr, RotationExpr};

/// Rotations of increasing depth, labelled for benchmark ids.
pub fn rotation_fixtures() -> Vec<(&'static str, RotationExpr)> {
    [
        ("leaf", "z(1)"),
        ("product2", "z(1)*x(1)"),
        ("product3", "z(1)*x(3)*y(7)"),
        ("mixed", "z(1)*x(2)+u(0,0.6,0.8)(0.5)"),
    ]
    .into_iter()
    .map(|(name, src)| (name, parse_expr(src).expect("fixture parses")))
    .collect()
}
