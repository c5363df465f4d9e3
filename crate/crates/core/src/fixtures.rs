//! The fixture curves shipped in `fixtures/`.

use crate::curve::Curve;
use crate::format::parse_curve;

pub const FIX_A: &str = include_str!("../../../fixtures/fix_a.curve");
pub const FIX_B: &str = include_str!("../../../fixtures/fix_b.curve");
pub const FIX_C: &str = include_str!("../../../fixtures/fix_c.curve");
pub const FIX_D: &str = include_str!("../../../fixtures/fix_d.curve");
pub const FIX_E: &str = include_str!("../../../fixtures/fix_e.curve");
pub const STAR: &str = include_str!("../../../fixtures/star.curve");

fn load(text: &str) -> Curve {
    parse_curve(text).expect("shipped fixture parses")
}

/// Two rational components meeting twice, each carrying an elliptic tail.
pub fn fix_a() -> Curve {
    load(FIX_A)
}

/// Two elliptic components joined by a bridge (a splitting node).
pub fn fix_b() -> Curve {
    load(FIX_B)
}

/// Elliptic, rational, elliptic chain.
pub fn fix_c() -> Curve {
    load(FIX_C)
}

pub fn fix_d() -> Curve {
    load(FIX_D)
}

/// Two rational components meeting in three points.
pub fn fix_e() -> Curve {
    load(FIX_E)
}

/// Three elliptic components bridged to one central line.
pub fn star() -> Curve {
    load(STAR)
}

pub fn all() -> Vec<Curve> {
    vec![fix_a(), fix_b(), fix_c(), fix_d(), fix_e(), star()]
}
