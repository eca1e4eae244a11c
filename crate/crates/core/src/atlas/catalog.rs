//! The worked atlases: the irrational torus, ℝ/ℚ, and the orbifold ℝ/{±1}.

use super::{Atlas, Chart, Domain, Interval, Transition};
use crate::numbers::{AffineElement, GroupPresentation, QAlpha};

/// `T_α = ℝ/(ℤ + αℤ)` with its single global chart `class`.
pub fn t_alpha() -> Atlas {
    let chart = Chart::new("class", GroupPresentation::z_plus_alpha_z(), Domain::Whole);
    Atlas::new(vec![chart], vec![]).expect("valid atlas")
}

/// `ℝ/ℚ` with its single global chart `class`.
pub fn rationals_line() -> Atlas {
    let chart = Chart::new("class", GroupPresentation::rationals(1), Domain::Whole);
    Atlas::new(vec![chart], vec![]).expect("valid atlas")
}

/// `ℝ/{±1} ≅ [0, ∞)` covered by a cone chart `(−2, 2)/{±1}` and an arm chart
/// `(1/2, ∞)` with trivial group, glued by the identity on the overlap.
pub fn reflection_orbifold() -> Atlas {
    let q = |s: &str| s.parse::<QAlpha>().expect("literal");
    let cone = Chart::new(
        "cone",
        GroupPresentation::reflection(),
        Domain::Box(vec![Interval::new(Some(q("-2")), Some(q("2")))]),
    );
    let arm = Chart::new(
        "arm",
        GroupPresentation::trivial(1),
        Domain::Box(vec![Interval::new(Some(q("1/2")), None)]),
    );
    let glue = Transition::new("cone", "arm", AffineElement::identity(1));
    Atlas::new(vec![cone, arm], vec![glue]).expect("valid atlas")
}
