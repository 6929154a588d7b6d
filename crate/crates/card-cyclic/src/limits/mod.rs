//! Closed-form limit laws for the rescaled shuffle.
//!
//! For a card with number around `bn`, the rescaled final position converges
//! in distribution to the law with CDF `F_b`, the inverse of the explicit
//! piecewise map `G_b` ([`position_map`]). Everything else here — densities,
//! expectations, the first/last-position laws, the named constants, and the
//! pair-inversion probabilities — is derived from that map, with bracketed
//! bisection for inverses and adaptive quadrature split at the known kinks.

pub mod quad;

use std::f64::consts::{E, PI};

use quad::{bisect, integrate_with_cuts};

const ROOT_TOL: f64 = 1e-12;
const QUAD_TOL: f64 = 1e-10;

fn assert_unit(name: &str, v: f64) {
    assert!(
        (0.0..=1.0).contains(&v) && v.is_finite(),
        "{name} = {v} outside [0, 1]"
    );
}

/// Insertion-fraction breakpoint `1 - (1-b) e^b` of [`position_map`].
pub fn map_breakpoint(b: f64) -> f64 {
    1.0 - (1.0 - b) * b.exp()
}

/// The limiting map `G_b(y)` from the rescaled insertion position `y` of
/// card `bn` to its rescaled final position: `y e^{1-b}` up to the
/// breakpoint, then `e^{(1-y)e^{-b}} - (1-y)e^{1-b}`. Strictly increasing
/// with `G_b(0) = 0` and `G_b(1) = 1`.
pub fn position_map(b: f64, y: f64) -> f64 {
    assert_unit("b", b);
    assert_unit("y", y);
    if y <= map_breakpoint(b) {
        y * (1.0 - b).exp()
    } else {
        ((1.0 - y) * (-b).exp()).exp() - (1.0 - y) * (1.0 - b).exp()
    }
}

/// The limiting CDF `F_b(x)` of the rescaled final position of card `bn`:
/// the inverse of [`position_map`], found by bisection.
pub fn position_cdf(b: f64, x: f64) -> f64 {
    assert_unit("b", b);
    assert_unit("x", x);
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    // below the breakpoint the map is linear
    let yb = map_breakpoint(b);
    if yb > 0.0 && x <= yb * (1.0 - b).exp() {
        return x * (b - 1.0).exp();
    }
    bisect(|y| position_map(b, y) - x, yb.max(0.0), 1.0, 1e-15)
}

/// Rescaled position `x_b = e^{1-b} - (1-b)e` at which the density of
/// `F_b` jumps. Strictly increasing, `x_0 = 0`, `x_1 = 1`.
pub fn density_jump(b: f64) -> f64 {
    assert_unit("b", b);
    (1.0 - b).exp() - (1.0 - b) * E
}

/// Inverse of [`density_jump`] on `[0, 1)`, by bisection.
pub fn jump_inverse(x: f64) -> f64 {
    assert!((0.0..1.0).contains(&x), "x = {x} outside [0, 1)");
    if x == 0.0 {
        return 0.0;
    }
    bisect(|b| density_jump(b) - x, 0.0, 1.0, ROOT_TOL)
}

/// The limiting density `f_b(x)` of the rescaled final position of card
/// `bn`, right-continuous at its jump: constant `e^{b-1}` left of
/// [`density_jump`], then `1 / G_b'` decreasing and convex. `f_1 ≡ 1`;
/// `f_0(0)` is a genuine infinity.
pub fn position_density(b: f64, x: f64) -> f64 {
    assert_unit("b", b);
    assert_unit("x", x);
    if b == 1.0 {
        return 1.0;
    }
    if x < density_jump(b) {
        return (b - 1.0).exp();
    }
    let y = position_cdf(b, x);
    let denom = (1.0 - b).exp() - (-b).exp() * ((1.0 - y) * (-b).exp()).exp();
    if denom <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / denom
    }
}

/// Limiting rescaled expected position `E(b) = eb + e^{1-b}/2 - e^b` of card
/// `bn`.
pub fn expected_position(b: f64) -> f64 {
    assert_unit("b", b);
    E * b + 0.5 * (1.0 - b).exp() - b.exp()
}

/// The distinguished points of the limit laws.
#[derive(Debug, Clone, Copy)]
pub struct LimitConstants {
    /// Maximizer of the expected final position; root of
    /// `e - e^b - e^{1-b}/2`.
    pub b_star: f64,
    /// Fixed point `E(b) = b`: cards left of it drift right on average,
    /// cards right of it drift left.
    pub b_bar: f64,
    /// Root of `(1-b)e^b = 1/2`; the card fraction at which neighboring
    /// pairs switch from favoring order to favoring inversion.
    pub b_hat: f64,
    /// Root of `E(b) = 1/2` on `[0, 1)`; pairs against the deck's last card
    /// switch sign here.
    pub b_tilde: f64,
    /// Position threshold `e/2 - (1 - ln 2)e` below which the numbers just
    /// past `n b_x` are the least likely occupants.
    pub x_hat: f64,
}

/// Compute all named constants by bracketed bisection (and one closed form).
pub fn constants() -> LimitConstants {
    let b_star = bisect(|b| E - b.exp() - 0.5 * (1.0 - b).exp(), 0.0, 1.0, ROOT_TOL);
    let b_bar = bisect(|b| expected_position(b) - b, 0.0, 1.0, ROOT_TOL);
    let b_hat = bisect(|b| (1.0 - b) * b.exp() - 0.5, 0.0, 1.0, ROOT_TOL);
    let b_tilde = bisect(|b| expected_position(b) - 0.5, 0.0, b_star, ROOT_TOL);
    let x_hat = 0.5 * E - (1.0 - std::f64::consts::LN_2) * E;
    LimitConstants {
        b_star,
        b_bar,
        b_hat,
        b_tilde,
        x_hat,
    }
}

/// Limiting fraction of lower-numbered cards that end up left of card `bn`,
/// given it was reinserted at rescaled position `d`.
pub fn early_left_limit(b: f64, d: f64) -> f64 {
    assert_unit("b", b);
    assert_unit("d", d);
    if d <= map_breakpoint(b) {
        d
    } else {
        b - (1.0 - d) * (1.0 - (-b).exp())
    }
}

/// Limiting fraction contributed by the cards that started between the
/// reinsertion point and card `bn`'s old neighborhood.
pub fn middle_left_limit(gamma: f64, d: f64) -> f64 {
    1.0 - gamma - (1.0 - d) * (d - gamma).exp()
}

/// Limiting fraction contributed by the higher-numbered cards, moved last.
pub fn late_left_limit(gamma: f64, t: f64, b: f64, d: f64) -> f64 {
    (gamma + t) * ((1.0 - b - d + gamma).exp() - 1.0)
}

/// The three-stage composition `γ + t + v`; identical to
/// [`position_map`]`(b, d)`.
pub fn staged_position_map(b: f64, d: f64) -> f64 {
    let gamma = early_left_limit(b, d);
    let t = middle_left_limit(gamma, d);
    let v = late_left_limit(gamma, t, b, d);
    gamma + t + v
}

/// The limiting density `h_x(b)` of the rescaled number of the card found
/// at position `xn`; pointwise equal to `f_b(x)`, with the closed forms
/// `e^{b-1}` at `x = 0` and `e^b/(e-1)` at `x = 1` on the boundary.
pub fn card_at_position_density(x: f64, b: f64) -> f64 {
    assert_unit("x", x);
    assert_unit("b", b);
    if x == 0.0 {
        return (b - 1.0).exp();
    }
    if x == 1.0 {
        return b.exp() / (E - 1.0);
    }
    position_density(b, x)
}

/// Gaussian tail `∫_x^∞ e^{-y²/2} dy`.
pub fn gaussian_tail(x: f64) -> f64 {
    (PI / 2.0).sqrt() * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `sup` over card sequences of `lim sup √n P(σ_1 = γ_n)`: `√(2π)/(2e)`,
/// attained on scales `o(√n)`.
pub fn first_card_pointwise_sup() -> f64 {
    (2.0 * PI).sqrt() / (2.0 * E)
}

/// `inf` over card sequences of `lim inf n P(σ_1 = γ_n)`: `e^{-1}`; also the
/// pointwise limit in the whole intermediate regime between `√(n log n)`
/// and `o(n)`.
pub fn first_card_pointwise_inf() -> f64 {
    (-1.0f64).exp()
}

/// Boundary value `e/(e-1)` of the last-position law at the right edge.
pub fn last_card_edge() -> f64 {
    E / (E - 1.0)
}

/// `lim n P(σ_n = n - l)` on the lattice near the right edge:
/// `(e - e^{-l})/(e - 1)`, increasing to [`last_card_edge`].
pub fn last_card_lattice(l: u32) -> f64 {
    (E - (-(f64::from(l))).exp()) / (E - 1.0)
}

/// Scaling regime for the first-position limit law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstCardScale {
    /// Card numbers of order `n`.
    Macroscopic,
    /// Card numbers of order `√n`.
    Mesoscopic,
}

/// A limit law: an optional atom plus a density over its support.
#[derive(Debug, Clone, Copy)]
pub enum LimitLaw {
    /// Rescaled number of the first card: atom `e^{-1}` at 0, density
    /// `e^{x-1}` on `[0,1]`.
    FirstCardMacro,
    /// First-card number on the `√n` scale: sub-probability density
    /// `e^{-1} ∫_x^∞ e^{-y²/2} dy` on `[0, ∞)` with total mass `e^{-1}`.
    FirstCardMeso,
    /// Rescaled number of the last card: density `e^x/(e-1)` on `[0,1]`.
    LastCard,
    /// Rescaled final position of card `bn`: density `f_b`.
    CardPosition { b: f64 },
    /// Rescaled number of the card at position `xn`: density `h_x`, plus an
    /// atom `e^{-1}` at 0 when `x = 0`.
    CardAtPosition { x: f64 },
}

impl LimitLaw {
    pub fn density(&self, t: f64) -> f64 {
        match *self {
            LimitLaw::FirstCardMacro => (t - 1.0).exp(),
            LimitLaw::FirstCardMeso => (-1.0f64).exp() * gaussian_tail(t),
            LimitLaw::LastCard => t.exp() / (E - 1.0),
            LimitLaw::CardPosition { b } => position_density(b, t),
            LimitLaw::CardAtPosition { x } => card_at_position_density(x, t),
        }
    }

    /// Point mass, if the law carries one.
    pub fn atom(&self) -> Option<(f64, f64)> {
        match *self {
            LimitLaw::FirstCardMacro => Some((0.0, (-1.0f64).exp())),
            LimitLaw::CardAtPosition { x: 0.0 } => Some((0.0, (-1.0f64).exp())),
            _ => None,
        }
    }

    /// Atom mass plus density mass.
    pub fn total_mass(&self) -> f64 {
        match *self {
            LimitLaw::FirstCardMeso => (-1.0f64).exp(),
            _ => 1.0,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            LimitLaw::FirstCardMeso => (0.0, f64::INFINITY),
            _ => (0.0, 1.0),
        }
    }
}

/// Limit law of the first card's number at the chosen scale.
pub fn first_card_limit(scale: FirstCardScale) -> LimitLaw {
    match scale {
        FirstCardScale::Macroscopic => LimitLaw::FirstCardMacro,
        FirstCardScale::Mesoscopic => LimitLaw::FirstCardMeso,
    }
}

/// Limit law of the last card's number (macroscopic scale).
pub fn last_card_limit() -> LimitLaw {
    LimitLaw::LastCard
}

/// `P(Σ₁ ≤ Σ₂)` for independent limiting positions of cards `b1 n` and
/// `b2 n`: `∫₀¹ f_{b1}(x)(1 - F_{b2}(x)) dx` by adaptive quadrature split at
/// both density jumps. The complementary event is the two cards forming an
/// inversion.
pub fn pair_inversion_prob(b1: f64, b2: f64) -> f64 {
    assert_unit("b1", b1);
    assert_unit("b2", b2);
    if b1 == 0.0 {
        // f_0 blows up at 0; substitute x = G_0(y) so the density drops out
        let cut = position_cdf(b1, density_jump(b2).min(1.0 - f64::EPSILON));
        return integrate_with_cuts(
            |y| 1.0 - position_cdf(b2, position_map(b1, y)),
            0.0,
            1.0,
            &[map_breakpoint(b1), cut],
            QUAD_TOL,
        );
    }
    integrate_with_cuts(
        |x| position_density(b1, x) * (1.0 - position_cdf(b2, x)),
        0.0,
        1.0,
        &[density_jump(b1), density_jump(b2)],
        QUAD_TOL,
    )
}
