//! Closed-form constants and bounds.
//!
//! `c_d` is the mean distance between two independent uniform points on the
//! unit sphere in R^d. It is computed two ways: the exact two-step
//! recurrence `c_{d+2} = 4d^2/(4d^2-1) c_d` seeded with `c_1 = 1`,
//! `c_2 = 4/pi`, and adaptive quadrature of
//!
//! ```text
//!         2 * int_0^{pi/2} sin^{d-2}(2a) sin(a) da
//! c_d = ------------------------------------------
//!           int_0^{pi/2} sin^{d-2}(2a) da
//! ```
//!
//! The two routes share no code and serve as oracles for each other.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// `2/sqrt(3)`: planar bound on `SS* / max M`.
pub const STEINER_TO_MATCHING_2D: f64 = 1.154_700_538_379_251_5;
/// `sqrt(2)`: bound on `SS* / max M` in three dimensions.
pub const STEINER_TO_MATCHING_3D: f64 = SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
}

impl BoundPair {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Recurrence,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformConstant {
    pub d: usize,
    pub value: f64,
    pub method: Method,
}

/// `G(2, n) = n / tan(pi / 2n)`, the maximum pairwise distance sum of `n`
/// points on the unit circle.
pub fn g2_closed_form(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "G(2, n) needs n >= 2, got {n}"
        )));
    }
    let n = n as f64;
    Ok(n / (PI / (2.0 * n)).tan())
}

/// The quadratic relaxation `(2/pi) n^2 >= G(2, n)`.
pub fn g2_relaxation(n: usize) -> f64 {
    2.0 / PI * (n * n) as f64
}

/// Alexander's bracket `(2/3)n^2 - 10 sqrt(n) < G(3, n) < (2/3)n^2 - 1/2`.
pub fn g3_bounds(n: usize) -> BoundPair {
    let n = n as f64;
    let quad = 2.0 / 3.0 * n * n;
    BoundPair {
        lower: quad - 10.0 * n.sqrt(),
        upper: quad - 0.5,
    }
}

pub fn c_d_recurrence(d: usize) -> Result<UniformConstant> {
    if d == 0 {
        return Err(Error::UnsupportedDimension(d));
    }
    let (mut k, mut value) = if d % 2 == 1 { (1, 1.0) } else { (2, 4.0 / PI) };
    while k < d {
        let kk = (k * k) as f64;
        value *= 4.0 * kk / (4.0 * kk - 1.0);
        k += 2;
    }
    Ok(UniformConstant {
        d,
        value,
        method: Method::Recurrence,
    })
}

/// Convenience accessor for the recurrence value of `c_d`.
pub fn uniform_constant(d: usize) -> Result<f64> {
    c_d_recurrence(d).map(|c| c.value)
}

pub fn c_d_quadrature(d: usize, tol: f64) -> Result<UniformConstant> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let power = (d - 2) as i32;
    let num = adaptive_simpson(
        |a| (2.0 * a).sin().powi(power) * a.sin(),
        0.0,
        FRAC_PI_2,
        tol,
    )?;
    let den = adaptive_simpson(|a| (2.0 * a).sin().powi(power), 0.0, FRAC_PI_2, tol)?;
    Ok(UniformConstant {
        d,
        value: 2.0 * num / den,
        method: Method::Quadrature,
    })
}

/// Partial Wallis products: `w = prod_{k<=n} 4k^2/(4k^2-1)` and the tail
/// `z = prod_{k>n}`, so that `w * z = pi/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WallisPartial {
    pub n: usize,
    pub w: f64,
    pub z: f64,
}

pub fn wallis_partial(n: usize) -> Result<WallisPartial> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Wallis partial products need n >= 1".into(),
        ));
    }
    let w = (1..=n)
        .map(|k| {
            let kk = (k * k) as f64;
            4.0 * kk / (4.0 * kk - 1.0)
        })
        .product::<f64>();
    Ok(WallisPartial {
        n,
        w,
        z: FRAC_PI_2 / w,
    })
}

/// `sum_{k>n} 1/(4k^2-1)`, which telescopes to `1/(2(2n+1))`.
pub fn wallis_tail_sum(n: usize) -> f64 {
    1.0 / (2.0 * (2 * n + 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WallisEnvelopes {
    pub z: BoundPair,
    pub w: BoundPair,
}

/// Exponential envelopes `e^{2/(5(2n+1))} <= Z_n <= e^{1/(2(2n+1))}` and the
/// matching bracket on `W_n = (pi/2)/Z_n`.
pub fn wallis_envelopes(n: usize) -> Result<WallisEnvelopes> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Wallis envelopes need n >= 1".into(),
        ));
    }
    let tail = wallis_tail_sum(n);
    let z = BoundPair {
        lower: (0.8 * tail).exp(),
        upper: tail.exp(),
    };
    let w = BoundPair {
        lower: FRAC_PI_2 / z.upper,
        upper: FRAC_PI_2 / z.lower,
    };
    Ok(WallisEnvelopes { z, w })
}

/// Balanced upper bound `(2 sqrt2 - c)/(1 + sqrt2 - c)` on the star Steiner
/// ratio, where the two delta-bounds cross at `delta = sqrt2 - c`.
pub fn rho_upper(c: f64) -> Result<f64> {
    if !(1.0..=SQRT_2 + 1e-12).contains(&c) {
        return Err(Error::OutOfRange {
            what: "uniform distribution constant",
            value: c,
        });
    }
    Ok((2.0 * SQRT_2 - c) / (1.0 + SQRT_2 - c))
}

/// Closed-form bracket on `rho_d` valid for `d >= 4`.
pub fn theorem3_envelope(d: usize) -> Result<BoundPair> {
    if d < 4 {
        return Err(Error::UnsupportedDimension(d));
    }
    let d = d as f64;
    let lower = SQRT_2 * (-1.0 / (4.0 * (2.0 * d - 3.0))).exp();
    let c_upper = SQRT_2 * (-1.0 / (5.0 * (2.0 * d - 1.0))).exp();
    let upper = (2.0 * SQRT_2 - c_upper) / (1.0 + SQRT_2 - c_upper);
    Ok(BoundPair { lower, upper })
}

/// Upper envelope `sqrt2 e^{-1/(5(2d-1))}` on `c_d`.
pub fn c_d_upper_envelope(d: usize) -> f64 {
    SQRT_2 * (-1.0 / (5.0 * (2.0 * d as f64 - 1.0))).exp()
}

/// Conjectured planar star Steiner ratio for `n` points,
/// `((pi/2n) / tan(pi/2n)) * 4/pi`.
pub fn conjectured_rho2(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "conjectured ratio needs n >= 2, got {n}"
        )));
    }
    let t = PI / (2.0 * n as f64);
    Ok(t / t.tan() * 4.0 / PI)
}

/// Upper bound on `min S / max M` in the plane.
pub fn eta2_upper() -> f64 {
    rho_upper(4.0 / PI).expect("4/pi is in range") * STEINER_TO_MATCHING_2D
}

/// Upper bound on `min S / max M` in three dimensions.
pub fn eta3_upper() -> f64 {
    rho_upper(4.0 / 3.0).expect("4/3 is in range") * STEINER_TO_MATCHING_3D
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub ratio: String,
    pub quantity: String,
    pub lower: f64,
    pub upper: f64,
    /// `lower` truncated to four decimals.
    pub lower_4dp: f64,
    /// `upper` rounded up to four decimals.
    pub upper_4dp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1 {
    pub rows: Vec<Table1Row>,
}

/// Rounds down to four decimals. Lower bounds are only ever weakened.
pub fn floor_4dp(x: f64) -> f64 {
    (x * 1e4 + 1e-9).floor() / 1e4
}

/// Rounds up to four decimals. Upper bounds are only ever weakened.
pub fn ceil_4dp(x: f64) -> f64 {
    (x * 1e4 - 1e-9).ceil() / 1e4
}

fn row(ratio: &str, quantity: &str, lower: f64, upper: f64) -> Table1Row {
    Table1Row {
        ratio: ratio.to_string(),
        quantity: quantity.to_string(),
        lower,
        upper,
        lower_4dp: floor_4dp(lower),
        upper_4dp: ceil_4dp(upper),
    }
}

/// Lower and upper bounds on the star Steiner ratios `rho_d` and the
/// star-to-matching ratios `eta_2`, `eta_3`.
pub fn table1() -> Table1 {
    let mut rows = Vec::new();
    for d in [2, 3, 4, 5, 100] {
        let c = uniform_constant(d).expect("d >= 1");
        let upper = rho_upper(c).expect("c_d in [1, sqrt 2]");
        rows.push(row(&format!("rho_{d}"), "(min S)/SS*", c, upper));
    }
    rows.push(row("eta_2", "(min S)/(max M)", 4.0 / 3.0, eta2_upper()));
    rows.push(row("eta_3", "(min S)/(max M)", 1.5, eta3_upper()));
    Table1 { rows }
}

impl Table1 {
    pub fn row(&self, ratio: &str) -> Option<&Table1Row> {
        self.rows.iter().find(|r| r.ratio == ratio)
    }

    /// Aligned plain-text rendering with four-decimal values.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<8} {:<16} lower  / upper", "ratio", "quantity");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<8} {:<16} {:.4} / {:.4}",
                r.ratio, r.quantity, r.lower_4dp, r.upper_4dp
            );
        }
        out
    }
}
