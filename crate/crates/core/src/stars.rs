//! Stars centered at input points, and the per-instance ratio report that
//! compares `min S / SS*` against every applicable upper bound.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::analytic::{conjectured_rho2, rho_upper, uniform_constant};
use crate::error::{Error, Result};
use crate::geometry::{
    dist, norm, pairwise_distance_sum, project_to_unit_sphere, to_weber_frame, Configuration,
    WeberFrame,
};
use crate::weber::{self, WeberOptions, WeberResult};

/// Additive slack for per-instance bound checks. Covers the propagation of
/// the solver's center error into `delta`.
pub const BOUND_SLACK: f64 = 1e-7;

/// Slack before a ratio above the conjectured value is reported.
pub const CONJECTURE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarSummary {
    pub lengths: Vec<f64>,
    pub min_index: usize,
    pub min_length: f64,
    pub delta: Option<f64>,
}

/// `S_i = sum_j |p_i p_j|`.
pub fn star_length(c: &Configuration, i: usize) -> Result<f64> {
    let center = c.point(i)?.coords();
    Ok(c.iter().map(|p| dist(p, center)).sum())
}

/// All star lengths and the minimum star. Ties go to the smallest index.
pub fn min_star(c: &Configuration) -> StarSummary {
    let n = c.len();
    let pts = c.points();
    let mut lengths = vec![0.0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let r = dist(pts[i].coords(), pts[j].coords());
            lengths[i] += r;
            lengths[j] += r;
        }
    }
    let (min_index, min_length) =
        lengths
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (i, s)| if s < best.1 { (i, s) } else { best },
            );
    StarSummary {
        lengths,
        min_index,
        min_length,
        delta: None,
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta < 0.0 || delta.is_nan() {
        return Err(Error::NegativeDelta(delta));
    }
    Ok(())
}

/// Bound from recentering the Steiner star on the nearest input point:
/// `(sqrt2 + delta) / (1 + delta)`. Decreasing in `delta`.
pub fn fm_bound(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if delta.is_infinite() {
        return Ok(1.0);
    }
    Ok((SQRT_2 + delta) / (1.0 + delta))
}

/// Averaging bound `(c + 2 delta) / (1 + delta)` for an explicit constant `c`.
pub fn averaged_bound_with(delta: f64, c: f64) -> Result<f64> {
    check_delta(delta)?;
    if delta.is_infinite() {
        return Ok(2.0);
    }
    Ok((c + 2.0 * delta) / (1.0 + delta))
}

/// Averaging bound with `c_2 = 4/pi` or `c_3 = 4/3`.
pub fn averaged_bound(delta: f64, d: usize) -> Result<f64> {
    let c = match d {
        2 => 4.0 / PI,
        3 => 4.0 / 3.0,
        _ => return Err(Error::UnsupportedDimension(d)),
    };
    averaged_bound_with(delta, c)
}

/// Householder reflection of the frame that maps the nearest point onto
/// `(1, 0, ..., 0)`. Distances are unchanged.
pub fn align_nearest_to_axis(f: &WeberFrame) -> Configuration {
    let p0 = f.config.points()[f.nearest_index].coords();
    let r = norm(p0);
    // v = p0/|p0| - e1; reflection H = I - 2 v v^T / (v^T v)
    let mut v: Vec<f64> = p0.iter().map(|x| x / r).collect();
    v[0] -= 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    if vv < 1e-30 {
        return f.config.clone();
    }
    f.config
        .map_points(|p| {
            let k = 2.0 * p.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / vv;
            p.iter().zip(&v).map(|(a, b)| a - k * b).collect()
        })
        .expect("reflection keeps points finite")
}

/// `b_i = |p_0 q_i|`: distance from the nearest point (rotated to the first
/// axis) to each projected point `q_i`.
pub fn b_values(f: &WeberFrame) -> Vec<f64> {
    let aligned = WeberFrame {
        config: align_nearest_to_axis(f),
        ..f.clone()
    };
    let q = project_to_unit_sphere(&aligned);
    let mut axis = vec![0.0; q.dim()];
    axis[0] = 1.0;
    q.iter().map(|qi| dist(qi, &axis)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub n: usize,
    pub d: usize,
    pub steiner_length: f64,
    pub min_star: f64,
    pub min_index: usize,
    pub ratio: f64,
    /// `None` when the Weber center coincides with an input point.
    pub delta: Option<f64>,
    pub bound_fm: Option<f64>,
    /// Only for `d` in {2, 3}.
    pub bound_avg: Option<f64>,
    /// `rho_upper(c_d)`; `None` for `d = 1`.
    pub bound_theorem: Option<f64>,
    /// Conjectured `rho_2(n)`, planar instances only.
    pub conjectured: Option<f64>,
    pub anchored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

impl RatioReport {
    /// Checks `ratio` against every populated proven bound.
    pub fn bound_checks(&self) -> Vec<BoundCheck> {
        let mut out = Vec::new();
        let mut push = |name, bound: Option<f64>, slack| {
            if let Some(bound) = bound {
                out.push(BoundCheck {
                    name,
                    bound,
                    slack,
                    pass: self.ratio <= bound + slack,
                });
            }
        };
        push("fm_bound", self.bound_fm, BOUND_SLACK);
        push("averaged_bound", self.bound_avg, BOUND_SLACK);
        push("rho_upper", self.bound_theorem, 1e-6);
        out.push(BoundCheck {
            name: "ratio_at_least_one",
            bound: 1.0,
            slack: 1e-9,
            pass: self.ratio >= 1.0 - 1e-9,
        });
        out
    }

    pub fn all_bounds_hold(&self) -> bool {
        self.bound_checks().iter().all(|c| c.pass)
    }

    /// True when the ratio beats the conjectured extremal value.
    pub fn exceeds_conjecture(&self) -> bool {
        self.conjectured
            .is_some_and(|rho| self.ratio > rho + CONJECTURE_SLACK)
    }
}

pub fn ratio_report(c: &Configuration) -> Result<RatioReport> {
    ratio_report_with(c, &WeberOptions::default())
}

pub fn ratio_report_with(c: &Configuration, opts: &WeberOptions) -> Result<RatioReport> {
    if c.len() < 2 {
        return Err(Error::InvalidArgument(
            "a ratio report needs at least two points".into(),
        ));
    }
    let weber = weber::solve(c, opts).into_converged()?;
    let stars = min_star(c);
    Ok(assemble(c, &weber, &stars))
}

fn assemble(c: &Configuration, weber: &WeberResult, stars: &StarSummary) -> RatioReport {
    let n = c.len();
    let d = c.dim();
    let frame = match weber.anchored_index {
        Some(_) => None,
        None => to_weber_frame(c, &weber.center).ok(),
    };
    let anchored = frame.is_none();
    let ratio = if anchored {
        1.0
    } else {
        stars.min_length / weber.steiner_length
    };
    // SS* = (1 + delta) n r_min, with the solver's SS*.
    let delta = frame
        .as_ref()
        .map(|f| (weber.steiner_length / (n as f64 * f.scale) - 1.0).max(0.0));
    let bound_fm = delta.and_then(|dl| fm_bound(dl).ok());
    let bound_avg = delta.and_then(|dl| averaged_bound(dl, d).ok());
    let bound_theorem = (d >= 2)
        .then(|| uniform_constant(d).and_then(rho_upper).ok())
        .flatten();
    let conjectured = (d == 2).then(|| conjectured_rho2(n).ok()).flatten();
    RatioReport {
        n,
        d,
        steiner_length: weber.steiner_length,
        min_star: stars.min_length,
        min_index: stars.min_index,
        ratio,
        delta,
        bound_fm,
        bound_avg,
        bound_theorem,
        conjectured,
        anchored,
    }
}

/// `min S / SS*`, with 1 when the Weber center is an input point.
pub fn star_steiner_ratio(c: &Configuration, opts: &WeberOptions) -> Result<f64> {
    let weber = weber::solve(c, opts).into_converged()?;
    if weber.anchored_index.is_some() {
        return Ok(1.0);
    }
    Ok(min_star(c).min_length / weber.steiner_length)
}

/// Sanity identity `sum_i S_i = 2 sum_{i<j} |p_i p_j|`, as a relative error.
pub fn star_sum_identity_error(c: &Configuration) -> f64 {
    let total: f64 = min_star(c).lengths.iter().sum();
    let twice = 2.0 * pairwise_distance_sum(c);
    if twice == 0.0 {
        total.abs()
    } else {
        (total - twice).abs() / twice
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn cfg(rows: &[&[f64]]) -> Configuration {
        Configuration::from_rows(rows.iter().map(|r| r.to_vec())).unwrap()
    }

    fn circle(n: usize) -> Configuration {
        Configuration::from_rows((0..n).map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            vec![a.cos(), a.sin()]
        }))
        .unwrap()
    }

    fn unit_square() -> Configuration {
        cfg(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]])
    }

    #[test]
    fn star_length_examples() {
        for i in 0..4 {
            assert!((star_length(&unit_square(), i).unwrap() - (2.0 + SQRT_2)).abs() < 1e-15);
        }
        for i in 0..3 {
            assert!((star_length(&circle(3), i).unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-14);
        }
        assert_eq!(star_length(&cfg(&[&[1.0, 2.0]]), 0).unwrap(), 0.0);
        assert_eq!(
            star_length(&unit_square(), 4).unwrap_err(),
            Error::IndexOutOfRange { index: 4, len: 4 }
        );
    }

    #[test]
    fn min_star_examples() {
        let s = min_star(&cfg(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0]]));
        assert_eq!(s.min_index, 1);
        assert_eq!(s.min_length, 2.0);
        assert_eq!(s.delta, None);

        let s = min_star(&unit_square());
        assert_eq!(s.min_index, 0);
        assert!((s.min_length - (2.0 + SQRT_2)).abs() < 1e-15);
    }

    #[test]
    fn fm_bound_examples() {
        assert!((fm_bound(0.0).unwrap() - SQRT_2).abs() < 1e-15);
        let d0 = SQRT_2 - 4.0 / PI;
        let v = fm_bound(d0).unwrap();
        assert!((v - rho_upper(4.0 / PI).unwrap()).abs() < 1e-15);
        assert_eq!((v * 1e4).floor() / 1e4, 1.3630);
        assert!((fm_bound(1e12).unwrap() - 1.0).abs() < 1e-11);
        assert_eq!(fm_bound(f64::INFINITY).unwrap(), 1.0);
        assert_eq!(fm_bound(-0.1).unwrap_err(), Error::NegativeDelta(-0.1));
    }

    #[test]
    fn averaged_bound_examples() {
        assert!((averaged_bound(0.0, 2).unwrap() - 4.0 / PI).abs() < 1e-15);
        let d0 = SQRT_2 - 4.0 / 3.0;
        let v = averaged_bound(d0, 3).unwrap();
        assert!((v - 2.0 / 17.0 * (16.0 - 3.0 * SQRT_2)).abs() < 1e-14);
        assert!((v - fm_bound(d0).unwrap()).abs() < 1e-14);
        assert!((averaged_bound(1e12, 2).unwrap() - 2.0).abs() < 1e-11);
        assert_eq!(
            averaged_bound(0.1, 4).unwrap_err(),
            Error::UnsupportedDimension(4)
        );
        assert!(averaged_bound(-1.0, 2).is_err());
    }

    #[test]
    fn b_values_examples() {
        for n in [3usize, 4, 7, 16] {
            let f = to_weber_frame(&circle(n), &Point::origin(2)).unwrap();
            let b = b_values(&f);
            let sum: f64 = b.iter().sum();
            let chord_sum: f64 = (0..n).map(|k| 2.0 * (PI * k as f64 / n as f64).sin()).sum();
            assert!((sum - chord_sum).abs() < 1e-12);
            assert!((sum - 2.0 / (PI / (2.0 * n as f64)).tan()).abs() < 1e-12);
            assert!(sum <= n as f64 * SQRT_2);
        }

        let one = cfg(&[&[0.0, 2.0]]);
        let f = to_weber_frame(&one, &Point::origin(2)).unwrap();
        assert_eq!(b_values(&f), vec![0.0]);

        let pair = cfg(&[&[0.0, 1.0, 0.0], &[0.0, -1.0, 0.0]]);
        let f = to_weber_frame(&pair, &Point::origin(3)).unwrap();
        let b = b_values(&f);
        assert!(b[0].abs() < 1e-15 && (b[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn householder_maps_nearest_to_axis() {
        let c = cfg(&[&[0.3, -2.0, 1.0], &[-1.0, 0.5, 0.2], &[2.0, 2.0, -3.0]]);
        let f = to_weber_frame(&c, &Point::new(vec![0.1, 0.1, 0.1]).unwrap()).unwrap();
        let aligned = align_nearest_to_axis(&f);
        let p0 = aligned.points()[f.nearest_index].coords();
        assert!(dist(p0, &[1.0, 0.0, 0.0]) < 1e-14);
        let before = pairwise_distance_sum(&f.config);
        assert!((pairwise_distance_sum(&aligned) - before).abs() < 1e-12);
    }

    #[test]
    fn ratio_report_examples() {
        let r = ratio_report(&unit_square()).unwrap();
        let expected = (2.0 + SQRT_2) / (2.0 * SQRT_2);
        assert!((r.ratio - expected).abs() < 1e-10);
        assert!(r.all_bounds_hold());
        assert!(!r.exceeds_conjecture());
        assert!((r.conjectured.unwrap() - expected).abs() < 1e-12);

        let r = ratio_report(&circle(3)).unwrap();
        assert!((r.ratio - 2.0 / 3f64.sqrt()).abs() < 1e-10);
        assert!(r.delta.unwrap() < 1e-10);

        let r = ratio_report(&cfg(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0]])).unwrap();
        assert!(r.anchored);
        assert_eq!(r.ratio, 1.0);
        assert_eq!(r.delta, None);
        assert!(r.all_bounds_hold());

        assert!(ratio_report(&cfg(&[&[0.0, 0.0]])).is_err());
    }

    #[test]
    fn ratio_report_serializes_flat() {
        let r = ratio_report(&unit_square()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        let obj = v.as_object().unwrap();
        for key in [
            "n",
            "d",
            "steiner_length",
            "min_star",
            "ratio",
            "delta",
            "bound_fm",
            "bound_avg",
            "bound_theorem",
            "conjectured",
        ] {
            assert!(obj.contains_key(key), "missing {key}");
            assert!(!obj[key].is_object() && !obj[key].is_array());
        }
    }

    #[test]
    fn triangle_inequality_chain_on_frame() {
        // S_0 <= sum b_i + delta n in frame units.
        let c = cfg(&[
            &[0.0, 0.0],
            &[3.0, 0.5],
            &[1.0, 2.5],
            &[-1.5, 1.0],
            &[0.5, -2.0],
        ]);
        let w = weber::solve(&c, &WeberOptions::default());
        let f = to_weber_frame(&c, &w.center).unwrap();
        let s0 = star_length(&f.config, f.nearest_index).unwrap();
        let b: f64 = b_values(&f).iter().sum();
        assert!(s0 <= b + f.delta * c.len() as f64 + 1e-9);
    }
}
