//! End-to-end invariant suite behind `star-steiner verify`.
//!
//! Each check recomputes its expected values from closed forms or brute
//! force. Checks run in parallel; results are reported in check order.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{
    c_d_quadrature, c_d_recurrence, conjectured_rho2, eta2_upper, eta3_upper, g2_closed_form,
    g3_bounds, rho_upper, table1, uniform_constant, wallis_envelopes, wallis_partial,
    STEINER_TO_MATCHING_2D, STEINER_TO_MATCHING_3D,
};
use crate::geometry::{dist, pairwise_distance_sum, Configuration};
use crate::matching::max_matching;
use crate::search::{maximize, random_instance, uniform_circle, Objective, SearchSpec};
use crate::stars::{averaged_bound, fm_bound, min_star, ratio_report};
use crate::weber::{self, WeberOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    /// Set when a search beat a conjectured or closed-form extremum.
    pub counterexample: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Random instances per dimension for the bound and matching checks.
    pub instances: u64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            instances: 500,
            seed: 0,
        }
    }
}

type CheckFn = fn(&VerifyConfig) -> Result<String, String>;

const CHECKS: [(&str, CheckFn); 10] = [
    ("table1_regression", check_table1),
    ("constant_cross_oracle", check_constants),
    ("wallis_identities", check_wallis),
    ("product_identity", check_product_identity),
    ("g2_closed_form", check_g2),
    ("alexander_bracket", check_alexander),
    ("bound_invariants", check_bounds),
    ("conjecture_consistency", check_conjecture),
    ("matching_oracle", check_matching),
    ("weiszfeld_fixtures", check_weiszfeld),
];

pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckOutcome> {
    CHECKS
        .par_iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let result = check(cfg);
            let detail = match &result {
                Ok(s) | Err(s) => s.clone(),
            };
            CheckOutcome {
                id: i + 1,
                name,
                passed: result.is_ok(),
                counterexample: detail.contains("COUNTEREXAMPLE"),
                detail,
            }
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn check_table1(_: &VerifyConfig) -> Result<String, String> {
    let expect = [
        ("rho_2", 1.2732, 1.3631),
        ("rho_3", 1.3333, 1.3833),
        ("rho_4", 1.3581, 1.3923),
        ("rho_5", 1.3714, 1.3973),
        ("rho_100", 1.4124, 1.4135),
        ("eta_2", 1.3333, 1.5739),
        ("eta_3", 1.5, 1.9562),
    ];
    let t = table1();
    for (name, lo, hi) in expect {
        let row = t.row(name).ok_or_else(|| format!("missing row {name}"))?;
        ensure(
            (row.lower_4dp - lo).abs() < 5e-9 && (row.upper_4dp - hi).abs() < 5e-9,
            || {
                format!(
                    "{name}: got {:.4}/{:.4}, want {lo:.4}/{hi:.4}",
                    row.lower_4dp, row.upper_4dp
                )
            },
        )?;
    }
    Ok(format!("{} rows match", expect.len()))
}

fn check_constants(_: &VerifyConfig) -> Result<String, String> {
    let mut worst = 0.0f64;
    for d in 2..=30 {
        let r = c_d_recurrence(d).map_err(|e| e.to_string())?.value;
        let q = c_d_quadrature(d, 1e-12).map_err(|e| e.to_string())?.value;
        worst = worst.max((r - q).abs());
        ensure((r - q).abs() <= 1e-9, || {
            format!("d={d}: recurrence {r} vs quadrature {q}")
        })?;
    }
    let c3 = uniform_constant(3).map_err(|e| e.to_string())?;
    let c5 = uniform_constant(5).map_err(|e| e.to_string())?;
    ensure((c3 - 4.0 / 3.0).abs() <= 1e-12, || format!("c_3 = {c3}"))?;
    ensure((c5 - 48.0 / 35.0).abs() <= 1e-12, || format!("c_5 = {c5}"))?;
    Ok(format!("max |recurrence - quadrature| = {worst:.2e}"))
}

fn check_wallis(_: &VerifyConfig) -> Result<String, String> {
    for n in 1..=1000 {
        let w = wallis_partial(n).map_err(|e| e.to_string())?;
        let e = wallis_envelopes(n).map_err(|e| e.to_string())?;
        ensure(rel(w.w * w.z, PI / 2.0) <= 1e-12, || {
            format!("n={n}: W*Z = {}", w.w * w.z)
        })?;
        ensure(e.z.contains(w.z), || {
            format!("n={n}: Z={} outside [{}, {}]", w.z, e.z.lower, e.z.upper)
        })?;
    }
    Ok("n = 1..1000".into())
}

fn check_product_identity(_: &VerifyConfig) -> Result<String, String> {
    for d in 1..=50 {
        let lhs = uniform_constant(d + 1).unwrap() * uniform_constant(d + 2).unwrap();
        let rhs = 4.0 / PI * wallis_partial(d).unwrap().w;
        ensure(rel(lhs, rhs) <= 1e-10, || format!("d={d}: {lhs} vs {rhs}"))?;
    }
    Ok("d = 1..50".into())
}

fn check_g2(cfg: &VerifyConfig) -> Result<String, String> {
    for n in 2..=256 {
        let polygon = pairwise_distance_sum(&uniform_circle(n).unwrap());
        let closed = g2_closed_form(n).unwrap();
        ensure(rel(polygon, closed) <= 1e-10, || {
            format!("n={n}: {polygon} vs {closed}")
        })?;
    }
    let mut notes = Vec::new();
    for n in [5, 6, 8] {
        let res = maximize(&SearchSpec::new(
            Objective::SphereSum,
            n,
            2,
            cfg.seed,
            100_000,
        ))
        .map_err(|e| e.to_string())?;
        let closed = g2_closed_form(n).unwrap();
        if res.best_value > closed + 1e-6 {
            return Err(format!(
                "COUNTEREXAMPLE n={n}: {} > G(2,n) = {closed}",
                res.best_value
            ));
        }
        ensure(rel(res.best_value, closed) <= 1e-3, || {
            format!("n={n}: search reached {} of {closed}", res.best_value)
        })?;
        notes.push(format!("n={n} gap {:.1e}", closed - res.best_value));
    }
    Ok(notes.join(", "))
}

fn check_alexander(cfg: &VerifyConfig) -> Result<String, String> {
    let mut notes = Vec::new();
    for n in [20, 50] {
        let res = maximize(&SearchSpec::new(
            Objective::SphereSum,
            n,
            3,
            cfg.seed,
            100_000,
        ))
        .map_err(|e| e.to_string())?;
        let b = g3_bounds(n);
        ensure(b.lower < res.best_value && res.best_value < b.upper, || {
            format!(
                "n={n}: {} outside ({}, {})",
                res.best_value, b.lower, b.upper
            )
        })?;
        notes.push(format!("n={n}: {:.4}", res.best_value));
    }
    Ok(notes.join(", "))
}

fn instance_seed(cfg: &VerifyConfig, d: usize, k: u64) -> u64 {
    cfg.seed
        .wrapping_mul(1_000_003)
        .wrapping_add(d as u64 * 100_000 + k)
}

fn check_bounds(cfg: &VerifyConfig) -> Result<String, String> {
    let mut worst_ratio: f64 = 0.0;
    for d in [2usize, 3] {
        let rho = rho_upper(uniform_constant(d).unwrap()).unwrap();
        for k in 0..cfg.instances {
            let seed = instance_seed(cfg, d, k);
            let n = 3 + (seed % 30) as usize;
            let c = random_instance(seed, n, d).map_err(|e| e.to_string())?;
            let r = ratio_report(&c).map_err(|e| format!("seed {seed}: {e}"))?;
            worst_ratio = worst_ratio.max(r.ratio);
            let total: f64 = min_star(&c).lengths.iter().sum();
            let twice = 2.0 * pairwise_distance_sum(&c);
            ensure(rel(total, twice) <= 1e-9, || {
                format!("seed {seed}: star sum identity")
            })?;
            ensure(r.ratio >= 1.0 - 1e-9, || {
                format!("seed {seed}: ratio {} < 1", r.ratio)
            })?;
            ensure(r.ratio <= rho + 1e-6, || {
                format!("seed {seed}: ratio {} > {rho}", r.ratio)
            })?;
            if let Some(delta) = r.delta {
                let b = fm_bound(delta)
                    .unwrap()
                    .min(averaged_bound(delta, d).unwrap());
                ensure(r.ratio <= b + 1e-7, || {
                    format!(
                        "seed {seed}: ratio {} > min bound {b} at delta {delta}",
                        r.ratio
                    )
                })?;
            }
        }
    }
    Ok(format!(
        "{} instances per dimension, largest ratio {worst_ratio:.6}",
        cfg.instances
    ))
}

fn check_conjecture(cfg: &VerifyConfig) -> Result<String, String> {
    for n in 3..=64 {
        let r = ratio_report(&uniform_circle(n).unwrap()).map_err(|e| e.to_string())?;
        let conj = conjectured_rho2(n).unwrap();
        let cot = 2.0 / n as f64 / (PI / (2.0 * n as f64)).tan();
        ensure(
            (r.ratio - conj).abs() <= 1e-9 && (conj - cot).abs() <= 1e-12,
            || format!("n={n}: polygon ratio {} vs conjectured {conj}", r.ratio),
        )?;
    }
    let mut notes = Vec::new();
    for n in [4, 5, 6] {
        let res = maximize(&SearchSpec::new(
            Objective::SteinerRatio,
            n,
            2,
            cfg.seed,
            20_000,
        ))
        .map_err(|e| e.to_string())?;
        let conj = conjectured_rho2(n).unwrap();
        if res.best_value > conj + 1e-4 {
            return Err(format!(
                "COUNTEREXAMPLE n={n}: ratio {} > conjectured {conj}",
                res.best_value
            ));
        }
        notes.push(format!("n={n}: {:.6} <= {conj:.6}", res.best_value));
    }
    Ok(notes.join(", "))
}

/// Exhaustive maximum over all perfect matchings of `idx`.
fn brute_force_matching(c: &Configuration, idx: &mut Vec<usize>) -> f64 {
    if idx.is_empty() {
        return 0.0;
    }
    let first = idx.remove(0);
    let mut best = f64::NEG_INFINITY;
    for k in 0..idx.len() {
        let partner = idx.remove(k);
        let w = dist(c.points()[first].coords(), c.points()[partner].coords());
        best = best.max(w + brute_force_matching(c, idx));
        idx.insert(k, partner);
    }
    idx.insert(0, first);
    best
}

fn check_matching(cfg: &VerifyConfig) -> Result<String, String> {
    for k in 0..100u64 {
        let n = 2 * (1 + (k % 4) as usize);
        let d = 2 + (k % 2) as usize;
        let c = random_instance(cfg.seed.wrapping_add(7_000 + k), n, d).unwrap();
        let dp = max_matching(&c).map_err(|e| e.to_string())?.total_weight;
        let brute = brute_force_matching(&c, &mut (0..n).collect());
        ensure((dp - brute).abs() <= 1e-12 * brute.max(1.0), || {
            format!("seed {k}: DP {dp} vs brute force {brute}")
        })?;
    }
    for (d, eta_max, steiner_factor) in [
        (2usize, eta2_upper(), STEINER_TO_MATCHING_2D),
        (3, eta3_upper(), STEINER_TO_MATCHING_3D),
    ] {
        let rho = rho_upper(uniform_constant(d).unwrap()).unwrap();
        for k in 0..cfg.instances {
            let seed = instance_seed(cfg, d, 50_000 + k);
            let n = 4 + 2 * (seed % 7) as usize;
            let c = random_instance(seed, n, d).unwrap();
            let m = max_matching(&c).map_err(|e| e.to_string())?.total_weight;
            let stars = min_star(&c);
            let ss = weber::solve(&c, &WeberOptions::default()).steiner_length;
            let eta = stars.min_length / m;
            ensure(eta <= eta_max + 1e-6, || {
                format!("seed {seed}: eta {eta} > {eta_max}")
            })?;
            ensure(stars.min_length <= rho * ss * (1.0 + 1e-9), || {
                format!("seed {seed}: min S exceeds rho_upper * SS*")
            })?;
            ensure(ss <= steiner_factor * m * (1.0 + 1e-9), || {
                format!("seed {seed}: SS* {ss} exceeds {steiner_factor} max M {m}")
            })?;
        }
    }
    Ok(format!(
        "100 brute-force seeds, {} eta instances per dimension",
        cfg.instances
    ))
}

fn check_weiszfeld(cfg: &VerifyConfig) -> Result<String, String> {
    let tri = uniform_circle(3).unwrap();
    let square = Configuration::from_rows(vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
    ])
    .unwrap();
    let line =
        Configuration::from_rows(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
    let opts = WeberOptions {
        record_trace: true,
        ..Default::default()
    };
    let fixtures = [
        ("triangle", &tri, 3.0, None),
        ("square", &square, 2.0 * SQRT_2, None),
        ("collinear", &line, 2.0, Some(1)),
    ];
    for (name, c, want, anchor) in fixtures {
        let res = weber::solve(c, &opts);
        ensure(
            res.converged && (res.steiner_length - want).abs() <= 1e-8,
            || format!("{name}: SS* {} want {want}", res.steiner_length),
        )?;
        ensure(res.anchored_index == anchor, || {
            format!("{name}: anchor {:?}", res.anchored_index)
        })?;
    }
    let mut runs = 0;
    for d in [2usize, 3] {
        for k in 0..cfg.instances {
            let seed = instance_seed(cfg, d, k);
            let c = random_instance(seed, 3 + (seed % 30) as usize, d).unwrap();
            let res = weber::solve(&c, &opts);
            let slack = 4.0 * (c.len() + d) as f64 * f64::EPSILON;
            ensure(
                res.trace.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack)),
                || format!("seed {seed}: objective increased"),
            )?;
            runs += 1;
        }
    }
    Ok(format!("3 fixtures, monotone objective on {runs} runs"))
}
