//! Seeded hill climbing over point configurations.
//!
//! Two objectives are supported: the star Steiner ratio `min S / SS*` of a
//! free configuration, and the pairwise distance sum of points constrained
//! to the unit sphere.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`). Every restart
//! `r` draws from the generator seeded with `seed` on stream `r`, so restarts
//! are independent of each other and of execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{conjectured_rho2, g2_closed_form};
use crate::error::{Error, Result};
use crate::geometry::{dist, norm, pairwise_distance_sum, Configuration};
use crate::stars::star_steiner_ratio;
use crate::weber::WeberOptions;

/// Weiszfeld tolerance used when scoring candidates.
pub const RATIO_SOLVER_TOL: f64 = 1e-9;
/// Excess over the closed form `G(2, n)` that is reported as a counterexample.
pub const SPHERE_SUM_SLACK: f64 = 1e-6;
/// Excess over the conjectured `rho_2(n)` that is reported as a counterexample.
pub const STEINER_RATIO_SLACK: f64 = 1e-4;

const CHECKPOINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    SteinerRatio,
    SphereSum,
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "steiner_ratio" => Ok(Objective::SteinerRatio),
            "sphere_sum" => Ok(Objective::SphereSum),
            other => Err(Error::InvalidArgument(format!(
                "unknown objective {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepSchedule {
    pub initial: f64,
    /// Per-iteration geometric decay factor in (0, 1].
    pub decay: f64,
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule {
            initial: 0.3,
            decay: 0.999,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchSpec {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    /// Iterations per restart.
    pub iterations: usize,
    pub objective: Objective,
    pub step_schedule: StepSchedule,
    pub restarts: usize,
}

impl SearchSpec {
    pub fn new(objective: Objective, n: usize, d: usize, seed: u64, iterations: usize) -> Self {
        SearchSpec {
            n,
            d,
            seed,
            iterations,
            objective,
            step_schedule: StepSchedule::default(),
            restarts: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n < 2 {
            return bad(format!("search needs n >= 2, got {}", self.n));
        }
        if self.d < 2 {
            return bad(format!("search needs d >= 2, got {}", self.d));
        }
        if self.iterations < 1 {
            return bad("search needs at least one iteration".into());
        }
        if self.restarts < 1 {
            return bad("search needs at least one restart".into());
        }
        let StepSchedule { initial, decay } = self.step_schedule;
        if !(initial > 0.0 && initial.is_finite()) {
            return bad(format!("initial step must be positive, got {initial}"));
        }
        if !(decay > 0.0 && decay <= 1.0) {
            return bad(format!("decay must lie in (0, 1], got {decay}"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub spec: SearchSpec,
    pub best_config: Configuration,
    pub best_value: f64,
    /// Closed form or conjectured extremum for this `(n, d)`, when known.
    pub reference_value: Option<f64>,
    /// `(iteration, best value so far)` checkpoints of the winning restart.
    pub history: Vec<(usize, f64)>,
    /// Restart index that produced `best_config`.
    pub best_restart: usize,
    /// Candidates dropped because the Weber solver did not converge.
    pub skipped: usize,
    /// Set when `best_value` exceeds `reference_value` beyond the slack.
    pub counterexample: bool,
}

impl SearchResult {
    pub fn history_csv(&self) -> String {
        let mut out = String::from("iteration,value\n");
        for (it, v) in &self.history {
            out.push_str(&format!("{it},{v}\n"));
        }
        out
    }
}

/// Objective value of a configuration, recomputed from scratch.
pub fn evaluate(objective: Objective, c: &Configuration) -> Result<f64> {
    match objective {
        Objective::SphereSum => Ok(pairwise_distance_sum(c)),
        Objective::SteinerRatio => star_steiner_ratio(c, &WeberOptions::with_tol(RATIO_SOLVER_TOL)),
    }
}

/// `n` points at angles `2 pi i / n` on the unit circle.
pub fn uniform_circle(n: usize) -> Result<Configuration> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "uniform circle needs n >= 2, got {n}"
        )));
    }
    Configuration::from_rows((0..n).map(|i| {
        let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        vec![a.cos(), a.sin()]
    }))
}

fn gaussian_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vec(rng, d);
        let r = norm(&v);
        if r > 1e-12 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// `n` independent uniform points on the unit sphere in R^d, from normalized
/// Gaussian vectors.
pub fn uniform_sphere(n: usize, d: usize, seed: u64) -> Result<Configuration> {
    if n < 2 || d < 2 {
        return Err(Error::InvalidArgument(format!(
            "uniform sphere needs n >= 2 and d >= 2, got n={n}, d={d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Configuration::from_rows((0..n).map(|_| random_unit(&mut rng, d)))
}

/// Seeded random test configuration of `n` points in R^d. The seed picks
/// one of four families: uniform in the unit cube, isotropic Gaussian,
/// a noisy unit sphere (small `delta` instances), or two separated clusters.
pub fn random_instance(seed: u64, n: usize, d: usize) -> Result<Configuration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = seed % 4;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| match family {
            0 => (0..d).map(|_| rng.random::<f64>()).collect(),
            1 => gaussian_vec(&mut rng, d),
            2 => {
                let r = 1.0 + 0.2 * rng.random::<f64>();
                random_unit(&mut rng, d)
                    .into_iter()
                    .map(|x| r * x)
                    .collect()
            }
            _ => {
                let offset = if i % 2 == 0 { 3.0 } else { -3.0 };
                gaussian_vec(&mut rng, d)
                    .into_iter()
                    .enumerate()
                    .map(|(k, x)| 0.5 * x + if k == 0 { offset } else { 0.0 })
                    .collect()
            }
        })
        .collect();
    Configuration::from_rows(rows)
}

/// Runs every restart and keeps the best. Ties go to the smaller restart index.
pub fn maximize(spec: &SearchSpec) -> Result<SearchResult> {
    spec.validate()?;
    let runs: Vec<Run> = (0..spec.restarts)
        .into_par_iter()
        .map(|r| run_restart(spec, r as u64))
        .collect();
    let skipped = runs.iter().map(|r| r.skipped).sum();
    let (best_restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.value > a.1.value { b } else { a })
        .expect("at least one restart");

    let best_config = Configuration::from_rows(best.points)?;
    let best_value = evaluate(spec.objective, &best_config)?;
    let reference_value = match (spec.objective, spec.d) {
        (Objective::SphereSum, 2) => Some(g2_closed_form(spec.n)?),
        (Objective::SteinerRatio, 2) => Some(conjectured_rho2(spec.n)?),
        _ => None,
    };
    let slack = match spec.objective {
        Objective::SphereSum => SPHERE_SUM_SLACK,
        Objective::SteinerRatio => STEINER_RATIO_SLACK,
    };
    let counterexample = reference_value.is_some_and(|r| best_value > r + slack);
    Ok(SearchResult {
        spec: spec.clone(),
        best_config,
        best_value,
        reference_value,
        history: best.history,
        best_restart,
        skipped,
        counterexample,
    })
}

struct Run {
    points: Vec<Vec<f64>>,
    value: f64,
    history: Vec<(usize, f64)>,
    skipped: usize,
}

fn checkpoint_every(iterations: usize) -> usize {
    (iterations / CHECKPOINTS).max(1)
}

fn run_restart(spec: &SearchSpec, restart: u64) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(restart);
    match spec.objective {
        Objective::SphereSum => climb_sphere_sum(spec, &mut rng),
        Objective::SteinerRatio => climb_steiner_ratio(spec, &mut rng),
    }
}

fn climb_sphere_sum(spec: &SearchSpec, rng: &mut ChaCha8Rng) -> Run {
    let (n, d) = (spec.n, spec.d);
    let mut pts: Vec<Vec<f64>> = (0..n).map(|_| random_unit(rng, d)).collect();
    let mut value: f64 = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| dist(&pts[i], &pts[j]))
        .sum();
    let every = checkpoint_every(spec.iterations);
    let mut history = vec![(0, value)];
    let mut step = spec.step_schedule.initial;

    for it in 1..=spec.iterations {
        let i = rng.random_range(0..n);
        let noise = gaussian_vec(rng, d);
        let moved: Vec<f64> = pts[i]
            .iter()
            .zip(&noise)
            .map(|(x, e)| x + step * e)
            .collect();
        let r = norm(&moved);
        if r > 1e-12 {
            let moved: Vec<f64> = moved.into_iter().map(|x| x / r).collect();
            let gain: f64 = pts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| dist(&moved, q) - dist(&pts[i], q))
                .sum();
            if gain > 0.0 {
                pts[i] = moved;
                value += gain;
            }
        }
        step *= spec.step_schedule.decay;
        if it % every == 0 || it == spec.iterations {
            history.push((it, value));
        }
    }
    Run {
        points: pts,
        value,
        history,
        skipped: 0,
    }
}

/// Centers at the centroid and rescales to diameter 2.
fn normalize(pts: &mut [Vec<f64>]) {
    let d = pts[0].len();
    let n = pts.len() as f64;
    let mut mean = vec![0.0; d];
    for p in pts.iter() {
        for (m, x) in mean.iter_mut().zip(p) {
            *m += x / n;
        }
    }
    let mut diameter = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            diameter = diameter.max(dist(p, q));
        }
    }
    if diameter == 0.0 {
        return;
    }
    let s = 2.0 / diameter;
    for p in pts.iter_mut() {
        for (x, m) in p.iter_mut().zip(&mean) {
            *x = (*x - m) * s;
        }
    }
}

fn ratio_of(pts: &[Vec<f64>]) -> Option<f64> {
    let c = Configuration::from_rows(pts.iter().cloned()).ok()?;
    evaluate(Objective::SteinerRatio, &c).ok()
}

fn climb_steiner_ratio(spec: &SearchSpec, rng: &mut ChaCha8Rng) -> Run {
    let (n, d) = (spec.n, spec.d);
    let mut skipped = 0;
    let (mut pts, mut value) = loop {
        let mut pts: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vec(rng, d)).collect();
        normalize(&mut pts);
        match ratio_of(&pts) {
            Some(v) => break (pts, v),
            None => skipped += 1,
        }
    };
    let every = checkpoint_every(spec.iterations);
    let mut history = vec![(0, value)];
    let mut step = spec.step_schedule.initial;

    for it in 1..=spec.iterations {
        let i = rng.random_range(0..n);
        let noise = gaussian_vec(rng, d);
        let mut candidate = pts.clone();
        for (x, e) in candidate[i].iter_mut().zip(&noise) {
            *x += step * e;
        }
        normalize(&mut candidate);
        match ratio_of(&candidate) {
            Some(v) if v > value => {
                pts = candidate;
                value = v;
            }
            Some(_) => {}
            None => skipped += 1,
        }
        step *= spec.step_schedule.decay;
        if it % every == 0 || it == spec.iterations {
            history.push((it, value));
        }
    }
    Run {
        points: pts,
        value,
        history,
        skipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stars::ratio_report;

    #[test]
    fn circle_generator() {
        let sq = uniform_circle(4).unwrap();
        let expected = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (p, e) in sq.iter().zip(expected) {
            assert!(dist(p, &e) < 1e-15);
        }
        let pair = uniform_circle(2).unwrap();
        assert!((dist(pair.points()[0].coords(), pair.points()[1].coords()) - 2.0).abs() < 1e-15);
        let r = ratio_report(&uniform_circle(3).unwrap()).unwrap();
        assert!((r.ratio - 2.0 / 3f64.sqrt()).abs() < 1e-9);
        assert!(uniform_circle(1).is_err());
    }

    #[test]
    fn sphere_generator() {
        let a = uniform_sphere(50, 4, 7).unwrap();
        for p in a.iter() {
            assert!((norm(p) - 1.0).abs() < 1e-12);
        }
        assert_eq!(a, uniform_sphere(50, 4, 7).unwrap());
        assert_ne!(a, uniform_sphere(50, 4, 8).unwrap());
        assert!(uniform_sphere(1, 3, 0).is_err());
        assert!(uniform_sphere(3, 1, 0).is_err());
    }

    #[test]
    fn spec_validation() {
        let mut s = SearchSpec::new(Objective::SphereSum, 4, 2, 0, 10);
        assert!(s.validate().is_ok());
        s.step_schedule.decay = 0.0;
        assert!(s.validate().is_err());
        s.step_schedule.decay = 1.5;
        assert!(s.validate().is_err());
        let s = SearchSpec::new(Objective::SphereSum, 1, 2, 0, 10);
        assert!(maximize(&s).is_err());
        let s = SearchSpec::new(Objective::SphereSum, 4, 2, 0, 0);
        assert!(maximize(&s).is_err());
        assert_eq!(
            "sphere_sum".parse::<Objective>().unwrap(),
            Objective::SphereSum
        );
        assert!("nope".parse::<Objective>().is_err());
    }

    #[test]
    fn small_sphere_sum_search_is_deterministic_and_monotone() {
        let spec = SearchSpec::new(Objective::SphereSum, 5, 3, 42, 2_000);
        let a = maximize(&spec).unwrap();
        let b = maximize(&spec).unwrap();
        assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
        assert_eq!(a.best_config, b.best_config);
        assert!(a.history.windows(2).all(|w| w[1].1 >= w[0].1));
        let recomputed = pairwise_distance_sum(&a.best_config);
        assert!((a.best_value - recomputed).abs() <= 1e-9 * recomputed);
        assert!(a.reference_value.is_none());
        assert!(a.history_csv().starts_with("iteration,value\n0,"));
    }
}
