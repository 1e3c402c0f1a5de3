//! Weber center (geometric median) and minimum Steiner star length.
//!
//! The solver is Weiszfeld's fixed-point iteration with the Vardi–Zhang
//! modification for iterates that land on a data point. Before iterating,
//! every input point is tested against the vertex optimality condition
//! `|sum_{i: p_i != p_k} (p_k - p_i)/|p_k - p_i|| <= m_k`, where `m_k` is the
//! multiplicity of `p_k`; a point passing it is the Weber center.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{dist, norm, Configuration, Point};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 10_000;

/// Distance, relative to the diameter, at which an iterate counts as sitting
/// on a data point.
pub const SNAP_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    Centroid,
    At(Point),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeberOptions {
    /// Residual tolerance per point: interior convergence means
    /// `optimality_residual <= tol * n`.
    pub tol: f64,
    pub max_iters: usize,
    pub start: Start,
    /// Keep the objective value of every iterate in [`WeberResult::trace`].
    pub record_trace: bool,
}

impl Default for WeberOptions {
    fn default() -> Self {
        WeberOptions {
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
            start: Start::Centroid,
            record_trace: false,
        }
    }
}

impl WeberOptions {
    pub fn with_tol(tol: f64) -> Self {
        WeberOptions {
            tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeberResult {
    pub center: Point,
    /// `SS*`, the star length at `center`.
    pub steiner_length: f64,
    /// Norm of the unit-vector sum at an interior center; for an anchored
    /// center, the norm of the pull exerted by the other points.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub anchored_index: Option<usize>,
    #[serde(skip)]
    pub trace: Vec<f64>,
}

impl WeberResult {
    pub fn into_converged(self) -> Result<WeberResult> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                residual: self.residual,
            })
        }
    }
}

/// Sum of distances from `x` to every point.
pub fn steiner_star_length(c: &Configuration, x: &Point) -> Result<f64> {
    if x.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: x.dim(),
        });
    }
    Ok(objective(c.iter(), x.coords()))
}

fn objective<'a>(points: impl Iterator<Item = &'a [f64]>, x: &[f64]) -> f64 {
    points.map(|p| dist(p, x)).sum()
}

/// Norm of `sum_i (x - p_i) / |x - p_i|`.
pub fn optimality_residual(c: &Configuration, x: &Point) -> Result<f64> {
    if x.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: x.dim(),
        });
    }
    let snap = SNAP_TOLERANCE * c.diameter();
    let mut sum = vec![0.0; c.dim()];
    for (i, p) in c.iter().enumerate() {
        let r = dist(p, x.coords());
        if r <= snap {
            return Err(Error::CenterCoincidesWithPoint { index: i });
        }
        for ((s, xi), pi) in sum.iter_mut().zip(x.coords()).zip(p) {
            *s += (xi - pi) / r;
        }
    }
    Ok(norm(&sum))
}

/// Pull of the other points on `p_k`, together with the multiplicity of `p_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexPull {
    /// `|sum_{i: p_i != p_k} (p_k - p_i)/|p_k - p_i||`.
    pub norm: f64,
    pub multiplicity: usize,
}

impl VertexPull {
    pub fn is_optimal(&self, tol: f64) -> bool {
        self.norm <= self.multiplicity as f64 + tol
    }
}

/// Evaluates the vertex optimality condition at input point `k`.
pub fn vertex_pull(c: &Configuration, k: usize) -> Result<VertexPull> {
    let pk = c.point(k)?.coords();
    let snap = SNAP_TOLERANCE * c.diameter();
    Ok(pull_at(c.iter(), pk, snap))
}

fn pull_at<'a>(points: impl Iterator<Item = &'a [f64]>, x: &[f64], snap: f64) -> VertexPull {
    let mut sum = vec![0.0; x.len()];
    let mut multiplicity = 0;
    for p in points {
        let r = dist(p, x);
        if r <= snap {
            multiplicity += 1;
            continue;
        }
        for ((s, xi), pi) in sum.iter_mut().zip(x).zip(p) {
            *s += (xi - pi) / r;
        }
    }
    VertexPull {
        norm: norm(&sum),
        multiplicity,
    }
}

/// Weiszfeld with default options (centroid start, tol 1e-10, 10 000 iterations).
pub fn weiszfeld(c: &Configuration, tol: f64, max_iters: usize) -> WeberResult {
    solve(
        c,
        &WeberOptions {
            tol,
            max_iters,
            ..Default::default()
        },
    )
}

/// Approximates the Weber center of `c`.
///
/// Never fails: a run that exhausts `max_iters` comes back with
/// `converged == false` and the last iterate. Use
/// [`WeberResult::into_converged`] to turn that into an error.
pub fn solve(c: &Configuration, opts: &WeberOptions) -> WeberResult {
    let n = c.len();
    let dim = c.dim();
    let diameter = c.diameter();

    if n == 1 || diameter == 0.0 {
        return anchored(c, 0, 0.0, 0, opts);
    }
    if n == 2 {
        let a = c.points()[0].coords();
        let b = c.points()[1].coords();
        let mid = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        let center = Point::new(mid).expect("midpoint of finite points");
        let length = objective(c.iter(), center.coords());
        return WeberResult {
            center,
            steiner_length: length,
            residual: 0.0,
            iterations: 0,
            converged: true,
            anchored_index: None,
            trace: if opts.record_trace {
                vec![length]
            } else {
                Vec::new()
            },
        };
    }

    // Work in coordinates centred on the centroid and scaled to unit diameter.
    let shift = c.centroid().into_coords();
    let to_local = |p: &[f64]| -> Vec<f64> {
        p.iter()
            .zip(&shift)
            .map(|(x, s)| (x - s) / diameter)
            .collect()
    };
    let pts: Vec<Vec<f64>> = c.iter().map(to_local).collect();
    let local = || pts.iter().map(Vec::as_slice);
    let snap = SNAP_TOLERANCE;

    for (k, p) in pts.iter().enumerate() {
        let pull = pull_at(local(), p, snap);
        if pull.is_optimal(opts.tol) {
            return anchored(c, k, pull.norm, 0, opts);
        }
    }

    let mut x = match &opts.start {
        Start::Centroid => vec![0.0; dim],
        Start::At(p) if p.dim() == dim => to_local(p.coords()),
        Start::At(_) => vec![0.0; dim],
    };
    let mut f = objective(local(), &x);
    let mut trace = Vec::new();
    if opts.record_trace {
        trace.push(f * diameter);
    }
    // Rounding noise allowed in the per-step monotonicity check.
    let slack = 4.0 * (n + dim) as f64 * f64::EPSILON;

    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut num = vec![0.0; dim];
    let mut pull = vec![0.0; dim];

    while iterations < opts.max_iters {
        num.iter_mut().for_each(|v| *v = 0.0);
        pull.iter_mut().for_each(|v| *v = 0.0);
        let mut weight = 0.0;
        let mut coincident = None;
        let mut multiplicity = 0usize;
        for (i, p) in local().enumerate() {
            let r = dist(p, &x);
            if r <= snap {
                coincident.get_or_insert(i);
                multiplicity += 1;
                continue;
            }
            let w = 1.0 / r;
            weight += w;
            for j in 0..dim {
                num[j] += w * p[j];
                pull[j] += w * (p[j] - x[j]);
            }
        }
        let pull_norm = norm(&pull);

        let next: Vec<f64> = match coincident {
            None => {
                residual = pull_norm;
                if residual <= opts.tol * n as f64 {
                    converged = true;
                    break;
                }
                let plain: Vec<f64> = num.iter().map(|v| v / weight).collect();
                // Weiszfeld is only linear on nearly flat objectives (almost
                // collinear inputs); take a Newton step whenever it does better.
                match newton_step(local(), &x, &pull) {
                    Some(z) if objective(local(), &z) < objective(local(), &plain) => z,
                    _ => plain,
                }
            }
            Some(k) => {
                let m = multiplicity as f64;
                if pull_norm <= m + opts.tol {
                    return anchored(c, k, pull_norm, iterations, opts);
                }
                // Vardi–Zhang step away from the data point.
                let t = m / pull_norm;
                num.iter()
                    .zip(&x)
                    .map(|(v, xi)| (1.0 - t) * v / weight + t * xi)
                    .collect()
            }
        };
        iterations += 1;
        if next == x {
            break;
        }
        let f_next = objective(local(), &next);
        debug_assert!(
            f_next <= f * (1.0 + slack),
            "Weiszfeld objective increased: {f} -> {f_next}"
        );
        x = next;
        f = f_next;
        if opts.record_trace {
            trace.push(f * diameter);
        }
    }

    if !converged {
        let mut sum = vec![0.0; dim];
        for p in local() {
            let r = dist(p, &x);
            if r > snap {
                for j in 0..dim {
                    sum[j] += (x[j] - p[j]) / r;
                }
            }
        }
        residual = norm(&sum);
    }

    let center: Vec<f64> = x
        .iter()
        .zip(&shift)
        .map(|(v, s)| v * diameter + s)
        .collect();
    let center = Point::new(center).expect("iterates stay finite");
    let steiner_length = objective(c.iter(), center.coords());
    WeberResult {
        center,
        steiner_length,
        residual,
        iterations,
        converged,
        anchored_index: None,
        trace,
    }
}

/// `x + H^{-1} pull`, with `H = sum_i (I - u_i u_i^T) / r_i` the Hessian of
/// the star length at an interior `x`. `None` if `H` is numerically singular.
fn newton_step<'a>(
    pts: impl Iterator<Item = &'a [f64]>,
    x: &[f64],
    pull: &[f64],
) -> Option<Vec<f64>> {
    let dim = x.len();
    let mut h = vec![vec![0.0; dim]; dim];
    for p in pts {
        let u: Vec<f64> = p.iter().zip(x).map(|(a, b)| a - b).collect();
        let r = norm(&u);
        for (a, row) in h.iter_mut().enumerate() {
            row[a] += 1.0 / r;
            for (b, v) in row.iter_mut().enumerate() {
                *v -= u[a] * u[b] / (r * r * r);
            }
        }
    }
    let step = cholesky_solve(h, pull)?;
    Some(x.iter().zip(&step).map(|(a, b)| a + b).collect())
}

/// Solves `A y = b` for small symmetric positive definite `A`.
fn cholesky_solve(mut a: Vec<Vec<f64>>, b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = (0..n).map(|i| a[i][i]).fold(0.0, f64::max);
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
    for j in 0..n {
        let d = a[j][j] - dot(&a[j][..j], &a[j][..j]);
        if d.is_nan() || d <= 1e-14 * scale {
            return None;
        }
        let d = d.sqrt();
        a[j][j] = d;
        for i in j + 1..n {
            a[i][j] = (a[i][j] - dot(&a[i][..j], &a[j][..j])) / d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        y[i] = (y[i] - dot(&a[i][..i], &y[..i])) / a[i][i];
    }
    for i in (0..n).rev() {
        let tail: f64 = (i + 1..n).map(|k| a[k][i] * y[k]).sum();
        y[i] = (y[i] - tail) / a[i][i];
    }
    Some(y)
}

fn anchored(
    c: &Configuration,
    k: usize,
    pull: f64,
    iterations: usize,
    opts: &WeberOptions,
) -> WeberResult {
    let center = c.points()[k].clone();
    let steiner_length = objective(c.iter(), center.coords());
    WeberResult {
        center,
        steiner_length,
        residual: pull,
        iterations,
        converged: true,
        anchored_index: Some(k),
        trace: if opts.record_trace {
            vec![steiner_length]
        } else {
            Vec::new()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

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

    fn triangle() -> Configuration {
        circle(3)
    }

    #[test]
    fn residual_examples() {
        let r = optimality_residual(&triangle(), &Point::origin(2)).unwrap();
        assert!(r < 1e-12);

        let pair = cfg(&[&[-1.0, 0.0], &[1.0, 0.0]]);
        let x = Point::new(vec![0.0, 1.0]).unwrap();
        let r = optimality_residual(&pair, &x).unwrap();
        assert!((r - SQRT_2).abs() < 1e-15);

        for n in [5, 12, 31] {
            assert!(optimality_residual(&circle(n), &Point::origin(2)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn residual_rejects_coincident_center() {
        let pair = cfg(&[&[-1.0, 0.0], &[1.0, 0.0]]);
        let x = Point::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(
            optimality_residual(&pair, &x).unwrap_err(),
            Error::CenterCoincidesWithPoint { index: 1 }
        );
    }

    #[test]
    fn star_length_examples() {
        let h = SQRT_2 / 2.0;
        let square = cfg(&[&[h, h], &[-h, h], &[-h, -h], &[h, -h]]);
        let len = steiner_star_length(&square, &Point::origin(2)).unwrap();
        assert!((len - 4.0).abs() < 1e-15);

        let pair = cfg(&[&[0.0, 0.0], &[3.0, 4.0]]);
        let len = steiner_star_length(&pair, &Point::new(vec![3.0, 4.0]).unwrap()).unwrap();
        assert_eq!(len, 5.0);

        let len = steiner_star_length(&circle(17), &Point::origin(2)).unwrap();
        assert!((len - 17.0).abs() < 1e-13);
    }

    #[test]
    fn collinear_triple_anchors_at_median() {
        let c = cfg(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0]]);
        let res = weiszfeld(&c, DEFAULT_TOL, DEFAULT_MAX_ITERS);
        assert!(res.converged);
        assert_eq!(res.anchored_index, Some(1));
        assert_eq!(res.center.coords(), &[1.0, 0.0]);
        assert!((res.steiner_length - 2.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_fixtures() {
        let res = weiszfeld(&triangle(), DEFAULT_TOL, DEFAULT_MAX_ITERS);
        assert!(res.converged && res.anchored_index.is_none());
        assert!((res.steiner_length - 3.0).abs() < 1e-12);
        assert!(norm(res.center.coords()) < 1e-12);

        let square = cfg(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]);
        let res = weiszfeld(&square, DEFAULT_TOL, DEFAULT_MAX_ITERS);
        assert!(res.converged);
        assert!((res.steiner_length - 2.0 * SQRT_2).abs() < 1e-12);
        assert!(dist(res.center.coords(), &[0.5, 0.5]) < 1e-12);
    }

    #[test]
    fn degenerate_sizes() {
        let one = cfg(&[&[3.0, -1.0]]);
        let res = weiszfeld(&one, DEFAULT_TOL, DEFAULT_MAX_ITERS);
        assert_eq!(res.anchored_index, Some(0));
        assert_eq!(res.steiner_length, 0.0);
        assert!(res.converged);

        let two = cfg(&[&[0.0, 0.0], &[2.0, 4.0]]);
        let res = weiszfeld(&two, DEFAULT_TOL, DEFAULT_MAX_ITERS);
        assert_eq!(res.center.coords(), &[1.0, 2.0]);
        assert_eq!(res.anchored_index, None);
        assert!((res.steiner_length - 20f64.sqrt()).abs() < 1e-14);

        let same = cfg(&[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]]);
        let res = weiszfeld(&same, DEFAULT_TOL, DEFAULT_MAX_ITERS);
        assert_eq!(res.anchored_index, Some(0));
        assert_eq!(res.steiner_length, 0.0);
    }

    #[test]
    fn heavy_duplicate_point_is_the_median() {
        // Three copies at the origin outweigh the pull of two other points.
        let c = cfg(&[
            &[1.0, 0.0],
            &[0.0, 0.0],
            &[0.0, 0.0],
            &[0.0, 0.0],
            &[0.0, 1.0],
        ]);
        let res = weiszfeld(&c, DEFAULT_TOL, DEFAULT_MAX_ITERS);
        assert_eq!(res.anchored_index, Some(1));
        assert!((res.steiner_length - 2.0).abs() < 1e-15);
        let pull = vertex_pull(&c, 1).unwrap();
        assert_eq!(pull.multiplicity, 3);
        assert!(pull.is_optimal(0.0));
    }

    #[test]
    fn start_on_a_data_point_steps_off() {
        let square = cfg(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]);
        let opts = WeberOptions {
            start: Start::At(Point::new(vec![1.0, 1.0]).unwrap()),
            record_trace: true,
            ..Default::default()
        };
        let res = solve(&square, &opts);
        assert!(res.converged);
        assert!((res.steiner_length - 2.0 * SQRT_2).abs() < 1e-12);
        assert!(res.trace.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-14)));
    }

    #[test]
    fn exhausted_iterations_report_not_converged() {
        let c = cfg(&[
            &[0.0, 0.0],
            &[4.0, 0.0],
            &[0.0, 3.0],
            &[5.0, 5.0],
            &[-1.0, 2.0],
        ]);
        let res = weiszfeld(&c, 1e-15, 2);
        assert!(!res.converged);
        assert_eq!(res.iterations, 2);
        assert!(matches!(
            res.into_converged(),
            Err(Error::NotConverged { iterations: 2, .. })
        ));
    }

    #[test]
    fn nearly_collinear_converges_quickly() {
        let c = cfg(&[
            &[3.0327757049894144, -0.28893012210227326],
            &[-4.026321889777143, -0.05267664234025519],
            &[3.1767742744376117, -0.4109840393294153],
            &[-2.826849693410572, -0.4078874646925316],
        ]);
        let res = solve(&c, &WeberOptions::default());
        assert!(res.converged);
        assert!(res.iterations < 100, "{} iterations", res.iterations);
        assert!(optimality_residual(&c, &res.center).unwrap() <= 4e-10);
    }
}
