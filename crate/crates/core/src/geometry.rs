//! Points, configurations and the normalized Weber frame.
//!
//! A [`Configuration`] is an ordered multiset of points in R^d. Everything
//! else in the crate is a function over configurations.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance (times the configuration diameter) below which a
/// candidate center is considered to coincide with an input point.
pub const FRAME_TOLERANCE: f64 = 1e-9;

/// A point in R^d with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some(&value) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoordinate { value });
        }
        Ok(Point(coords))
    }

    /// The origin of R^d.
    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim.max(1)])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

impl From<&Point> for Vec<f64> {
    fn from(p: &Point) -> Self {
        p.0.clone()
    }
}

/// An ordered list of `n >= 1` points sharing one dimension. Duplicates are allowed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Configuration {
    points: Vec<Point>,
    dim: usize,
}

impl Configuration {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyConfiguration)?.dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(Configuration { points, dim })
    }

    /// Builds a configuration from raw coordinate rows.
    pub fn from_rows<I, R>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: Into<Vec<f64>>,
    {
        let points = rows
            .into_iter()
            .map(|r| Point::new(r.into()))
            .collect::<Result<Vec<_>>>()?;
        Configuration::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Result<&Point> {
        self.points.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.points.len(),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.points.iter().map(|p| p.coords())
    }

    /// Coordinate-wise mean of the points.
    pub fn centroid(&self) -> Point {
        let mut acc = vec![0.0; self.dim];
        for p in self.iter() {
            for (a, x) in acc.iter_mut().zip(p) {
                *a += x;
            }
        }
        let n = self.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Point(acc)
    }

    /// Largest pairwise distance; 0 for a single point.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                best = best.max(dist(p.coords(), q.coords()));
            }
        }
        best
    }

    /// Applies `f` to every point, preserving order.
    pub fn map_points<F>(&self, mut f: F) -> Result<Configuration>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        Configuration::from_rows(self.iter().map(&mut f))
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Euclidean distance between two points of equal dimension.
pub fn distance(p: &Point, q: &Point) -> Result<f64> {
    check_dims(p.dim(), q.dim())?;
    Ok(dist(p.coords(), q.coords()))
}

/// Sum of `|p_i p_j|` over all unordered pairs `i < j`.
pub fn pairwise_distance_sum(c: &Configuration) -> f64 {
    let pts = c.points();
    pts.iter()
        .enumerate()
        .map(|(i, p)| {
            pts[i + 1..]
                .iter()
                .map(|q| dist(p.coords(), q.coords()))
                .sum::<f64>()
        })
        .sum()
}

/// A configuration translated so that the Weber center sits at the origin
/// and scaled so that the nearest point has norm 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeberFrame {
    pub config: Configuration,
    /// `(sum of norms) / n - 1`, i.e. `SS* = (1 + delta) n` in frame units.
    pub delta: f64,
    /// Index of the point closest to the center (smallest index on ties).
    pub nearest_index: usize,
    /// Distance from the original center to the nearest point, before scaling.
    pub scale: f64,
}

/// Moves `center` to the origin and rescales so the nearest point has unit norm.
pub fn to_weber_frame(c: &Configuration, center: &Point) -> Result<WeberFrame> {
    check_dims(c.dim(), center.dim())?;
    let origin = center.coords();
    let (nearest_index, scale) =
        c.iter()
            .map(|p| dist(p, origin))
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (i, r)| {
                    if r < best.1 {
                        (i, r)
                    } else {
                        best
                    }
                },
            );
    if scale <= FRAME_TOLERANCE * c.diameter() {
        return Err(Error::CenterCoincidesWithPoint {
            index: nearest_index,
        });
    }
    let config = c.map_points(|p| p.iter().zip(origin).map(|(x, o)| (x - o) / scale).collect())?;
    let norm_sum: f64 = config.iter().map(norm).sum();
    let delta = (norm_sum / c.len() as f64 - 1.0).max(0.0);
    Ok(WeberFrame {
        config,
        delta,
        nearest_index,
        scale,
    })
}

/// Radially projects every frame point onto the unit sphere (`q_i = p_i / |p_i|`).
pub fn project_to_unit_sphere(f: &WeberFrame) -> Configuration {
    f.config
        .map_points(|p| {
            let r = norm(p);
            p.iter().map(|x| x / r).collect()
        })
        .expect("frame points are finite and nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    fn cfg(rows: &[&[f64]]) -> Configuration {
        Configuration::from_rows(rows.iter().map(|r| r.to_vec())).unwrap()
    }

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&pt(&[0.0, 0.0]), &pt(&[3.0, 4.0])).unwrap(), 5.0);
        assert_eq!(distance(&pt(&[1.0, 0.0]), &pt(&[1.0, 0.0])).unwrap(), 0.0);
        assert_eq!(
            distance(&pt(&[1.0, 0.0, 0.0]), &pt(&[-1.0, 0.0, 0.0])).unwrap(),
            2.0
        );
    }

    #[test]
    fn distance_dimension_mismatch() {
        let err = distance(&pt(&[1.0, 0.0]), &pt(&[1.0, 0.0, 0.0])).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Point::new(vec![]).unwrap_err(), Error::ZeroDimension);
        assert!(matches!(
            Point::new(vec![f64::NAN]),
            Err(Error::NonFiniteCoordinate { .. })
        ));
        assert_eq!(
            Configuration::new(vec![]).unwrap_err(),
            Error::EmptyConfiguration
        );
        assert!(Configuration::from_rows(vec![vec![0.0, 1.0], vec![2.0]]).is_err());
    }

    #[test]
    fn pairwise_sum_examples() {
        let square = cfg(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]);
        assert!((pairwise_distance_sum(&square) - (4.0 + 2.0 * SQRT_2)).abs() < 1e-12);
        assert_eq!(pairwise_distance_sum(&cfg(&[&[5.0, 5.0]])), 0.0);

        // Regular 4-gon on the unit circle: four sides sqrt(2), two diameters 2.
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / 4.0;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let chords = 4.0 * SQRT_2 + 2.0 * 2.0;
        let sum = pairwise_distance_sum(&Configuration::from_rows(rows).unwrap());
        assert!((sum - chords).abs() < 1e-12);
        assert!((sum - 4.0 / (PI / 8.0).tan()).abs() < 1e-12);
        assert!((sum - 9.656854).abs() < 1e-6);
    }

    #[test]
    fn weber_frame_examples() {
        let square = cfg(&[&[1.0, 1.0], &[-1.0, 1.0], &[-1.0, -1.0], &[1.0, -1.0]]);
        let f = to_weber_frame(&square, &Point::origin(2)).unwrap();
        assert!(f.delta.abs() < 1e-15);
        assert!((f.scale - SQRT_2).abs() < 1e-15);
        for p in f.config.iter() {
            assert!((norm(p) - 1.0).abs() < 1e-15);
        }

        let kite = cfg(&[&[2.0, 0.0], &[0.0, 4.0], &[-2.0, 0.0], &[0.0, -4.0]]);
        let f = to_weber_frame(&kite, &Point::origin(2)).unwrap();
        assert_eq!(f.nearest_index, 0);
        assert!((f.delta - 0.5).abs() < 1e-15);

        let single = cfg(&[&[1.0, 0.0]]);
        assert_eq!(
            to_weber_frame(&single, &pt(&[1.0, 0.0])).unwrap_err(),
            Error::CenterCoincidesWithPoint { index: 0 }
        );
    }

    #[test]
    fn projection_examples() {
        // Frame of {(2,0),(0,3)} about the origin is {(1,0),(0,1.5)}.
        let f = to_weber_frame(&cfg(&[&[2.0, 0.0], &[0.0, 3.0]]), &Point::origin(2)).unwrap();
        let q = project_to_unit_sphere(&f);
        assert_eq!(q, cfg(&[&[1.0, 0.0], &[0.0, 1.0]]));

        let on_circle = cfg(&[&[1.0, 0.0], &[0.0, -1.0], &[-0.6, 0.8]]);
        let f = to_weber_frame(&on_circle, &Point::origin(2)).unwrap();
        let q = project_to_unit_sphere(&f);
        for (a, b) in q.iter().zip(on_circle.iter()) {
            assert!(dist(a, b) < 1e-15);
        }

        let f = to_weber_frame(&cfg(&[&[1.0, 1.0]]), &Point::origin(2)).unwrap();
        let q = project_to_unit_sphere(&f);
        let h = 1.0 / SQRT_2;
        assert!(dist(q.points()[0].coords(), &[h, h]) < 1e-15);
    }

    #[test]
    fn centroid_and_diameter() {
        let c = cfg(&[&[0.0, 0.0], &[2.0, 0.0], &[1.0, 3.0]]);
        assert_eq!(c.centroid().coords(), &[1.0, 1.0]);
        assert!((c.diameter() - 10f64.sqrt()).abs() < 1e-15);
        assert_eq!(cfg(&[&[1.0]]).diameter(), 0.0);
    }
}
