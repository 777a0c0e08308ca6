//! The d-dimensional unit torus `[0,1)^d` under the ∞-norm.
//!
//! Balls in this metric are axis-aligned cubes with wraparound, so the
//! volume of a ball of radius `r <= 1/2` is exactly `(2r)^d` and the
//! radius/volume conversion is closed-form.

use crate::error::{Error, Result};

/// Wrap a coordinate into `[0, 1)`.
#[inline]
pub fn wrap01(x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs.
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// A point on the torus. Coordinates are reduced mod 1 on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("point needs at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        Ok(Point {
            coords: coords.into_iter().map(wrap01).collect(),
        })
    }

    pub fn origin(dim: usize) -> Self {
        Point {
            coords: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// ∞-norm torus distance between two coordinate slices of equal length.
///
/// Hot-path variant without the dimension check; callers guarantee equal
/// lengths.
#[inline]
pub(crate) fn torus_distance_unchecked(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        let diff = (x - y).abs();
        let axis = if diff > 0.5 { 1.0 - diff } else { diff };
        if axis > worst {
            worst = axis;
        }
    }
    worst
}

/// ∞-norm distance from the origin.
#[inline]
pub(crate) fn torus_norm_unchecked(a: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for &x in a {
        let axis = if x > 0.5 { 1.0 - x } else { x };
        if axis > worst {
            worst = axis;
        }
    }
    worst
}

/// ∞-norm torus distance: `max_i min(|x_i - y_i|, 1 - |x_i - y_i|)`.
pub fn torus_distance(x: &Point, y: &Point) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    Ok(torus_distance_unchecked(x.coords(), y.coords()))
}

/// Radius of the ∞-norm ball of a given volume: `v^(1/d) / 2`.
pub fn ball_radius_for_volume(v: f64, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::invalid(format!(
            "ball volume must lie in (0, 1], got {v}"
        )));
    }
    Ok(v.powf(1.0 / d as f64) / 2.0)
}

/// A closed ∞-norm ball. The radius is capped at 1/2, at which point the
/// ball covers the whole torus.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    center: Point,
    radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius < 0.0 {
            return Err(Error::invalid(format!(
                "ball radius must be a finite non-negative real, got {radius}"
            )));
        }
        Ok(Ball {
            center,
            radius: radius.min(0.5),
        })
    }

    /// The full torus around a given center.
    pub fn full(dim: usize) -> Self {
        Ball {
            center: Point::origin(dim),
            radius: 0.5,
        }
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Exact volume: `min((2r)^d, 1)`.
    pub fn volume(&self) -> f64 {
        ((2.0 * self.radius).powi(self.dim() as i32)).min(1.0)
    }

    pub fn is_full(&self) -> bool {
        self.radius >= 0.5
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), x.dim()));
        }
        Ok(torus_distance_unchecked(self.center.coords(), x.coords()) <= self.radius)
    }

    #[inline]
    pub(crate) fn contains_coords(&self, coords: &[f64]) -> bool {
        torus_distance_unchecked(self.center.coords(), coords) <= self.radius
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{tag, Stream};

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn distance_matches_hand_computation() {
        let x = pt(&[0.1, 0.2]);
        let y = pt(&[0.95, 0.25]);
        assert!((torus_distance(&x, &y).unwrap() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn distance_to_self_is_zero() {
        let x = pt(&[0.3, 0.7, 0.11]);
        assert_eq!(torus_distance(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn antipodal_distance_is_half() {
        let x = pt(&[0.0]);
        let y = pt(&[0.5]);
        assert_eq!(torus_distance(&x, &y).unwrap(), 0.5);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let x = pt(&[0.0]);
        let y = pt(&[0.0, 0.0]);
        assert!(torus_distance(&x, &y).is_err());
    }

    #[test]
    fn negative_coordinates_wrap() {
        let x = Point::new(vec![-0.25, 1.5]).unwrap();
        assert!((x.coords()[0] - 0.75).abs() < 1e-12);
        assert!((x.coords()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn radius_for_volume_examples() {
        assert!((ball_radius_for_volume(1.0, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((ball_radius_for_volume(0.01, 1).unwrap() - 0.005).abs() < 1e-15);
        assert!((ball_radius_for_volume(1e-6, 2).unwrap() - 5e-4).abs() < 1e-15);
        assert!(ball_radius_for_volume(0.0, 2).is_err());
        assert!(ball_radius_for_volume(1.1, 2).is_err());
    }

    #[test]
    fn volume_roundtrips_through_radius() {
        for &v in &[1e-6, 1e-3, 0.04, 0.5, 1.0] {
            for d in 1..=4 {
                let r = ball_radius_for_volume(v, d).unwrap();
                let b = Ball::new(Point::origin(d), r).unwrap();
                assert!((b.volume() - v).abs() < 1e-12, "v={v} d={d}");
            }
        }
    }

    #[test]
    fn full_ball_contains_everything() {
        let b = Ball::new(Point::origin(2), 0.9).unwrap();
        assert_eq!(b.radius(), 0.5);
        assert!(b.contains(&pt(&[0.49, 0.51])).unwrap());
    }

    #[test]
    fn contains_wraps_around() {
        let b = Ball::new(Point::origin(1), 0.1).unwrap();
        assert!(b.contains(&pt(&[0.95])).unwrap());
        assert!(!b.contains(&pt(&[0.2])).unwrap());
    }

    #[test]
    fn metric_axioms_on_random_triples() {
        let mut s = Stream::new(7, tag::POSITION, &[]);
        for _ in 0..10_000 {
            let d = 1 + (s.next_u64() % 4) as usize;
            let a = pt(&(0..d).map(|_| s.next_unit()).collect::<Vec<_>>());
            let b = pt(&(0..d).map(|_| s.next_unit()).collect::<Vec<_>>());
            let c = pt(&(0..d).map(|_| s.next_unit()).collect::<Vec<_>>());
            let ab = torus_distance(&a, &b).unwrap();
            let ba = torus_distance(&b, &a).unwrap();
            let ac = torus_distance(&a, &c).unwrap();
            let cb = torus_distance(&c, &b).unwrap();
            assert_eq!(ab, ba);
            assert!(ab <= 0.5 + 1e-15);
            assert!(ab >= 0.0);
            assert!(ab <= ac + cb + 1e-12, "triangle inequality violated");
            assert_eq!(torus_distance(&a, &a).unwrap(), 0.0);
        }
    }

    #[test]
    fn distance_is_translation_invariant() {
        let mut s = Stream::new(11, tag::POSITION, &[]);
        for _ in 0..1000 {
            let d = 1 + (s.next_u64() % 3) as usize;
            let a: Vec<f64> = (0..d).map(|_| s.next_unit()).collect();
            let b: Vec<f64> = (0..d).map(|_| s.next_unit()).collect();
            let shift: Vec<f64> = (0..d).map(|_| 2.0 * s.next_unit() - 1.0).collect();
            let base = torus_distance(&pt(&a), &pt(&b)).unwrap();
            let sa: Vec<f64> = a.iter().zip(&shift).map(|(x, s)| x + s).collect();
            let sb: Vec<f64> = b.iter().zip(&shift).map(|(x, s)| x + s).collect();
            let shifted = torus_distance(&pt(&sa), &pt(&sb)).unwrap();
            assert!((base - shifted).abs() < 1e-9);
        }
    }

    #[test]
    fn monte_carlo_volume_matches_target() {
        let mut s = Stream::new(99, tag::POSITION, &[]);
        for &(v, d) in &[(0.37, 2usize), (0.05, 1), (0.2, 3)] {
            let r = ball_radius_for_volume(v, d).unwrap();
            let ball = Ball::new(Point::origin(d), r).unwrap();
            let trials = 200_000;
            let mut hits = 0usize;
            for _ in 0..trials {
                let x = pt(&(0..d).map(|_| s.next_unit()).collect::<Vec<_>>());
                if ball.contains(&x).unwrap() {
                    hits += 1;
                }
            }
            let phat = hits as f64 / trials as f64;
            let sigma = (v * (1.0 - v) / trials as f64).sqrt();
            assert!(
                (phat - v).abs() <= 3.0 * sigma,
                "v={v} d={d} phat={phat} sigma={sigma}"
            );
        }
    }
}
