//! Points, clouds, bounding boxes and the centroid/unit-radius normalization.

use std::ops::{Add, Index, Mul, Sub};

use crate::error::{Error, Result};
use crate::sampling::SampleSelection;

/// A point in 3D space, coordinates in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn dist2(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }

    #[inline]
    pub fn norm2(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn axis(&self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn component_min(&self, other: &Point3) -> Point3 {
        Point3::new(self.x.min(other.x), self.y.min(other.y), self.z.min(other.z))
    }

    pub fn component_max(&self, other: &Point3) -> Point3 {
        Point3::new(self.x.max(other.x), self.y.max(other.y), self.z.max(other.z))
    }
}

impl From<[f64; 3]> for Point3 {
    fn from([x, y, z]: [f64; 3]) -> Self {
        Point3::new(x, y, z)
    }
}

impl Add for Point3 {
    type Output = Point3;

    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;

    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;

    fn mul(self, rhs: f64) -> Point3 {
        Point3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

/// An ordered collection of finite points. Index `i` always refers to the
/// same point for the lifetime of the cloud.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    points: Vec<Point3>,
}

impl PointCloud {
    /// Rejects any point with a NaN or infinite coordinate.
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { points })
    }

    /// Builds a cloud from a flat `[x0, y0, z0, x1, ...]` buffer.
    pub fn from_flat(coords: &[f64]) -> Result<Self> {
        if !coords.len().is_multiple_of(3) {
            return Err(crate::error::invalid(format!(
                "flat coordinate buffer length {} is not a multiple of 3",
                coords.len()
            )));
        }
        Self::new(coords.chunks_exact(3).map(|c| Point3::new(c[0], c[1], c[2])).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point3> {
        self.points.iter()
    }

    pub fn into_points(self) -> Vec<Point3> {
        self.points
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.points.iter().flat_map(|p| p.to_array()).collect()
    }

    pub(crate) fn ensure_non_empty(&self) -> Result<()> {
        if self.points.is_empty() {
            Err(Error::EmptyInput)
        } else {
            Ok(())
        }
    }

    /// Gathers the points named by `indices`, in that order.
    pub fn gather(&self, indices: &[usize]) -> PointCloud {
        PointCloud {
            points: indices.iter().map(|&i| self.points[i]).collect(),
        }
    }

    pub fn select(&self, selection: &SampleSelection) -> PointCloud {
        debug_assert_eq!(selection.source_size(), self.len());
        self.gather(selection.indices())
    }

    /// Applies `f` to every point. The result must stay finite.
    pub fn map(&self, f: impl Fn(Point3) -> Point3) -> Result<PointCloud> {
        PointCloud::new(self.points.iter().map(|&p| f(p)).collect())
    }
}

impl Index<usize> for PointCloud {
    type Output = Point3;

    fn index(&self, index: usize) -> &Point3 {
        &self.points[index]
    }
}

impl<'a> IntoIterator for &'a PointCloud {
    type Item = &'a Point3;
    type IntoIter = std::slice::Iter<'a, Point3>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Axis-aligned bounding box, `min_corner <= max_corner` componentwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min_corner: Point3,
    pub max_corner: Point3,
}

impl Aabb {
    pub fn extent(&self) -> Point3 {
        self.max_corner - self.min_corner
    }

    pub fn contains(&self, p: &Point3) -> bool {
        (self.min_corner.x..=self.max_corner.x).contains(&p.x)
            && (self.min_corner.y..=self.max_corner.y).contains(&p.y)
            && (self.min_corner.z..=self.max_corner.z).contains(&p.z)
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e.x * e.y * e.z
    }
}

/// Maps sensor-frame points to the normalized frame via
/// `(p - translation) / scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationTransform {
    translation: Point3,
    scale: f64,
}

impl NormalizationTransform {
    pub const IDENTITY: NormalizationTransform = NormalizationTransform {
        translation: Point3::ORIGIN,
        scale: 1.0,
    };

    pub fn new(translation: Point3, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(crate::error::invalid(format!("normalization scale must be positive, got {scale}")));
        }
        if !translation.is_finite() {
            return Err(crate::error::invalid("normalization translation must be finite"));
        }
        Ok(Self { translation, scale })
    }

    pub fn translation(&self) -> Point3 {
        self.translation
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn forward(&self, p: Point3) -> Point3 {
        (p - self.translation) * (1.0 / self.scale)
    }

    pub fn inverse(&self, p: Point3) -> Point3 {
        p * self.scale + self.translation
    }

    /// Maps a normalized cloud back to the frame it was normalized from.
    pub fn apply_inverse(&self, cloud: &PointCloud) -> Result<PointCloud> {
        cloud.map(|p| self.inverse(p))
    }
}

pub fn centroid(cloud: &PointCloud) -> Result<Point3> {
    cloud.ensure_non_empty()?;
    let sum = cloud.iter().fold(Point3::ORIGIN, |acc, &p| acc + p);
    Ok(sum * (1.0 / cloud.len() as f64))
}

pub fn bounding_box(cloud: &PointCloud) -> Result<Aabb> {
    cloud.ensure_non_empty()?;
    let first = cloud[0];
    let (min_corner, max_corner) = cloud
        .iter()
        .fold((first, first), |(lo, hi), p| (lo.component_min(p), hi.component_max(p)));
    Ok(Aabb { min_corner, max_corner })
}

/// Centers the cloud on its centroid and scales it so the farthest point
/// lies at distance 1 from the origin.
pub fn normalize(cloud: &PointCloud) -> Result<(PointCloud, NormalizationTransform)> {
    cloud.ensure_non_empty()?;
    let first = cloud[0];
    if cloud.iter().all(|p| *p == first) {
        return Err(Error::DegenerateCloud);
    }
    let center = centroid(cloud)?;
    let radius = cloud.iter().map(|p| p.dist2(&center)).fold(0.0, f64::max).sqrt();
    let transform = NormalizationTransform::new(center, radius)?;
    let normalized = cloud.map(|p| transform.forward(p))?;
    Ok((normalized, transform))
}

pub fn apply_inverse(transform: &NormalizationTransform, cloud: &PointCloud) -> Result<PointCloud> {
    transform.apply_inverse(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(points: &[[f64; 3]]) -> PointCloud {
        PointCloud::new(points.iter().map(|&p| p.into()).collect()).unwrap()
    }

    #[test]
    fn rejects_non_finite_points() {
        let err = PointCloud::new(vec![Point3::new(0.0, 0.0, 0.0), Point3::new(f64::NAN, 0.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 1 }));
        assert!(PointCloud::new(vec![Point3::new(0.0, f64::INFINITY, 0.0)]).is_err());
    }

    #[test]
    fn centroid_examples() {
        assert_eq!(centroid(&cloud(&[[0.0, 0.0, 0.0]])).unwrap(), Point3::ORIGIN);
        assert_eq!(
            centroid(&cloud(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]])).unwrap(),
            Point3::new(1.0, 0.0, 0.0)
        );
        let c = centroid(&cloud(&[[1.0, 2.0, 3.0], [3.0, 2.0, 1.0], [2.0, 2.0, 2.0]])).unwrap();
        assert!(c.dist2(&Point3::new(2.0, 2.0, 2.0)) < 1e-24);
        assert!(matches!(centroid(&PointCloud::default()), Err(Error::EmptyInput)));
    }

    #[test]
    fn bounding_box_examples() {
        let b = bounding_box(&cloud(&[[0.0, 0.0, 0.0]])).unwrap();
        assert_eq!(b.min_corner, Point3::ORIGIN);
        assert_eq!(b.max_corner, Point3::ORIGIN);

        let b = bounding_box(&cloud(&[[-1.0, 0.0, 2.0], [3.0, -2.0, 0.0]])).unwrap();
        assert_eq!(b.min_corner, Point3::new(-1.0, -2.0, 0.0));
        assert_eq!(b.max_corner, Point3::new(3.0, 0.0, 2.0));

        let mut corners = Vec::new();
        for i in 0..8 {
            corners.push([(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        let b = bounding_box(&cloud(&corners)).unwrap();
        assert_eq!(b.min_corner, Point3::ORIGIN);
        assert_eq!(b.max_corner, Point3::new(1.0, 1.0, 1.0));
        assert!(bounding_box(&PointCloud::default()).is_err());
    }

    #[test]
    fn normalize_examples() {
        let (n, t) = normalize(&cloud(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]])).unwrap();
        assert_eq!(n.points(), &[Point3::new(-1.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0)]);
        assert_eq!(t.translation(), Point3::new(1.0, 0.0, 0.0));
        assert_eq!(t.scale(), 1.0);

        let (n, _) = normalize(&cloud(&[[0.0, 0.0, 0.0], [0.0, 4.0, 0.0]])).unwrap();
        assert_eq!(n.points(), &[Point3::new(0.0, -1.0, 0.0), Point3::new(0.0, 1.0, 0.0)]);
    }

    #[test]
    fn normalize_is_idempotent() {
        let input = cloud(&[[0.3, -1.0, 2.0], [4.0, 0.5, -0.25], [1.0, 1.0, 1.0], [-2.0, 0.0, 3.5]]);
        let (once, _) = normalize(&input).unwrap();
        let (twice, t) = normalize(&once).unwrap();
        assert!(t.translation().norm() < 1e-9);
        assert!((t.scale() - 1.0).abs() < 1e-9);
        for (a, b) in once.iter().zip(twice.iter()) {
            assert!(a.dist2(b).sqrt() < 1e-9);
        }
    }

    #[test]
    fn normalize_rejects_identical_points() {
        let same = cloud(&[[0.1, 0.1, 0.1]; 3]);
        assert!(matches!(normalize(&same), Err(Error::DegenerateCloud)));
        assert!(matches!(normalize(&cloud(&[[5.0, 5.0, 5.0]])), Err(Error::DegenerateCloud)));
    }

    #[test]
    fn inverse_examples() {
        let input = cloud(&[[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let back = NormalizationTransform::IDENTITY.apply_inverse(&input).unwrap();
        assert_eq!(back, input);

        let t = NormalizationTransform::new(Point3::new(1.0, 0.0, 0.0), 1.0).unwrap();
        let back = apply_inverse(&t, &input).unwrap();
        assert_eq!(back.points(), &[Point3::ORIGIN, Point3::new(2.0, 0.0, 0.0)]);
    }

    #[test]
    fn transform_rejects_bad_scale() {
        assert!(NormalizationTransform::new(Point3::ORIGIN, 0.0).is_err());
        assert!(NormalizationTransform::new(Point3::ORIGIN, -1.0).is_err());
        assert!(NormalizationTransform::new(Point3::ORIGIN, f64::NAN).is_err());
    }
}
