//! Chamfer distance and the directional completion errors.
//!
//! All values are mean squared nearest-neighbor distances in the clouds'
//! native units; nothing is rescaled for display.

use crate::error::Result;
use crate::geometry::PointCloud;
use crate::spatial::NnIndex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletionErrorReport {
    /// Mean over predicted points of the squared distance to the nearest
    /// ground-truth point.
    pub pred_to_gt: f64,
    /// Mean over ground-truth points of the squared distance to the nearest
    /// predicted point.
    pub gt_to_pred: f64,
    /// `pred_to_gt + gt_to_pred`.
    pub chamfer: f64,
}

/// `(1/|from|) * sum_{p in from} min_{q in to} |p - q|^2`
fn directional(from: &PointCloud, to: &PointCloud) -> Result<f64> {
    from.ensure_non_empty()?;
    let index = NnIndex::new(to)?;
    let sum: f64 = from.iter().map(|p| index.nearest(p).1).sum();
    Ok(sum / from.len() as f64)
}

pub fn pred_to_gt_error(pred: &PointCloud, gt: &PointCloud) -> Result<f64> {
    gt.ensure_non_empty()?;
    directional(pred, gt)
}

pub fn gt_to_pred_error(pred: &PointCloud, gt: &PointCloud) -> Result<f64> {
    pred.ensure_non_empty()?;
    directional(gt, pred)
}

/// Chamfer distance between `s1` (prediction) and `s2` (ground truth), with
/// both directional terms.
pub fn chamfer(s1: &PointCloud, s2: &PointCloud) -> Result<CompletionErrorReport> {
    let pred_to_gt = pred_to_gt_error(s1, s2)?;
    let gt_to_pred = gt_to_pred_error(s1, s2)?;
    Ok(CompletionErrorReport {
        pred_to_gt,
        gt_to_pred,
        chamfer: pred_to_gt + gt_to_pred,
    })
}

/// Largest distance from any cloud point to its nearest sample. Measures how
/// evenly a downsample covers its source.
pub fn covering_radius(cloud: &PointCloud, samples: &PointCloud) -> Result<f64> {
    cloud.ensure_non_empty()?;
    let index = NnIndex::new(samples)?;
    Ok(cloud.iter().map(|p| index.nearest(p).1).fold(0.0, f64::max).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use crate::Error;
    use proptest::prelude::*;

    fn cloud(points: &[[f64; 3]]) -> PointCloud {
        PointCloud::new(points.iter().map(|&p| p.into()).collect()).unwrap()
    }

    #[test]
    fn directional_examples() {
        let a = cloud(&[[0.0, 0.0, 0.0]]);
        let b = cloud(&[[1.0, 0.0, 0.0], [5.0, 0.0, 0.0]]);
        assert_eq!(pred_to_gt_error(&a, &b).unwrap(), 1.0);
        assert_eq!(gt_to_pred_error(&b, &a).unwrap(), 1.0);

        let pred = cloud(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        assert_eq!(pred_to_gt_error(&pred, &a).unwrap(), 2.0);
        assert_eq!(pred_to_gt_error(&b, &b).unwrap(), 0.0);
        assert_eq!(gt_to_pred_error(&b, &b).unwrap(), 0.0);
    }

    #[test]
    fn chamfer_examples() {
        let r = chamfer(&cloud(&[[0.0, 0.0, 0.0]]), &cloud(&[[1.0, 0.0, 0.0]])).unwrap();
        assert_eq!(
            r,
            CompletionErrorReport {
                pred_to_gt: 1.0,
                gt_to_pred: 1.0,
                chamfer: 2.0
            }
        );
        let s = cloud(&[[0.2, 1.0, -3.0], [4.0, 4.0, 4.0]]);
        assert_eq!(chamfer(&s, &s).unwrap().chamfer, 0.0);
    }

    #[test]
    fn empty_inputs_error() {
        let a = cloud(&[[0.0, 0.0, 0.0]]);
        let e = PointCloud::default();
        assert!(matches!(chamfer(&a, &e), Err(Error::EmptyInput)));
        assert!(matches!(chamfer(&e, &a), Err(Error::EmptyInput)));
        assert!(pred_to_gt_error(&e, &a).is_err());
        assert!(gt_to_pred_error(&a, &e).is_err());
    }

    #[test]
    fn covering_radius_of_line() {
        let c = cloud(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [3.0, 0.0, 0.0]]);
        let s = cloud(&[[0.0, 0.0, 0.0], [3.0, 0.0, 0.0]]);
        assert_eq!(covering_radius(&c, &s).unwrap(), 1.0);
        assert_eq!(covering_radius(&c, &c).unwrap(), 0.0);
    }

    fn arb_cloud() -> impl Strategy<Value = PointCloud> {
        prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64), 1..80).prop_map(|v| {
            PointCloud::new(v.into_iter().map(|(x, y, z)| Point3::new(x, y, z)).collect()).unwrap()
        })
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    proptest! {
        #[test]
        fn total_is_symmetric(a in arb_cloud(), b in arb_cloud()) {
            let ab = chamfer(&a, &b).unwrap();
            let ba = chamfer(&b, &a).unwrap();
            prop_assert!(close(ab.chamfer, ba.chamfer, 1e-12));
            prop_assert_eq!(ab.pred_to_gt, ba.gt_to_pred);
            prop_assert!(close(ab.chamfer, ab.pred_to_gt + ab.gt_to_pred, 1e-12));
            prop_assert!(ab.pred_to_gt >= 0.0 && ab.gt_to_pred >= 0.0);
        }

        #[test]
        fn translation_invariant(a in arb_cloud(), b in arb_cloud(), t in (-100.0..100.0f64, -100.0..100.0f64, -100.0..100.0f64)) {
            let shift = Point3::new(t.0, t.1, t.2);
            let r0 = chamfer(&a, &b).unwrap();
            let r1 = chamfer(&a.map(|p| p + shift).unwrap(), &b.map(|p| p + shift).unwrap()).unwrap();
            prop_assert!((r0.pred_to_gt - r1.pred_to_gt).abs() < 1e-9);
            prop_assert!((r0.gt_to_pred - r1.gt_to_pred).abs() < 1e-9);
            prop_assert!((r0.chamfer - r1.chamfer).abs() < 1e-9);
        }

        #[test]
        fn scale_covariant(a in arb_cloud(), b in arb_cloud(), lambda in 0.01..50.0f64) {
            let r0 = chamfer(&a, &b).unwrap();
            let r1 = chamfer(&a.map(|p| p * lambda).unwrap(), &b.map(|p| p * lambda).unwrap()).unwrap();
            let l2 = lambda * lambda;
            prop_assert!(close(r0.pred_to_gt * l2, r1.pred_to_gt, 1e-9));
            prop_assert!(close(r0.gt_to_pred * l2, r1.gt_to_pred, 1e-9));
            prop_assert!(close(r0.chamfer * l2, r1.chamfer, 1e-9));
        }
    }
}
