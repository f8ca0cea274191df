//! Training-loss arithmetic of the completion GAN as plain functions:
//! the multi-stage Chamfer completion loss, the adversarial log-likelihood
//! over discriminator scores, and their weighted joint loss.

use crate::error::{invalid, Error, Result};
use crate::geometry::PointCloud;
use crate::metrics::chamfer;
use crate::sampling::ifps;

/// Predictions at the three decoder resolutions, finest first.
#[derive(Debug, Clone, PartialEq)]
pub struct StagePredictions {
    detail: PointCloud,
    primary_centers: PointCloud,
    secondary_centers: PointCloud,
}

impl StagePredictions {
    /// Requires `|secondary| <= |primary| <= |detail|`, all non-empty.
    pub fn new(detail: PointCloud, primary_centers: PointCloud, secondary_centers: PointCloud) -> Result<Self> {
        for c in [&detail, &primary_centers, &secondary_centers] {
            c.ensure_non_empty()?;
        }
        if !(secondary_centers.len() <= primary_centers.len() && primary_centers.len() <= detail.len()) {
            return Err(invalid(format!(
                "stage sizes must satisfy secondary <= primary <= detail, got {} / {} / {}",
                secondary_centers.len(),
                primary_centers.len(),
                detail.len()
            )));
        }
        Ok(Self {
            detail,
            primary_centers,
            secondary_centers,
        })
    }

    pub fn detail(&self) -> &PointCloud {
        &self.detail
    }

    pub fn primary_centers(&self) -> &PointCloud {
        &self.primary_centers
    }

    pub fn secondary_centers(&self) -> &PointCloud {
        &self.secondary_centers
    }
}

/// Weights of the joint loss; `lambda_c + lambda_a = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    alpha: f64,
    lambda_c: f64,
    lambda_a: f64,
}

pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

impl LossWeights {
    pub fn new(alpha: f64, lambda_c: f64, lambda_a: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid(format!("alpha must be nonnegative, got {alpha}")));
        }
        for (name, w) in [("lambda_c", lambda_c), ("lambda_a", lambda_a)] {
            if !(0.0..=1.0).contains(&w) {
                return Err(invalid(format!("{name} must lie in [0, 1], got {w}")));
            }
        }
        if (lambda_c + lambda_a - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(invalid(format!(
                "lambda_c + lambda_a must equal 1, got {}",
                lambda_c + lambda_a
            )));
        }
        Ok(Self {
            alpha,
            lambda_c,
            lambda_a,
        })
    }

    /// `lambda_a` is derived as `1 - lambda_c`.
    pub fn from_completion_weight(alpha: f64, lambda_c: f64) -> Result<Self> {
        Self::new(alpha, lambda_c, 1.0 - lambda_c)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda_c(&self) -> f64 {
        self.lambda_c
    }

    pub fn lambda_a(&self) -> f64 {
        self.lambda_a
    }
}

/// Discriminator outputs on real missing regions and on generated ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    real_scores: Vec<f64>,
    fake_scores: Vec<f64>,
}

impl ScoreSet {
    /// Real scores must lie in `(0, 1]` and fake scores in `[0, 1)`, so both
    /// logarithms are finite.
    pub fn new(real_scores: Vec<f64>, fake_scores: Vec<f64>) -> Result<Self> {
        if real_scores.len() != fake_scores.len() {
            return Err(invalid(format!(
                "score lists differ in length: {} real, {} fake",
                real_scores.len(),
                fake_scores.len()
            )));
        }
        if let Some(s) = real_scores.iter().find(|&&s| !(s > 0.0 && s <= 1.0)) {
            return Err(Error::LogDomain(format!("real score {s} outside (0, 1]")));
        }
        if let Some(s) = fake_scores.iter().find(|&&s| !(0.0..1.0).contains(&s)) {
            return Err(Error::LogDomain(format!("fake score {s} outside [0, 1)")));
        }
        Ok(Self {
            real_scores,
            fake_scores,
        })
    }

    pub fn len(&self) -> usize {
        self.real_scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.real_scores.is_empty()
    }
}

/// `d(detail, gt) + alpha * d(primary, gt') + 2 * alpha * d(secondary, gt'')`
/// where `d` is the Chamfer total and `gt'`, `gt''` are IFPS samples of `gt`
/// sized like the matching prediction stage, each drawn from `gt` directly.
pub fn multi_stage_completion_loss(
    preds: &StagePredictions,
    gt: &PointCloud,
    alpha: f64,
    rng_seed: u64,
) -> Result<f64> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(invalid(format!("alpha must be nonnegative, got {alpha}")));
    }
    gt.ensure_non_empty()?;
    if gt.len() < preds.primary_centers.len() {
        return Err(Error::InsufficientPoints {
            requested: preds.primary_centers.len(),
            available: gt.len(),
        });
    }
    let gt_primary = gt.select(&ifps(gt, preds.primary_centers.len(), rng_seed)?);
    let gt_secondary = gt.select(&ifps(gt, preds.secondary_centers.len(), rng_seed)?);

    let detail = chamfer(&preds.detail, gt)?.chamfer;
    let primary = chamfer(&preds.primary_centers, &gt_primary)?.chamfer;
    let secondary = chamfer(&preds.secondary_centers, &gt_secondary)?.chamfer;
    Ok(detail + alpha * primary + 2.0 * alpha * secondary)
}

/// `sum_i ln D(y_i) + sum_j ln(1 - D(F(x_j)))`, the discriminator's
/// objective. Always <= 0.
pub fn adversarial_loss(scores: &ScoreSet) -> f64 {
    let real: f64 = scores.real_scores.iter().map(|s| s.ln()).sum();
    let fake: f64 = scores.fake_scores.iter().map(|s| (1.0 - s).ln()).sum();
    real + fake
}

/// Validates raw score lists, then evaluates [`adversarial_loss`].
pub fn adversarial_loss_from(real_scores: &[f64], fake_scores: &[f64]) -> Result<f64> {
    Ok(adversarial_loss(&ScoreSet::new(real_scores.to_vec(), fake_scores.to_vec())?))
}

pub fn joint_loss(l_com: f64, l_adv: f64, weights: &LossWeights) -> f64 {
    weights.lambda_c * l_com + weights.lambda_a * l_adv
}
