//! Browser bindings for the `cellfps` demo page.
//!
//! A [`Demo`] owns one synthetic cloud. The page asks it to downsample the
//! cloud, crop a missing region out of it, and score a sample against the
//! full cloud with the Chamfer distance. Every method is plain Rust with
//! `String` errors, so the same code runs under native tests.

use cellfps::dataio::{crop_missing, generate_shape, ShapeKind};
use cellfps::sampling::cell_sample;
use cellfps::{cell_ifps, chamfer, ifps, normalize, CellIfpsConfig, Point3, PointCloud};
use wasm_bindgen::prelude::*;

fn flat_f32(cloud: &PointCloud) -> Vec<f32> {
    cloud.to_flat().into_iter().map(|v| v as f32).collect()
}

#[wasm_bindgen]
pub struct Demo {
    cloud: PointCloud,
    /// Indices of the most recent sample, in the order they were chosen.
    sample: Vec<usize>,
    /// Indices removed by the most recent crop.
    missing: Vec<usize>,
}

#[wasm_bindgen]
impl Demo {
    /// Generates `n` points of `shape` ("sphere", "box" or "vehicle") and
    /// scales them into the unit sphere.
    #[wasm_bindgen(constructor)]
    pub fn new(shape: &str, n: usize, seed: u64) -> Result<Demo, String> {
        let kind: ShapeKind = shape.parse().map_err(|e: cellfps::Error| e.to_string())?;
        let raw = generate_shape(kind, n, seed).map_err(|e| e.to_string())?;
        let (cloud, _) = normalize(&raw).map_err(|e| e.to_string())?;
        Ok(Demo {
            cloud,
            sample: Vec::new(),
            missing: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    /// Coordinates as `x0, y0, z0, x1, ...`.
    pub fn positions(&self) -> Vec<f32> {
        flat_f32(&self.cloud)
    }

    /// Runs `algorithm` ("ifps", "cell" or "cell_ifps") and returns the
    /// chosen indices. `size` is the sample count, or the sphere radius for
    /// "cell".
    pub fn sample(&mut self, algorithm: &str, size: f64, seed: u64) -> Result<Vec<u32>, String> {
        let count = || -> Result<usize, String> {
            if size.fract() == 0.0 && size >= 0.0 {
                Ok(size as usize)
            } else {
                Err(format!("sample count must be a whole number, got {size}"))
            }
        };
        let selection = match algorithm {
            "ifps" => ifps(&self.cloud, count()?, seed),
            "cell" => cell_sample(&self.cloud, size),
            "cell_ifps" => cell_ifps(&self.cloud, count()?, &CellIfpsConfig::with_seed(seed)),
            other => return Err(format!("unknown algorithm {other:?}")),
        }
        .map_err(|e| e.to_string())?;
        self.sample = selection.indices().to_vec();
        Ok(self.sample.iter().map(|&i| i as u32).collect())
    }

    /// Removes the `fraction` of points nearest `(cx, cy, cz)` and returns
    /// their indices.
    pub fn crop(&mut self, cx: f64, cy: f64, cz: f64, fraction: f64) -> Result<Vec<u32>, String> {
        let pair = crop_missing(&self.cloud, Point3::new(cx, cy, cz), fraction).map_err(|e| e.to_string())?;
        self.missing = pair.missing_indices;
        Ok(self.missing.iter().map(|&i| i as u32).collect())
    }

    pub fn clear_crop(&mut self) {
        self.missing.clear();
    }

    /// `[pred_to_gt, gt_to_pred, chamfer]` of the last sample against the
    /// cloud, with cropped points dropped from both sides.
    pub fn sample_error(&self) -> Result<Vec<f64>, String> {
        if self.sample.is_empty() {
            return Err("nothing has been sampled yet".into());
        }
        let mut kept = vec![true; self.cloud.len()];
        for &i in &self.missing {
            kept[i] = false;
        }
        let pred: Vec<usize> = self.sample.iter().copied().filter(|&i| kept[i]).collect();
        let gt: Vec<usize> = (0..self.cloud.len()).filter(|&i| kept[i]).collect();
        let report = chamfer(&self.cloud.gather(&pred), &self.cloud.gather(&gt)).map_err(|e| e.to_string())?;
        Ok(vec![report.pred_to_gt, report.gt_to_pred, report.chamfer])
    }
}
