//! Uniform downsampling: iterative farthest point sampling (IFPS), cell
//! sampling, and the Cell-IFPS hybrid that combines a one-pass cell sample
//! with a small IFPS correction so the output size is exact.
//!
//! All samplers return a [`SampleSelection`], an ordered list of unique
//! indices into the source cloud. Squared Euclidean distances are used
//! everywhere; ties resolve to the lowest point index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{invalid, Error, Result};
use crate::fps::BucketedFps;
use crate::geometry::{bounding_box, Point3, PointCloud};
use crate::spatial::{build_grid, NnIndex};

/// Extents below this are treated as flat when estimating a cell edge.
pub const DEGENERATE_EXTENT: f64 = 1e-12;

/// Input size required by the two-stage pipeline, and its two stage sizes.
pub const PIPELINE_MIN_INPUT: usize = 1024;
pub const PIPELINE_STAGE_SIZES: [usize; 2] = [1024, 512];

/// Indices into a source cloud, in selection order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSelection {
    source_size: usize,
    indices: Vec<usize>,
}

impl SampleSelection {
    /// Validates that every index is in range and unique.
    pub fn new(source_size: usize, indices: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; source_size];
        for &i in &indices {
            if i >= source_size {
                return Err(invalid(format!("index {i} out of range for cloud of {source_size} points")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(invalid(format!("index {i} selected twice")));
            }
        }
        Ok(Self { source_size, indices })
    }

    fn new_unchecked(source_size: usize, indices: Vec<usize>) -> Self {
        debug_assert!(Self::new(source_size, indices.clone()).is_ok());
        Self { source_size, indices }
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn into_indices(self) -> Vec<usize> {
        self.indices
    }
}

/// What Cell-IFPS does when cell sampling overshoots the target count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RemovalMode {
    /// Run IFPS over the cell sample for `N_cur - n` points and drop them.
    #[default]
    Literal,
    /// Run IFPS over the cell sample for `n` points and keep them.
    KeepFps,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellIfpsConfig {
    /// Biases the initial cell edge toward more cells than requested, so the
    /// cheap removal correction is the common case. Must be >= 1.
    pub overshoot_factor: f64,
    /// Number of cell-sampling passes allowed while searching for an edge
    /// whose occupied-cell count lands in the acceptance window. 1 disables
    /// the search.
    pub max_resize_rounds: usize,
    pub rng_seed: u64,
    pub removal: RemovalMode,
    /// Growth of the accepted excess per search round, as a fraction of the
    /// input size: round `r` (from 0) stops once some pass has produced
    /// `n <= N_cur <= n + floor(count_tolerance * (r + 1) * |cloud|)` cells.
    /// The IFPS correction then removes the excess.
    pub count_tolerance: f64,
}

impl Default for CellIfpsConfig {
    fn default() -> Self {
        Self {
            overshoot_factor: 1.5,
            max_resize_rounds: 8,
            rng_seed: 0,
            removal: RemovalMode::Literal,
            count_tolerance: 0.001,
        }
    }
}

impl CellIfpsConfig {
    pub fn with_seed(rng_seed: u64) -> Self {
        Self {
            rng_seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.overshoot_factor.is_finite() && self.overshoot_factor >= 1.0) {
            return Err(invalid(format!("overshoot_factor must be >= 1, got {}", self.overshoot_factor)));
        }
        if self.max_resize_rounds < 1 {
            return Err(invalid("max_resize_rounds must be >= 1"));
        }
        if !(self.count_tolerance.is_finite() && self.count_tolerance >= 0.0) {
            return Err(invalid(format!("count_tolerance must be >= 0, got {}", self.count_tolerance)));
        }
        Ok(())
    }
}

fn check_count(cloud: &PointCloud, n: usize) -> Result<()> {
    cloud.ensure_non_empty()?;
    if n == 0 {
        return Err(invalid("sample count must be at least 1"));
    }
    if n > cloud.len() {
        return Err(Error::InsufficientPoints {
            requested: n,
            available: cloud.len(),
        });
    }
    Ok(())
}

/// Seeded uniform choice of a start index in `0..len`.
pub fn seed_index(rng_seed: u64, len: usize) -> usize {
    ChaCha8Rng::seed_from_u64(rng_seed).random_range(0..len)
}

/// Greedy farthest-point selection over `points`.
///
/// `min_d2[i]` is the squared distance from point `i` to the selected set, or
/// `-inf` once `i` is selected. If `last` is given, that point was just
/// selected and its distances are folded in on the first sweep. Appends
/// `count` new indices to `out`.
fn farthest_point_extend(
    points: &[Point3],
    min_d2: &mut [f64],
    mut last: Option<usize>,
    count: usize,
    out: &mut Vec<usize>,
) {
    debug_assert_eq!(points.len(), min_d2.len());
    for _ in 0..count {
        let mut best = f64::NEG_INFINITY;
        let mut best_idx = usize::MAX;
        match last {
            Some(l) => {
                let anchor = points[l];
                for (i, (p, m)) in points.iter().zip(min_d2.iter_mut()).enumerate() {
                    let d = p.dist2(&anchor);
                    if d < *m {
                        *m = d;
                    }
                    if *m > best {
                        best = *m;
                        best_idx = i;
                    }
                }
            }
            None => {
                for (i, &m) in min_d2.iter().enumerate() {
                    if m > best {
                        best = m;
                        best_idx = i;
                    }
                }
            }
        }
        assert!(best_idx != usize::MAX, "farthest point search ran out of candidates");
        min_d2[best_idx] = f64::NEG_INFINITY;
        out.push(best_idx);
        last = Some(best_idx);
    }
}

/// Iterative farthest point sampling from an explicit start index.
pub fn ifps_from(cloud: &PointCloud, n: usize, start: usize) -> Result<SampleSelection> {
    check_count(cloud, n)?;
    if start >= cloud.len() {
        return Err(invalid(format!("start index {start} out of range")));
    }
    let points = cloud.points();
    let mut min_d2 = vec![f64::INFINITY; points.len()];
    min_d2[start] = f64::NEG_INFINITY;
    let mut out = Vec::with_capacity(n);
    out.push(start);
    farthest_point_extend(points, &mut min_d2, Some(start), n - 1, &mut out);
    Ok(SampleSelection::new_unchecked(cloud.len(), out))
}

/// Iterative farthest point sampling. The start point is drawn from
/// `rng_seed`; every later pick maximizes the minimum squared distance to
/// the points already chosen.
pub fn ifps(cloud: &PointCloud, n: usize, rng_seed: u64) -> Result<SampleSelection> {
    check_count(cloud, n)?;
    ifps_from(cloud, n, seed_index(rng_seed, cloud.len()))
}

/// Cell edge whose cube is inscribed in a sphere of `radius`.
pub fn cell_edge_for_radius(radius: f64) -> f64 {
    2.0 * radius / 3f64.sqrt()
}

/// One representative per occupied cell of a grid anchored at the bounding
/// box minimum. A cell's representative is the member nearest the cell
/// center. Output is in lexicographic cell order.
pub fn cell_sample(cloud: &PointCloud, radius: f64) -> Result<SampleSelection> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(invalid(format!("radius must be positive, got {radius}")));
    }
    cell_sample_with_edge(cloud, cell_edge_for_radius(radius))
}

pub fn cell_sample_with_edge(cloud: &PointCloud, cell_edge: f64) -> Result<SampleSelection> {
    let grid = build_grid(cloud, cell_edge)?;
    let origin = grid.origin();
    let inv_edge = 1.0 / cell_edge;
    // same arithmetic as `scaled_cell`, without its 32-bit key range
    let offset = |i: usize| {
        (cloud[i] - origin)
            .to_array()
            .iter()
            .map(|&c| {
                let off = (c * inv_edge).fract() - 0.5;
                off * off
            })
            .sum::<f64>()
    };
    let indices = grid
        .iter()
        .map(|(_, members)| {
            let mut best = members[0];
            let mut best_d = offset(best);
            for &i in &members[1..] {
                let d = offset(i);
                if d < best_d {
                    best = i;
                    best_d = d;
                }
            }
            best
        })
        .collect();
    Ok(SampleSelection::new_unchecked(cloud.len(), indices))
}

/// Cell edge expected to yield about `overshoot * n` occupied cells, from
/// the bounding-box volume. Flat or linear clouds use the product of their
/// non-degenerate extents with the matching root.
pub fn estimate_cell_edge(cloud: &PointCloud, n: usize, overshoot: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("sample count must be at least 1"));
    }
    if !(overshoot.is_finite() && overshoot > 0.0) {
        return Err(invalid(format!("overshoot must be positive, got {overshoot}")));
    }
    let extent = bounding_box(cloud)?.extent();
    Ok(edge_from_extent(extent, n, overshoot))
}

fn edge_from_extent(extent: Point3, n: usize, overshoot: f64) -> f64 {
    let live: Vec<f64> = extent
        .to_array()
        .into_iter()
        .filter(|&e| e >= DEGENERATE_EXTENT)
        .collect();
    if live.is_empty() {
        return 1.0;
    }
    let measure: f64 = live.iter().product();
    (measure / (overshoot * n as f64)).powf(1.0 / live.len() as f64)
}

const KEY_BITS: u32 = 21;
const KEY_LIMIT: f64 = ((1u64 << KEY_BITS) - 2) as f64;
const EMPTY_SLOT: u32 = u32::MAX;
/// The edge search aims this fraction of `n` above `n`: counts scatter by a
/// few percent, and landing just short forces another pass.
const SEARCH_AIM_ABOVE: f64 = 0.01;
/// Relative width below which a bracket around the window is abandoned.
const NARROW_BRACKET: f64 = 0.002;

/// Cell key of an origin-relative point and its squared distance to the
/// cell center, both in units of the cell edge. Coordinates are nonnegative,
/// so truncation is floor.
#[inline]
fn scaled_cell(rel: &[f64; 3], inv_edge: f64) -> ([u32; 3], f64) {
    let mut key = [0u32; 3];
    let mut d = 0.0;
    for axis in 0..3 {
        let u = rel[axis] * inv_edge;
        key[axis] = u as u32;
        let off = u - key[axis] as f64 - 0.5;
        d += off * off;
    }
    (key, d)
}

/// Repeated cell passes over one cloud with the grid anchored at the
/// bounding-box minimum.
///
/// Small grids use one dense slot per cell, laid out so slot order is
/// lexicographic cell order. Large, mostly empty grids fall back to hashing
/// the packed cell key and sorting when read out.
struct CellPass {
    /// Point coordinates relative to the grid origin, all nonnegative.
    rel: Vec<[f64; 3]>,
    extent: Point3,
    occupied: Vec<u8>,
    keys: FxHashSet<u64>,
}

impl CellPass {
    fn new(points: &[Point3], origin: Point3, extent: Point3) -> Self {
        Self {
            rel: points.iter().map(|p| (*p - origin).to_array()).collect(),
            extent,
            occupied: Vec::new(),
            keys: FxHashSet::default(),
        }
    }

    /// Slot strides and slot count of a dense layout, if the grid is small
    /// enough for one. Keys must fit in 21 bits per axis; the caller clamps
    /// the edge accordingly.
    fn dense_layout(&self, inv_edge: f64) -> Option<([u32; 2], usize)> {
        let dims = self.extent.to_array().map(|e| (e * inv_edge).floor() as usize + 1);
        let total = dims[0].checked_mul(dims[1])?.checked_mul(dims[2])?;
        (total <= 4 * self.rel.len() + 4096).then(|| ([(dims[1] * dims[2]) as u32, dims[2] as u32], total))
    }

    /// Number of occupied cells at this edge.
    fn count(&mut self, edge: f64) -> usize {
        let inv_edge = 1.0 / edge;
        match self.dense_layout(inv_edge) {
            Some(([sy, sz], total)) => {
                self.occupied.clear();
                self.occupied.resize(total, 0);
                for r in &self.rel {
                    let k = cell_of(r, inv_edge);
                    self.occupied[(k[0] * sy + k[1] * sz + k[2]) as usize] = 1;
                }
                self.occupied.iter().map(|&o| o as usize).sum()
            }
            None => self.count_sparse(inv_edge),
        }
    }

    fn count_sparse(&mut self, inv_edge: f64) -> usize {
        self.keys.clear();
        self.keys.extend(self.rel.iter().map(|r| packed_key(cell_of(r, inv_edge))));
        self.keys.len()
    }

    /// Representative of every occupied cell, in lexicographic cell order.
    fn representatives(&self, edge: f64) -> Vec<usize> {
        let inv_edge = 1.0 / edge;
        let Some(([sy, sz], total)) = self.dense_layout(inv_edge) else {
            return self.representatives_sparse(inv_edge);
        };
        let mut slots = vec![(EMPTY_SLOT, f64::INFINITY); total];
        for (i, r) in self.rel.iter().enumerate() {
            let (k, d) = scaled_cell(r, inv_edge);
            let slot = &mut slots[(k[0] * sy + k[1] * sz + k[2]) as usize];
            // strict `<` keeps the lowest index on ties
            if d < slot.1 {
                *slot = (i as u32, d);
            }
        }
        slots.into_iter().filter(|s| s.0 != EMPTY_SLOT).map(|s| s.0 as usize).collect()
    }

    fn representatives_sparse(&self, inv_edge: f64) -> Vec<usize> {
        let mut cells: FxHashMap<u64, (usize, f64)> = FxHashMap::default();
        for (i, r) in self.rel.iter().enumerate() {
            let (k, d) = scaled_cell(r, inv_edge);
            cells
                .entry(packed_key(k))
                .and_modify(|best| {
                    if d < best.1 {
                        *best = (i, d);
                    }
                })
                .or_insert((i, d));
        }
        let mut cells: Vec<(u64, usize)> = cells.into_iter().map(|(k, (i, _))| (k, i)).collect();
        cells.sort_unstable_by_key(|&(k, _)| k);
        cells.into_iter().map(|(_, i)| i).collect()
    }
}

#[inline]
fn cell_of(rel: &[f64; 3], inv_edge: f64) -> [u32; 3] {
    rel.map(|c| (c * inv_edge) as u32)
}

#[inline]
fn packed_key(k: [u32; 3]) -> u64 {
    debug_assert!(k.iter().all(|&c| c < 1 << KEY_BITS));
    ((k[0] as u64) << (2 * KEY_BITS)) | ((k[1] as u64) << KEY_BITS) | k[2] as u64
}

/// Searches cell edges for an occupied-cell count in `[lo, hi]`. Returns
/// the representatives (cell order) of the best pass seen.
fn search_cell_edge(cloud: &PointCloud, n: usize, config: &CellIfpsConfig) -> Result<Vec<usize>> {
    let bbox = bounding_box(cloud)?;
    let extent = bbox.extent();
    let max_extent = extent.x.max(extent.y).max(extent.z);
    let min_edge = if max_extent > 0.0 { max_extent / KEY_LIMIT } else { 0.0 };
    let max_edge = if max_extent > 0.0 { 2.0 * max_extent } else { 1.0 };
    let clamp = |e: f64| e.clamp(min_edge.max(f64::MIN_POSITIVE), max_edge);
    let dims = extent
        .to_array()
        .iter()
        .filter(|&&e| e >= DEGENERATE_EXTENT)
        .count()
        .max(1) as f64;

    // The occupied-cell count is a noisy staircase in the edge: whenever an
    // extent crosses a whole number of cells, a face's layer of cells splits
    // off or merges, so counts jump by several percent and a fixed narrow
    // window is hit by luck. The accepted overshoot instead widens
    // each round, trading another pass against a longer correction. A pass
    // costs O(|cloud|), so the step scales with the input size.
    let step = config.count_tolerance * cloud.len() as f64;
    let target = n as f64 + step.max(SEARCH_AIM_ABOVE * n as f64);

    let mut pass = CellPass::new(cloud.points(), bbox.min_corner, extent);
    let mut best: Option<(f64, usize)> = None;
    let mut edge = clamp(edge_from_extent(extent, n, config.overshoot_factor));
    let mut prev: Option<(f64, usize)> = None;
    // largest edge known to give too many cells, smallest giving too few
    let mut too_fine: Option<f64> = None;
    let mut too_coarse: Option<f64> = None;

    for round in 0..config.max_resize_rounds {
        let count = pass.count(edge);
        if best.is_none_or(|(_, b)| preferable(count, b, n)) {
            best = Some((edge, count));
        }
        let accept = n + (step * (round + 1) as f64).floor() as usize;
        if best.is_some_and(|(_, b)| (n..=accept).contains(&b)) || round + 1 == config.max_resize_rounds {
            break;
        }

        if count as f64 > target {
            too_fine = Some(too_fine.map_or(edge, |e: f64| e.max(edge)));
        } else {
            too_coarse = Some(too_coarse.map_or(edge, |e: f64| e.min(edge)));
        }
        // the count jumped across the window between two nearly equal edges;
        // narrowing further only revisits the same plateaus
        if let (Some(f), Some(c)) = (too_fine, too_coarse) {
            if best.is_some_and(|(_, b)| b >= n) && c / f - 1.0 < NARROW_BRACKET {
                break;
            }
        }

        // occupied cells scale roughly like edge^-d; estimate d locally
        let exponent = match prev {
            Some((pe, pc)) if pc != count && pe != edge => {
                ((pc as f64 / count as f64).ln() / (edge / pe).ln()).clamp(0.5, 3.0)
            }
            _ => dims,
        };
        let mut next = clamp(edge * (count as f64 / target).powf(1.0 / exponent));
        if let (Some(f), Some(c)) = (too_fine, too_coarse) {
            if !(next > f && next < c) {
                next = (f * c).sqrt();
            }
        }
        if next == edge {
            break;
        }
        prev = Some((edge, count));
        edge = next;
    }

    let (best_edge, _) = best.expect("at least one cell pass runs");
    Ok(pass.representatives(best_edge))
}

/// Ranks a candidate cell-pass count against the incumbent: any count at or
/// above `n` beats one below it; above `n` fewer is better, below `n` more is.
fn preferable(candidate: usize, incumbent: usize, n: usize) -> bool {
    match (candidate >= n, incumbent >= n) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => candidate < incumbent,
        (false, false) => candidate > incumbent,
    }
}

/// Cell-IFPS: cell sampling followed by an IFPS correction to exactly `n`
/// points.
///
/// 1. Search for a cell edge (starting from [`estimate_cell_edge`]) and take
///    one representative per occupied cell as the sample set `S`.
/// 2. If `|S| = n`, done.
/// 3. If `|S| > n`, IFPS over `S` from a seeded start point; in
///    [`RemovalMode::Literal`] the `|S| - n` picked points are removed from
///    `S`, in [`RemovalMode::KeepFps`] the first `n` picks are kept.
/// 4. If `|S| < n`, IFPS over the remaining points with `S` as the already
///    selected set appends `n - |S|` points.
pub fn cell_ifps(cloud: &PointCloud, n: usize, config: &CellIfpsConfig) -> Result<SampleSelection> {
    check_count(cloud, n)?;
    config.validate()?;
    if n == cloud.len() {
        return Ok(SampleSelection::new_unchecked(n, (0..n).collect()));
    }

    let cells = search_cell_edge(cloud, n, config)?;
    let current = cells.len();
    let indices = match current.cmp(&n) {
        std::cmp::Ordering::Equal => cells,
        std::cmp::Ordering::Greater => shrink_to(cloud, cells, n, config),
        std::cmp::Ordering::Less => grow_to(cloud, cells, n),
    };
    Ok(SampleSelection::new_unchecked(cloud.len(), indices))
}

/// Below this many picks the bucket setup costs more than it saves.
const BUCKETED_MIN_PICKS: usize = 16;

/// [`farthest_point_extend`] for the correction step, bucketed when the
/// number of picks makes it pay off. Both give the same picks.
fn correction_extend(points: &[Point3], min_d2: &mut [f64], last: Option<usize>, count: usize, out: &mut Vec<usize>) {
    if count < BUCKETED_MIN_PICKS {
        farthest_point_extend(points, min_d2, last, count, out);
    } else {
        BucketedFps::new(points, min_d2).extend(last, count, out);
    }
}

fn shrink_to(cloud: &PointCloud, cells: Vec<usize>, n: usize, config: &CellIfpsConfig) -> Vec<usize> {
    let subset: Vec<Point3> = cells.iter().map(|&i| cloud[i]).collect();
    let start = seed_index(config.rng_seed, subset.len());
    let picks = match config.removal {
        RemovalMode::Literal => subset.len() - n,
        RemovalMode::KeepFps => n,
    };
    let mut min_d2 = vec![f64::INFINITY; subset.len()];
    min_d2[start] = f64::NEG_INFINITY;
    let mut picked = Vec::with_capacity(picks);
    picked.push(start);
    correction_extend(&subset, &mut min_d2, Some(start), picks - 1, &mut picked);

    match config.removal {
        RemovalMode::Literal => {
            let mut removed = vec![false; subset.len()];
            for &j in &picked {
                removed[j] = true;
            }
            cells
                .into_iter()
                .zip(removed)
                .filter_map(|(i, gone)| (!gone).then_some(i))
                .collect()
        }
        RemovalMode::KeepFps => picked.into_iter().map(|j| cells[j]).collect(),
    }
}

fn grow_to(cloud: &PointCloud, mut cells: Vec<usize>, n: usize) -> Vec<usize> {
    let mut in_sample = vec![false; cloud.len()];
    for &i in &cells {
        in_sample[i] = true;
    }
    let rest: Vec<usize> = (0..cloud.len()).filter(|&i| !in_sample[i]).collect();
    let rest_points: Vec<Point3> = rest.iter().map(|&i| cloud[i]).collect();
    let sample_points: Vec<Point3> = cells.iter().map(|&i| cloud[i]).collect();
    let index = NnIndex::from_points(&sample_points);
    let mut min_d2: Vec<f64> = rest_points.iter().map(|p| index.nearest(p).1).collect();

    let mut added = Vec::with_capacity(n - cells.len());
    correction_extend(&rest_points, &mut min_d2, None, n - cells.len(), &mut added);
    cells.extend(added.into_iter().map(|j| rest[j]));
    cells
}

/// Downsampler used by the two-stage pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sampler {
    Ifps,
    CellIfps,
}

impl Sampler {
    pub fn sample(&self, cloud: &PointCloud, n: usize, config: &CellIfpsConfig) -> Result<SampleSelection> {
        match self {
            Sampler::Ifps => ifps(cloud, n, config.rng_seed),
            Sampler::CellIfps => cell_ifps(cloud, n, config),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Sampler::Ifps => "ifps",
            Sampler::CellIfps => "cell_ifps",
        }
    }
}

impl std::fmt::Display for Sampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The three input resolutions of the completion network: the original
/// cloud, a 1024-point sample of it, and a 512-point sample of that.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiScaleClouds {
    pub full: PointCloud,
    pub mid: PointCloud,
    pub coarse: PointCloud,
}

pub fn multiscale_sample(cloud: &PointCloud, sampler: Sampler, config: &CellIfpsConfig) -> Result<MultiScaleClouds> {
    if cloud.len() < PIPELINE_MIN_INPUT {
        return Err(Error::BelowMinimumScale {
            available: cloud.len(),
            required: PIPELINE_MIN_INPUT,
        });
    }
    let [mid_size, coarse_size] = PIPELINE_STAGE_SIZES;
    let mid = if cloud.len() == mid_size {
        cloud.clone()
    } else {
        cloud.select(&sampler.sample(cloud, mid_size, config)?)
    };
    let coarse = mid.select(&sampler.sample(&mid, coarse_size, config)?);
    Ok(MultiScaleClouds {
        full: cloud.clone(),
        mid,
        coarse,
    })
}
