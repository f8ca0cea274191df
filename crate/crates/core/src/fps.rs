//! Farthest-point selection that skips work it can prove is useless.
//!
//! Points are grouped into the occupied cells of a coarse grid. Each bucket
//! keeps the bounding box of its points and the largest min-distance among
//! its unselected points. When a point is selected, a bucket whose box is at
//! least that far from the new point cannot have any distance lowered, so it
//! is skipped. The picks, including lowest-index tie-breaking, are identical
//! to the plain linear sweep.

use crate::geometry::Point3;

/// Target number of points per bucket.
const BUCKET_POINTS: f64 = 12.0;

struct Bucket {
    start: usize,
    end: usize,
    lo: Point3,
    hi: Point3,
    /// Largest `min_d2` in the bucket and the original index holding it
    /// (lowest on ties).
    best: f64,
    best_id: usize,
}

pub(crate) struct BucketedFps {
    /// Points, original indices and current min squared distances in bucket
    /// order; within a bucket, original indices ascend.
    points: Vec<Point3>,
    ids: Vec<usize>,
    min_d2: Vec<f64>,
    /// Position in bucket order of each original index.
    slot: Vec<usize>,
    buckets: Vec<Bucket>,
}

impl BucketedFps {
    /// `min_d2[i]` is point `i`'s squared distance to the already selected
    /// set (`-inf` for selected points, `+inf` if nothing is selected yet).
    pub(crate) fn new(points: &[Point3], min_d2: &[f64]) -> Self {
        debug_assert_eq!(points.len(), min_d2.len());
        let (cell, cells) = grid_cells(points);

        // counting sort by cell; scanning points in index order keeps each
        // bucket's indices ascending
        let mut start_of = vec![0usize; cells + 1];
        for &c in &cell {
            start_of[c as usize + 1] += 1;
        }
        for c in 0..cells {
            start_of[c + 1] += start_of[c];
        }
        let mut next = start_of.clone();
        let mut ids = vec![0usize; points.len()];
        for (i, &c) in cell.iter().enumerate() {
            ids[next[c as usize]] = i;
            next[c as usize] += 1;
        }

        let mut slot = vec![0; points.len()];
        for (pos, &i) in ids.iter().enumerate() {
            slot[i] = pos;
        }
        let mut fps = BucketedFps {
            points: ids.iter().map(|&i| points[i]).collect(),
            min_d2: ids.iter().map(|&i| min_d2[i]).collect(),
            ids,
            slot,
            buckets: Vec::new(),
        };
        for c in 0..cells {
            let (start, end) = (start_of[c], start_of[c + 1]);
            if start == end {
                continue;
            }
            let slice = &fps.points[start..end];
            let lo = slice.iter().fold(slice[0], |a, p| a.component_min(p));
            let hi = slice.iter().fold(slice[0], |a, p| a.component_max(p));
            fps.buckets.push(Bucket {
                start,
                end,
                lo,
                hi,
                best: f64::NEG_INFINITY,
                best_id: usize::MAX,
            });
            fps.refresh(fps.buckets.len() - 1, None);
        }
        fps
    }

    /// Recomputes a bucket's maximum, first folding in distances to `anchor`.
    fn refresh(&mut self, b: usize, anchor: Option<Point3>) {
        let bucket = &mut self.buckets[b];
        let points = &self.points[bucket.start..bucket.end];
        let min_d2 = &mut self.min_d2[bucket.start..bucket.end];
        let mut best = f64::NEG_INFINITY;
        let mut best_k = 0;
        for (k, (p, m)) in points.iter().zip(min_d2.iter_mut()).enumerate() {
            if let Some(a) = anchor {
                *m = m.min(p.dist2(&a));
            }
            let better = *m > best;
            best = if better { *m } else { best };
            best_k = if better { k } else { best_k };
        }
        bucket.best = best;
        bucket.best_id = self.ids[bucket.start + best_k];
    }

    /// Marks original index `i` selected and lowers every distance it beats.
    fn select(&mut self, i: usize) {
        let anchor = self.points[self.slot[i]];
        self.min_d2[self.slot[i]] = f64::NEG_INFINITY;
        for b in 0..self.buckets.len() {
            let bucket = &self.buckets[b];
            // a rounded gap never exceeds the rounded distance of any point
            // inside the box, so this skip is exact
            if bucket.best_id != i && box_dist2(&anchor, &bucket.lo, &bucket.hi) >= bucket.best {
                continue;
            }
            self.refresh(b, Some(anchor));
        }
    }

    fn farthest(&self) -> Option<usize> {
        let mut best = f64::NEG_INFINITY;
        let mut best_id = usize::MAX;
        for bucket in &self.buckets {
            if bucket.best > best || (bucket.best == best && bucket.best_id < best_id) {
                best = bucket.best;
                best_id = bucket.best_id;
            }
        }
        (best > f64::NEG_INFINITY).then_some(best_id)
    }

    /// Same contract as the linear sweep: selects `last` first if given, then
    /// appends `count` farthest points to `out`.
    pub(crate) fn extend(&mut self, mut last: Option<usize>, count: usize, out: &mut Vec<usize>) {
        for _ in 0..count {
            if let Some(l) = last {
                self.select(l);
            }
            let next = self.farthest().expect("farthest point search ran out of candidates");
            out.push(next);
            last = Some(next);
        }
    }
}

#[inline]
fn box_dist2(p: &Point3, lo: &Point3, hi: &Point3) -> f64 {
    let gx = (lo.x - p.x).max(p.x - hi.x).max(0.0);
    let gy = (lo.y - p.y).max(p.y - hi.y).max(0.0);
    let gz = (lo.z - p.z).max(p.z - hi.z).max(0.0);
    gx * gx + gy * gy + gz * gz
}

/// Cell number of every point, and the cell count, for a grid over the
/// points' bounding box with at most `len / BUCKET_POINTS` cells. Axes
/// shorter than the cell edge get a single layer.
fn grid_cells(points: &[Point3]) -> (Vec<u32>, usize) {
    let Some(&first) = points.first() else {
        return (Vec::new(), 0);
    };
    let (lo, hi) = points
        .iter()
        .fold((first, first), |(lo, hi), p| (lo.component_min(p), hi.component_max(p)));
    let ext = (hi - lo).to_array();
    let target = (points.len() as f64 / BUCKET_POINTS).max(1.0);
    let mut live: Vec<f64> = ext.iter().copied().filter(|&e| e > 0.0).collect();
    live.sort_by(f64::total_cmp);
    let mut edge = f64::INFINITY;
    while let Some(&shortest) = live.first() {
        edge = (live.iter().product::<f64>() / target).powf(1.0 / live.len() as f64);
        if shortest >= edge {
            break;
        }
        live.remove(0);
    }
    let dims = ext.map(|e| ((e / edge) as u32).max(1));
    let scale = [0, 1, 2].map(|a| if ext[a] > 0.0 { dims[a] as f64 / ext[a] } else { 0.0 });
    let lo = lo.to_array();
    let cells = points
        .iter()
        .map(|p| {
            let c = p.to_array();
            let k = [0, 1, 2].map(|a| (((c[a] - lo[a]) * scale[a]) as u32).min(dims[a] - 1));
            (k[0] * dims[1] + k[1]) * dims[2] + k[2]
        })
        .collect();
    (cells, dims.iter().map(|&d| d as usize).product())
}
