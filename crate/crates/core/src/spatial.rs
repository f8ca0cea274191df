//! Acceleration structures: a uniform cell grid for cell sampling and an
//! exact kd-tree for nearest-neighbor queries.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::geometry::{bounding_box, Point3, PointCloud};

/// Integer cell coordinate `floor((p - origin) / cell_edge)`.
pub type CellKey = [i64; 3];

/// Partition of a cloud into axis-aligned cubic cells.
///
/// Every point index lives in exactly one cell. Cells iterate in
/// lexicographic key order.
#[derive(Debug, Clone)]
pub struct CellGrid {
    cell_edge: f64,
    origin: Point3,
    cells: BTreeMap<CellKey, Vec<usize>>,
}

impl CellGrid {
    pub fn cell_edge(&self) -> f64 {
        self.cell_edge
    }

    pub fn origin(&self) -> Point3 {
        self.origin
    }

    pub fn cell_of(&self, p: &Point3) -> CellKey {
        cell_key(p, &self.origin, 1.0 / self.cell_edge)
    }

    pub fn cell_center(&self, key: &CellKey) -> Point3 {
        cell_center(key, &self.origin, self.cell_edge)
    }

    /// Number of occupied cells.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn members(&self, key: &CellKey) -> Option<&[usize]> {
        self.cells.get(key).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CellKey, &[usize])> {
        self.cells.iter().map(|(k, v)| (k, v.as_slice()))
    }
}

#[inline]
pub(crate) fn cell_key(p: &Point3, origin: &Point3, inv_edge: f64) -> CellKey {
    [
        ((p.x - origin.x) * inv_edge).floor() as i64,
        ((p.y - origin.y) * inv_edge).floor() as i64,
        ((p.z - origin.z) * inv_edge).floor() as i64,
    ]
}

#[inline]
pub(crate) fn cell_center(key: &CellKey, origin: &Point3, edge: f64) -> Point3 {
    Point3::new(
        origin.x + (key[0] as f64 + 0.5) * edge,
        origin.y + (key[1] as f64 + 0.5) * edge,
        origin.z + (key[2] as f64 + 0.5) * edge,
    )
}

/// Bins every point of `cloud` into cubic cells of edge `cell_edge`, with the
/// grid anchored at the bounding-box minimum corner.
pub fn build_grid(cloud: &PointCloud, cell_edge: f64) -> Result<CellGrid> {
    if !(cell_edge.is_finite() && cell_edge > 0.0) {
        return Err(invalid(format!("cell edge must be positive, got {cell_edge}")));
    }
    let origin = bounding_box(cloud)?.min_corner;
    let inv_edge = 1.0 / cell_edge;
    let mut cells: BTreeMap<CellKey, Vec<usize>> = BTreeMap::new();
    for (i, p) in cloud.iter().enumerate() {
        cells.entry(cell_key(p, &origin, inv_edge)).or_default().push(i);
    }
    Ok(CellGrid {
        cell_edge,
        origin,
        cells,
    })
}

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: u32, end: u32 },
    Split { axis: u8, value: f64, left: u32, right: u32 },
}

/// Exact nearest-neighbor index (kd-tree) over a fixed set of points.
///
/// Ties on squared distance resolve to the lowest point index.
#[derive(Debug, Clone)]
pub struct NnIndex {
    points: Vec<Point3>,
    order: Vec<u32>,
    nodes: Vec<Node>,
}

impl NnIndex {
    pub fn new(cloud: &PointCloud) -> Result<Self> {
        cloud.ensure_non_empty()?;
        Ok(Self::from_points(cloud.points()))
    }

    pub(crate) fn from_points(points: &[Point3]) -> Self {
        assert!(!points.is_empty(), "NnIndex over empty point set");
        assert!(points.len() < u32::MAX as usize);
        let mut index = NnIndex {
            points: points.to_vec(),
            order: (0..points.len() as u32).collect(),
            nodes: Vec::with_capacity(2 * points.len() / LEAF_SIZE + 1),
        };
        index.build(0, points.len());
        index
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn build(&mut self, start: usize, end: usize) -> u32 {
        let id = self.nodes.len() as u32;
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf {
                start: start as u32,
                end: end as u32,
            });
            return id;
        }

        let slice = &mut self.order[start..end];
        let points = &self.points;
        let mut lo = points[slice[0] as usize];
        let mut hi = lo;
        for &i in slice.iter() {
            let p = &points[i as usize];
            lo = lo.component_min(p);
            hi = hi.component_max(p);
        }
        let spread = hi - lo;
        if spread.x == 0.0 && spread.y == 0.0 && spread.z == 0.0 {
            // all coincident; splitting cannot separate them
            self.nodes.push(Node::Leaf {
                start: start as u32,
                end: end as u32,
            });
            return id;
        }
        let axis = if spread.x >= spread.y && spread.x >= spread.z {
            0
        } else if spread.y >= spread.z {
            1
        } else {
            2
        };

        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| {
            points[a as usize].axis(axis).total_cmp(&points[b as usize].axis(axis))
        });
        let value = points[slice[mid] as usize].axis(axis);

        self.nodes.push(Node::Split {
            axis: axis as u8,
            value,
            left: 0,
            right: 0,
        });
        let left = self.build(start, start + mid);
        let right = self.build(start + mid, end);
        if let Node::Split { left: l, right: r, .. } = &mut self.nodes[id as usize] {
            *l = left;
            *r = right;
        }
        id
    }

    /// Returns `(point_index, squared_distance)` of the nearest indexed point.
    pub fn nearest(&self, query: &Point3) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(0, query, &mut best);
        best
    }

    fn search(&self, node: u32, query: &Point3, best: &mut (usize, f64)) {
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start as usize..end as usize] {
                    let i = i as usize;
                    let d = self.points[i].dist2(query);
                    if d < best.1 || (d == best.1 && i < best.0) {
                        *best = (i, d);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = query.axis(axis as usize) - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.search(near, query, best);
                // `<=` keeps equal-distance candidates with lower indices reachable
                if diff * diff <= best.1 {
                    self.search(far, query, best);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cloud(points: &[[f64; 3]]) -> PointCloud {
        PointCloud::new(points.iter().map(|&p| p.into()).collect()).unwrap()
    }

    fn brute_nearest(points: &[Point3], q: &Point3) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, p) in points.iter().enumerate() {
            let d = p.dist2(q);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    #[test]
    fn grid_examples() {
        let g = build_grid(&cloud(&[[0.1, 0.0, 0.0], [0.9, 0.0, 0.0]]), 1.0).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.members(&[0, 0, 0]), Some(&[0usize, 1][..]));

        let g = build_grid(&cloud(&[[0.1, 0.0, 0.0], [1.1, 0.0, 0.0]]), 1.0).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.members(&[0, 0, 0]), Some(&[0usize][..]));
        assert_eq!(g.members(&[1, 0, 0]), Some(&[1usize][..]));

        let g = build_grid(&cloud(&[[3.0, -2.0, 7.5]]), 0.01).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.iter().next().unwrap().1, &[0]);
    }

    #[test]
    fn grid_rejects_bad_edge() {
        let c = cloud(&[[0.0, 0.0, 0.0]]);
        assert!(build_grid(&c, 0.0).is_err());
        assert!(build_grid(&c, -1.0).is_err());
        assert!(build_grid(&PointCloud::default(), 1.0).is_err());
    }

    #[test]
    fn nearest_examples() {
        let c = cloud(&[[0.0, 0.0, 0.0], [3.0, 0.0, 0.0]]);
        let idx = NnIndex::new(&c).unwrap();
        assert_eq!(idx.nearest(&Point3::new(3.0, 0.0, 0.0)), (1, 0.0));
        assert_eq!(idx.nearest(&Point3::new(1.0, 0.0, 0.0)), (0, 1.0));
        assert_eq!(idx.nearest(&Point3::new(1.5, 0.0, 0.0)), (0, 2.25));
    }

    #[test]
    fn nearest_tie_breaks_to_lowest_index_across_subtrees() {
        // many duplicates force ties to straddle leaves
        let mut pts = Vec::new();
        for i in 0..64 {
            pts.push([(i % 4) as f64, 0.0, 0.0]);
        }
        let c = cloud(&pts);
        let idx = NnIndex::new(&c).unwrap();
        for q in 0..4 {
            let (i, d) = idx.nearest(&Point3::new(q as f64, 0.0, 0.0));
            assert_eq!((i, d), (q, 0.0));
        }
        assert_eq!(idx.nearest(&Point3::new(1.5, 0.0, 0.0)).0, 1);
    }

    fn arb_cloud(max: usize) -> impl Strategy<Value = Vec<Point3>> {
        prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64), 1..=max)
            .prop_map(|v| v.into_iter().map(|(x, y, z)| Point3::new(x, y, z)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn nearest_matches_linear_scan(points in arb_cloud(512), queries in arb_cloud(100)) {
            let idx = NnIndex::from_points(&points);
            for q in &queries {
                prop_assert_eq!(idx.nearest(q), brute_nearest(&points, q));
            }
        }

        #[test]
        fn nearest_matches_linear_scan_on_lattice(points in prop::collection::vec((0..4i32, 0..4i32, 0..2i32), 1..200),
                                                  queries in prop::collection::vec((0..8i32, 0..8i32, 0..4i32), 1..50)) {
            let points: Vec<Point3> = points.into_iter().map(|(x, y, z)| Point3::new(x as f64, y as f64, z as f64)).collect();
            let idx = NnIndex::from_points(&points);
            for (x, y, z) in queries {
                let q = Point3::new(x as f64 * 0.5, y as f64 * 0.5, z as f64 * 0.5);
                prop_assert_eq!(idx.nearest(&q), brute_nearest(&points, &q));
            }
        }

        #[test]
        fn grid_partitions_indices(points in arb_cloud(300), edge in 0.05..5.0f64) {
            let c = PointCloud::new(points).unwrap();
            let g = build_grid(&c, edge).unwrap();
            let mut all: Vec<usize> = g.iter().flat_map(|(_, m)| m.iter().copied()).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..c.len()).collect::<Vec<_>>());
            for (key, members) in g.iter() {
                for &i in members {
                    prop_assert_eq!(&g.cell_of(&c[i]), key);
                }
            }
        }
    }
}
