//! 0-dimensional persistence of finite point sets.
//!
//! Every component of a point cloud is born at 0, so a diagram is stored as
//! the sorted multiset of death values only. Deaths are the distances at
//! which two growing balls first touch, which makes the diagram equal to the
//! edge weights of a Euclidean minimum spanning tree. On the line that tree
//! is just the chain of neighbours, so the diagram is the list of gaps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::TimeSeries;

/// Largest diagram accepted by [`bottleneck`].
pub const BOTTLENECK_LIMIT: usize = 256;

/// Sorted multiset of death values.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PersistenceDiagram {
    deaths: Vec<f64>,
}

impl PersistenceDiagram {
    pub fn new(mut deaths: Vec<f64>) -> Result<Self> {
        if deaths.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidParameter(
                "death values must be finite and nonnegative".into(),
            ));
        }
        deaths.sort_unstable_by(f64::total_cmp);
        Ok(Self { deaths })
    }

    pub fn deaths(&self) -> &[f64] {
        &self.deaths
    }

    pub fn len(&self) -> usize {
        self.deaths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deaths.is_empty()
    }

    /// Number of deaths strictly above `r`.
    pub fn count_above(&self, r: f64) -> usize {
        self.deaths.len() - self.deaths.partition_point(|&d| d <= r)
    }

    /// Number of components of the union of balls of diameter `r`.
    pub fn components_at(&self, r: f64) -> usize {
        self.count_above(r) + 1
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.deaths.iter().map(|d| d * factor).collect())
    }
}

impl TryFrom<Vec<f64>> for PersistenceDiagram {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PersistenceDiagram> for Vec<f64> {
    fn from(d: PersistenceDiagram) -> Self {
        d.deaths
    }
}

/// Finite set of points in ℝ^D, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "point clouds need at least one dimension");
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput)?;
        let mut cloud = Self::new(first.as_ref().len().max(1));
        for p in points {
            cloud.push(p.as_ref())?;
        }
        Ok(cloud)
    }

    /// Points on the real line.
    pub fn from_line(values: &[f64]) -> Self {
        Self {
            dim: 1,
            coords: values.to_vec(),
        }
    }

    pub fn push(&mut self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        if point.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coordinate".into()));
        }
        self.coords.extend_from_slice(point);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Strictly increasing sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSet {
    times: Vec<f64>,
}

impl SupportSet {
    /// Sorts `times`; duplicates are rejected.
    pub fn new(mut times: Vec<f64>) -> Result<Self> {
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("non-finite support time".into()));
        }
        times.sort_unstable_by(f64::total_cmp);
        if times.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate support time".into()));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Times of the samples whose value exceeds `level`.
pub fn extract_support(ts: &TimeSeries, level: f64) -> Result<SupportSet> {
    let times: Vec<f64> = ts
        .times()
        .iter()
        .zip(ts.values())
        .filter(|(_, &v)| v > level)
        .map(|(&t, _)| t)
        .collect();
    if times.is_empty() {
        return Err(Error::EmptySupport);
    }
    // TimeSeries already guarantees strictly increasing times.
    Ok(SupportSet { times })
}

/// Diagram of a subset of the line: its consecutive gaps.
pub fn diagram_1d(support: &SupportSet) -> Result<PersistenceDiagram> {
    if support.is_empty() {
        return Err(Error::EmptyInput);
    }
    let gaps = support.times.windows(2).map(|w| w[1] - w[0]).collect();
    PersistenceDiagram::new(gaps)
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets holding `a` and `b`; false if they were already one.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// Diagram of a point cloud: edge weights of a Euclidean minimum spanning
/// tree, found by Kruskal's algorithm over all pairs sorted by distance.
///
/// Equal distances need no tie-breaking: every minimum spanning tree of a
/// graph has the same multiset of edge weights, so whichever tree the sort
/// order produces yields the same diagram.
pub fn diagram_point_cloud(cloud: &PointCloud) -> Result<PersistenceDiagram> {
    let n = cloud.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((cloud.distance(i, j), i as u32, j as u32));
        }
    }
    sort_edges(&mut edges);

    let mut forest = UnionFind::new(n);
    let mut deaths = Vec::with_capacity(n - 1);
    for (w, i, j) in edges {
        if forest.union(i as usize, j as usize) {
            deaths.push(w);
            if forest.components() == 1 {
                break;
            }
        }
    }
    PersistenceDiagram::new(deaths)
}

#[cfg(feature = "parallel")]
fn sort_edges(edges: &mut [(f64, u32, u32)]) {
    use rayon::slice::ParallelSliceMut;
    edges.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
}

#[cfg(not(feature = "parallel"))]
fn sort_edges(edges: &mut [(f64, u32, u32)]) {
    edges.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
}

/// Exact bottleneck distance between two diagrams.
///
/// A matched pair costs `|a - b|` and an unmatched point costs half its
/// value. The optimum equals one of these candidate costs, so the candidates
/// are sorted and binary-searched for the smallest one that admits a perfect
/// matching in the bipartite graph where each point may also pair with a
/// private "unmatched" slot.
pub fn bottleneck(dgm1: &PersistenceDiagram, dgm2: &PersistenceDiagram) -> Result<f64> {
    let (a, b) = (dgm1.deaths(), dgm2.deaths());
    for d in [a, b] {
        if d.len() > BOTTLENECK_LIMIT {
            return Err(Error::DiagramTooLarge {
                size: d.len(),
                limit: BOTTLENECK_LIMIT,
            });
        }
    }
    if a.is_empty() && b.is_empty() {
        return Ok(0.0);
    }

    let mut candidates: Vec<f64> = a
        .iter()
        .chain(b)
        .map(|d| d / 2.0)
        .chain(a.iter().flat_map(|x| b.iter().map(move |y| (x - y).abs())))
        .collect();
    candidates.sort_unstable_by(f64::total_cmp);
    candidates.dedup();

    // The largest candidate always works (everything unmatched is feasible
    // at max(d)/2 <= largest candidate).
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching_within(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}

/// Whether every point of `a` and `b` can be matched or left unmatched with
/// cost at most `delta`.
fn perfect_matching_within(a: &[f64], b: &[f64], delta: f64) -> bool {
    // Augmented bipartite graph: left is a[..] followed by one "unmatched"
    // slot per point of b; right is b[..] followed by one slot per point of a.
    // A point may use only its own slot. Slot-to-slot edges are free.
    let k = a.len();
    let l = b.len();
    let n = k + l;
    let adj = |u: usize, v: usize| -> bool {
        match (u < k, v < l) {
            (true, true) => (a[u] - b[v]).abs() <= delta,
            (true, false) => v - l == u && a[u] / 2.0 <= delta,
            (false, true) => u - k == v && b[v] / 2.0 <= delta,
            (false, false) => true,
        }
    };
    let mut match_right: Vec<Option<usize>> = vec![None; n];
    for u in 0..n {
        let mut seen = vec![false; n];
        if !augment(u, n, &adj, &mut seen, &mut match_right) {
            return false;
        }
    }
    true
}

fn augment(
    u: usize,
    n: usize,
    adj: &impl Fn(usize, usize) -> bool,
    seen: &mut [bool],
    match_right: &mut [Option<usize>],
) -> bool {
    for v in 0..n {
        if seen[v] || !adj(u, v) {
            continue;
        }
        seen[v] = true;
        let free = match match_right[v] {
            None => true,
            Some(w) => augment(w, n, adj, seen, match_right),
        };
        if free {
            match_right[v] = Some(u);
            return true;
        }
    }
    false
}

/// Two-sided Hausdorff distance under the Euclidean metric.
pub fn hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let directed = |x: &PointCloud, y: &PointCloud| {
        x.points()
            .map(|p| {
                y.points()
                    .map(|q| euclidean(p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dgm(v: &[f64]) -> PersistenceDiagram {
        PersistenceDiagram::new(v.to_vec()).unwrap()
    }

    #[test]
    fn gaps_of_line_set() {
        let s = SupportSet::new(vec![0.0, 1.0, 3.0, 6.0]).unwrap();
        assert_eq!(diagram_1d(&s).unwrap().deaths(), &[1.0, 2.0, 3.0]);
        let single = SupportSet::new(vec![5.0]).unwrap();
        assert!(diagram_1d(&single).unwrap().is_empty());
        let empty = SupportSet::new(vec![]).unwrap();
        assert!(matches!(diagram_1d(&empty), Err(Error::EmptyInput)));
    }

    #[test]
    fn support_rejects_duplicates() {
        assert!(SupportSet::new(vec![1.0, 2.0, 1.0]).is_err());
        assert_eq!(SupportSet::new(vec![3.0, 1.0]).unwrap().times(), &[1.0, 3.0]);
    }

    #[test]
    fn support_of_clean_train() {
        let ts = TimeSeries::uniform(
            0.0,
            0.1,
            (0..=64)
                .map(|i| crate::signal::pulse_train(i as f64 * 0.1, 2.0, 0.5).unwrap())
                .collect(),
        )
        .unwrap();
        let s = extract_support(&ts, 0.5).unwrap();
        let inside = |t: f64| {
            [(0.0, 0.5), (2.0, 2.5), (4.0, 4.5), (6.0, 6.4)]
                .iter()
                .any(|&(lo, hi)| t >= lo - 1e-9 && t <= hi + 1e-9)
        };
        assert!(s.times().iter().all(|&t| inside(t)));
        assert_eq!(s.len(), 6 + 6 + 6 + 5);

        let zeros = TimeSeries::uniform(0.0, 1.0, vec![0.0; 10]).unwrap();
        assert!(matches!(extract_support(&zeros, 0.5), Err(Error::EmptySupport)));
        // Inverted analysis picks up the complement.
        let inv = extract_support(&ts.inverted(), 0.5).unwrap();
        assert_eq!(inv.len() + s.len(), ts.len());
    }

    #[test]
    fn unit_square_and_collinear_clouds() {
        let square =
            PointCloud::from_points(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        assert_eq!(diagram_point_cloud(&square).unwrap().deaths(), &[1.0, 1.0, 1.0]);
        let line = PointCloud::from_points(&[[0.0, 0.0], [2.0, 0.0], [5.0, 0.0]]).unwrap();
        assert_eq!(diagram_point_cloud(&line).unwrap().deaths(), &[2.0, 3.0]);
        assert!(diagram_point_cloud(&PointCloud::new(2)).is_err());
        assert!(diagram_point_cloud(&PointCloud::from_line(&[4.0]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn tie_heavy_grid() {
        // A 5x4 lattice has many minimum spanning trees; all have 19 unit edges.
        let mut cloud = PointCloud::new(2);
        for i in 0..5 {
            for j in 0..4 {
                cloud.push(&[i as f64, j as f64]).unwrap();
            }
        }
        assert_eq!(diagram_point_cloud(&cloud).unwrap().deaths(), &[1.0; 19]);
        // Relabelling the points changes the tree but not the diagram.
        let mut rev = PointCloud::new(2);
        for p in cloud.points().collect::<Vec<_>>().into_iter().rev() {
            rev.push(p).unwrap();
        }
        assert_eq!(diagram_point_cloud(&rev).unwrap(), diagram_point_cloud(&cloud).unwrap());
    }

    #[test]
    fn bottleneck_small_cases() {
        assert_eq!(bottleneck(&dgm(&[2.0]), &dgm(&[2.0])).unwrap(), 0.0);
        let d = bottleneck(&dgm(&[1.5]), &dgm(&[1.4, 0.1])).unwrap();
        assert!((d - 0.1).abs() < 1e-12);
        assert_eq!(bottleneck(&dgm(&[]), &dgm(&[3.0])).unwrap(), 1.5);
        assert_eq!(bottleneck(&dgm(&[]), &dgm(&[])).unwrap(), 0.0);
        // Far apart single points: leaving both unmatched is cheaper.
        assert_eq!(bottleneck(&dgm(&[1.0]), &dgm(&[9.0])).unwrap(), 4.5);
    }

    #[test]
    fn bottleneck_rejects_oversized() {
        let big = dgm(&vec![1.0; BOTTLENECK_LIMIT + 1]);
        assert!(matches!(
            bottleneck(&big, &dgm(&[1.0])),
            Err(Error::DiagramTooLarge { .. })
        ));
    }

    #[test]
    fn hausdorff_cases() {
        let a = PointCloud::from_line(&[0.0, 1.0]);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        let b = PointCloud::from_line(&[0.2, 0.9, 5.0]);
        assert!((hausdorff(&a, &b).unwrap() - 4.0).abs() < 1e-12);
        let c = PointCloud::from_line(&[0.0]);
        let d = PointCloud::from_line(&[3.0]);
        assert_eq!(hausdorff(&c, &d).unwrap(), 3.0);
        assert!(hausdorff(&c, &PointCloud::new(1)).is_err());
        assert!(hausdorff(&c, &PointCloud::new(2)).is_err());
    }

    #[test]
    fn rejects_bad_diagrams() {
        assert!(PersistenceDiagram::new(vec![-1.0]).is_err());
        assert!(PersistenceDiagram::new(vec![f64::NAN]).is_err());
        assert_eq!(dgm(&[3.0, 1.0, 2.0]).deaths(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn diagram_serde_is_plain_array() {
        let d = dgm(&[0.5, 0.25]);
        assert_eq!(serde_json::to_string(&d).unwrap(), "[0.25,0.5]");
        let back: PersistenceDiagram = serde_json::from_str("[2.0,1.0]").unwrap();
        assert_eq!(back.deaths(), &[1.0, 2.0]);
        assert!(serde_json::from_str::<PersistenceDiagram>("[-2.0]").is_err());
    }

    fn line_set() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::btree_set(-10_000i64..10_000, 1..60)
            .prop_map(|s| s.into_iter().map(|v| v as f64 * 0.01).collect())
    }

    proptest! {
        #[test]
        fn diagram_size_is_one_less(points in line_set()) {
            let s = SupportSet::new(points.clone()).unwrap();
            prop_assert_eq!(diagram_1d(&s).unwrap().len(), points.len() - 1);
        }

        #[test]
        fn line_mst_matches_gaps(points in line_set()) {
            let s = SupportSet::new(points.clone()).unwrap();
            let gaps = diagram_1d(&s).unwrap();
            let mst = diagram_point_cloud(&PointCloud::from_line(&points)).unwrap();
            prop_assert_eq!(gaps.len(), mst.len());
            for (g, m) in gaps.deaths().iter().zip(mst.deaths()) {
                prop_assert!((g - m).abs() < 1e-9);
            }
        }

        #[test]
        fn components_follow_deaths(points in line_set(), r in 0.0f64..50.0) {
            // Sweep the intervals [p - r/2, p + r/2] directly.
            let mut pts = points.clone();
            pts.sort_by(f64::total_cmp);
            let mut components = 1;
            let mut reach = pts[0] + r / 2.0;
            for &p in &pts[1..] {
                if p - r / 2.0 > reach {
                    components += 1;
                }
                reach = reach.max(p + r / 2.0);
            }
            let d = diagram_1d(&SupportSet::new(points).unwrap()).unwrap();
            prop_assert_eq!(d.components_at(r), components);
        }

        #[test]
        fn bottleneck_symmetric_and_zero_on_self(
            a in prop::collection::vec(0.0f64..10.0, 0..6),
            b in prop::collection::vec(0.0f64..10.0, 0..6),
        ) {
            let (da, db) = (dgm(&a), dgm(&b));
            prop_assert_eq!(bottleneck(&da, &db).unwrap(), bottleneck(&db, &da).unwrap());
            prop_assert_eq!(bottleneck(&da, &da).unwrap(), 0.0);
        }
    }
}
