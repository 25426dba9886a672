//! The metric a block sum induces on point evaluations.
//!
//! On point states the sup over functions with commutator norm at most one
//! dualizes to geodesic distance in the weighted graph whose edges are the
//! modules; this module computes that graph metric and, for small supports,
//! checks it against a direct maximization over the constrained function
//! class (`lp_oracle`). Pairs the representation cannot see are at
//! distance infinity.

use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::space::FiniteMetricSpace;
use crate::triple::SpectralTripleSum;

const ORACLE_SUPPORT_LIMIT: usize = 64;

/// Geodesic distances over the support of a triple. Distances to points
/// outside the support are infinite; coincident support points would be the
/// same state, but validated spaces have no duplicate points.
pub struct InducedMetric {
    support: Vec<usize>,
    /// support-index -> dense position
    slot: Vec<Option<usize>>,
    /// dense |support| x |support| matrix of geodesic distances
    matrix: Vec<f64>,
}

impl InducedMetric {
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Induced distance between two space points (not support slots).
    pub fn distance(&self, u: usize, v: usize) -> f64 {
        if u == v {
            return 0.0;
        }
        match (self.slot.get(u).copied().flatten(), self.slot.get(v).copied().flatten()) {
            (Some(a), Some(b)) => self.matrix[a * self.support.len() + b],
            _ => f64::INFINITY,
        }
    }

    fn at(&self, a: usize, b: usize) -> f64 {
        self.matrix[a * self.support.len() + b]
    }
}

/// Shortest-path distances in the module graph, all support sources.
pub fn induced_metric(triple: &SpectralTripleSum) -> Result<InducedMetric> {
    if triple.is_empty() {
        return Err(Error::EmptyTriple(
            "induced metric of a triple with no modules".into(),
        ));
    }
    let support = triple.support();
    let n = support.len();
    let mut slot = vec![None; triple.space().len()];
    for (a, &p) in support.iter().enumerate() {
        slot[p] = Some(a);
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for m in triple.modules() {
        let a = slot[m.x].unwrap();
        let b = slot[m.y].unwrap();
        let w = m.dist.value();
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|src| dijkstra(&adj, src))
        .collect();
    let mut matrix = Vec::with_capacity(n * n);
    for row in rows {
        matrix.extend_from_slice(&row);
    }
    Ok(InducedMetric {
        support,
        slot,
        matrix,
    })
}

fn dijkstra(adj: &[Vec<(usize, f64)>], src: usize) -> Vec<f64> {
    #[derive(PartialEq)]
    struct State(f64, usize);
    impl Eq for State {}
    impl Ord for State {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            // reversed for a min-heap
            other.0.total_cmp(&self.0)
        }
    }
    impl PartialOrd for State {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }

    let mut dist = vec![f64::INFINITY; adj.len()];
    dist[src] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(State(0.0, src));
    while let Some(State(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(State(nd, v));
            }
        }
    }
    dist
}

/// Direct maximization of |f(s) - f(t)| over functions on the support with
/// |f(x) - f(y)| <= d(x,y) for every module {x,y}, computed by relaxing the
/// constraints to a fixed point. Test oracle; limited to small supports.
pub fn lp_oracle(triple: &SpectralTripleSum, s: usize, t: usize) -> Result<f64> {
    let support = triple.support();
    if support.len() > ORACLE_SUPPORT_LIMIT {
        return Err(Error::OracleTooLarge {
            limit: ORACLE_SUPPORT_LIMIT,
            got: support.len(),
        });
    }
    if s == t {
        return Ok(0.0);
    }
    let mut slot = std::collections::HashMap::new();
    for (a, &p) in support.iter().enumerate() {
        slot.insert(p, a);
    }
    let (Some(&a_s), Some(&a_t)) = (slot.get(&s), slot.get(&t)) else {
        // the function class is unconstrained at off-support points
        return Ok(f64::INFINITY);
    };
    let edges: Vec<(usize, usize, f64)> = triple
        .modules()
        .iter()
        .map(|m| (slot[&m.x], slot[&m.y], m.dist.value()))
        .collect();
    // f maximizing f(s) with f(t) = 0: relax every constraint until stable
    let mut f = vec![f64::INFINITY; support.len()];
    f[a_t] = 0.0;
    loop {
        let mut changed = false;
        for &(u, v, d) in &edges {
            if f[v] + d < f[u] {
                f[u] = f[v] + d;
                changed = true;
            }
            if f[u] + d < f[v] {
                f[v] = f[u] + d;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(f[a_s])
}

#[derive(Clone, Copy, Debug)]
pub enum ReportMode {
    /// Expect recovery of the space metric: |induced - d| <= tol.
    Exact,
    /// Expect d - tol <= induced <= (1+delta)*d + tol.
    Sandwich { delta: f64 },
}

#[derive(Clone, Debug)]
pub struct RatioViolation {
    pub s: usize,
    pub t: usize,
    pub d: f64,
    pub induced: f64,
}

/// Recovery-quality statistics of the induced metric against the space
/// metric over all support pairs.
pub struct MetricReport {
    pub induced: InducedMetric,
    pub mode: ReportMode,
    pub tol: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub violations: Vec<RatioViolation>,
}

impl MetricReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// CSV lines: s-id, t-id, d, d_induced, ratio.
    pub fn table_rows(&self, space: &FiniteMetricSpace) -> Vec<(String, String, f64, f64, f64)> {
        let sup = self.induced.support();
        let mut rows = Vec::new();
        for (a, &u) in sup.iter().enumerate() {
            for (b, &v) in sup.iter().enumerate().skip(a + 1) {
                let d = space.dist(u, v);
                let ind = self.induced.at(a, b);
                rows.push((space.point_id(u), space.point_id(v), d, ind, ind / d));
            }
        }
        rows
    }
}

/// Builds the induced metric and grades it against the space metric.
/// Tolerance is 1e-9 times the diameter: dyadic cases are exact, float
/// cases need slack. An empty triple yields an empty passing report.
pub fn metric_report(triple: &SpectralTripleSum, mode: ReportMode) -> Result<MetricReport> {
    if triple.is_empty() {
        return Ok(MetricReport {
            induced: InducedMetric {
                support: Vec::new(),
                slot: vec![None; triple.space().len()],
                matrix: Vec::new(),
            },
            mode,
            tol: 0.0,
            min_ratio: f64::NAN,
            max_ratio: f64::NAN,
            violations: Vec::new(),
        });
    }
    let space = triple.space();
    let induced = induced_metric(triple)?;
    let tol = 1e-9 * space.diameter();
    let sup = induced.support().to_vec();
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for (a, &u) in sup.iter().enumerate() {
        for (b, &v) in sup.iter().enumerate().skip(a + 1) {
            let d = space.dist(u, v);
            let ind = induced.at(a, b);
            let ratio = ind / d;
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
            let bad = match mode {
                ReportMode::Exact => (ind - d).abs() > tol,
                ReportMode::Sandwich { delta } => ind < d - tol || ind > (1.0 + delta) * d + tol,
            };
            if bad {
                violations.push(RatioViolation {
                    s: u,
                    t: v,
                    d,
                    induced: ind,
                });
            }
        }
    }
    Ok(MetricReport {
        induced,
        mode,
        tol,
        min_ratio,
        max_ratio,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{covering_chain, NetStrategy};
    use crate::dyadic::Dist;
    use crate::triple::{build_st_d, build_st_delta, SpectralTripleSum, TwoPointModule};
    use std::sync::Arc;

    fn three_point_space() -> Arc<FiniteMetricSpace> {
        Arc::new(
            FiniteMetricSpace::from_matrix(
                "three",
                vec![
                    vec![0.0, 1.0, 1.5],
                    vec![1.0, 0.0, 0.8],
                    vec![1.5, 0.8, 0.0],
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn single_module_gives_the_two_point_table() {
        // induced distance is d on the pair, 0 on the diagonal, infinite
        // everywhere the representation cannot see
        let space = three_point_space();
        let m = TwoPointModule::new(0, 1, Dist::Float(1.0)).unwrap();
        let st = SpectralTripleSum::from_modules(space, vec![m]);
        let ind = induced_metric(&st).unwrap();
        assert_eq!(ind.distance(0, 1), 1.0);
        assert_eq!(ind.distance(1, 0), 1.0);
        assert_eq!(ind.distance(0, 0), 0.0);
        assert_eq!(ind.distance(2, 2), 0.0);
        assert_eq!(ind.distance(0, 2), f64::INFINITY);
        assert_eq!(ind.distance(1, 2), f64::INFINITY);
    }

    #[test]
    fn exact_construction_recovers_the_metric() {
        let space = Arc::new(FiniteMetricSpace::random_cloud(30, 2, 17).unwrap());
        let st = build_st_d(space.clone()).unwrap();
        let report = metric_report(&st, ReportMode::Exact).unwrap();
        assert!(report.passed());
        assert!((report.max_ratio - 1.0).abs() < 1e-9);
        assert!((report.min_ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn covering_construction_sandwich_on_the_grid() {
        // the greedy chain keeps every grid point as a center once the
        // radius drops below the spacing, so the finest support pairs
        // stay resolved and the sandwich holds throughout
        let space = Arc::new(FiniteMetricSpace::interval_grid(257).unwrap());
        let chain = covering_chain(&space, 1.0, 0.5, 10, NetStrategy::Greedy).unwrap();
        let st = build_st_delta(space, &chain, 9.0, 1, 9).unwrap();
        let report = metric_report(&st, ReportMode::Sandwich { delta: 9.0 }).unwrap();
        assert!(report.passed(), "{} violations", report.violations.len());
        assert!(report.min_ratio >= 1.0 - 1e-9);
        assert!(report.max_ratio <= 10.0 + 1e-9);
    }

    #[test]
    fn oracle_on_the_single_module() {
        let space = three_point_space();
        let m = TwoPointModule::new(0, 1, Dist::Float(1.0)).unwrap();
        let st = SpectralTripleSum::from_modules(space, vec![m]);
        assert_eq!(lp_oracle(&st, 0, 1).unwrap(), 1.0);
        assert_eq!(lp_oracle(&st, 0, 2).unwrap(), f64::INFINITY);
        assert_eq!(lp_oracle(&st, 2, 2).unwrap(), 0.0);
    }

    #[test]
    fn oracle_matches_geodesics_on_small_triples() {
        let space = Arc::new(FiniteMetricSpace::random_cloud(8, 2, 23).unwrap());
        let st = build_st_d(space).unwrap();
        let ind = induced_metric(&st).unwrap();
        for s in 0..8 {
            for t in 0..8 {
                let got = lp_oracle(&st, s, t).unwrap();
                assert!((got - ind.distance(s, t)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn oracle_rejects_large_support() {
        let space = Arc::new(FiniteMetricSpace::random_cloud(65, 2, 1).unwrap());
        let st = build_st_d(space).unwrap();
        assert!(matches!(
            lp_oracle(&st, 0, 1),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn empty_triple_gives_empty_report() {
        let space = three_point_space();
        let st = SpectralTripleSum::from_modules(space, Vec::new());
        let report = metric_report(&st, ReportMode::Exact).unwrap();
        assert!(report.passed());
        assert!(report.induced.support().is_empty());
    }

    #[test]
    fn adding_a_module_never_increases_distances() {
        let space = three_point_space();
        let m1 = TwoPointModule::new(0, 1, Dist::Float(1.0)).unwrap();
        let m2 = TwoPointModule::new(1, 2, Dist::Float(0.8)).unwrap();
        let m3 = TwoPointModule::new(0, 2, Dist::Float(1.5)).unwrap();
        let st_small = SpectralTripleSum::from_modules(space.clone(), vec![m1.clone(), m2.clone()]);
        let st_big = SpectralTripleSum::from_modules(space, vec![m1, m2, m3]);
        let a = induced_metric(&st_small).unwrap();
        let b = induced_metric(&st_big).unwrap();
        for u in 0..3 {
            for v in 0..3 {
                assert!(b.distance(u, v) <= a.distance(u, v) + 1e-15);
            }
        }
    }

    #[test]
    fn scaling_distances_scales_the_induced_metric() {
        let space = three_point_space();
        let scaled = Arc::new(
            FiniteMetricSpace::from_matrix(
                "scaled",
                vec![
                    vec![0.0, 3.0, 4.5],
                    vec![3.0, 0.0, 2.4],
                    vec![4.5, 2.4, 0.0],
                ],
            )
            .unwrap(),
        );
        let mods = |sp: &Arc<FiniteMetricSpace>| {
            vec![
                TwoPointModule::new(0, 1, Dist::Float(sp.dist(0, 1))).unwrap(),
                TwoPointModule::new(1, 2, Dist::Float(sp.dist(1, 2))).unwrap(),
            ]
        };
        let a = induced_metric(&SpectralTripleSum::from_modules(space.clone(), mods(&space))).unwrap();
        let b = induced_metric(&SpectralTripleSum::from_modules(scaled.clone(), mods(&scaled))).unwrap();
        for u in 0..3 {
            for v in 0..3 {
                let x = a.distance(u, v);
                let y = b.distance(u, v);
                if x.is_finite() {
                    assert!((y - 3.0 * x).abs() < 1e-12);
                } else {
                    assert!(y.is_infinite() || u == v);
                }
            }
        }
    }
}
