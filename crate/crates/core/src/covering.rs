//! Covering chains: for each level n, a set of centers T_n such that closed
//! balls of radius theta*rho^(n-1) around the centers cover the space.
//!
//! The general algorithm is a greedy farthest-point net. Dyadic interval
//! grids and Cantor endpoint sets additionally support a structured net
//! that emits the closed-form center sets the constructions are built on:
//! odd dyadics (2j+1)*2^(1-n) for the grid, construction-block leaders for
//! the Cantor set.

use crate::error::{Error, Result};
use crate::fit::least_squares_slope;
use crate::space::{FiniteMetricSpace, SpaceStructure};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetStrategy {
    /// Farthest-point-first until every point is within the radius.
    /// Ties break toward the lowest point index.
    Greedy,
    /// Closed-form center sets; requires theta=1, rho=1/2 on a dyadic grid
    /// or theta=1/2, rho=1/3 on a Cantor space.
    Structured,
}

pub struct CoveringChain {
    theta: f64,
    rho: f64,
    levels: Vec<Vec<usize>>,
    radii: Vec<f64>,
}

impl CoveringChain {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Centers of level n (1-based).
    pub fn level(&self, n: u32) -> &[usize] {
        &self.levels[(n - 1) as usize]
    }

    pub fn radius(&self, n: u32) -> f64 {
        self.radii[(n - 1) as usize]
    }

    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }

    /// Verifies the covering property at every level: each point lies
    /// within r_n (+1e-12) of a center of T_n.
    pub fn verify_covering(&self, space: &FiniteMetricSpace) -> bool {
        self.levels.iter().zip(&self.radii).all(|(centers, &r)| {
            (0..space.len()).all(|p| {
                centers
                    .iter()
                    .map(|&c| space.dist(p, c))
                    .fold(f64::INFINITY, f64::min)
                    <= r + 1e-12
            })
        })
    }
}

/// Builds the chain T_1..T_n_max with radii theta*rho^(n-1).
pub fn covering_chain(
    space: &FiniteMetricSpace,
    theta: f64,
    rho: f64,
    n_max: u32,
    strategy: NetStrategy,
) -> Result<CoveringChain> {
    if space.is_empty() {
        return Err(Error::InvalidArgument("covering of an empty space".into()));
    }
    if !(theta > 0.0) {
        return Err(Error::InvalidArgument(format!("theta must be > 0, got {theta}")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidArgument(format!("rho must be in (0,1), got {rho}")));
    }
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let radii: Vec<f64> = (1..=n_max).map(|n| theta * rho.powi(n as i32 - 1)).collect();
    let levels = match strategy {
        NetStrategy::Greedy => radii
            .iter()
            .map(|&r| greedy_net(space, r))
            .collect::<Vec<_>>(),
        NetStrategy::Structured => structured_levels(space, theta, rho, n_max)?,
    };
    Ok(CoveringChain {
        theta,
        rho,
        levels,
        radii,
    })
}

/// Farthest-point-first net: seed at index 0 (every point ties at infinite
/// distance from the empty center set), then repeatedly add the point
/// farthest from the current centers until everything is covered.
fn greedy_net(space: &FiniteMetricSpace, r: f64) -> Vec<usize> {
    let n = space.len();
    let mut centers = vec![0usize];
    let mut min_dist: Vec<f64> = (0..n).map(|p| space.dist(p, 0)).collect();
    loop {
        let mut best = 0usize;
        let mut best_d = -1.0;
        for (p, &d) in min_dist.iter().enumerate() {
            if d > best_d {
                best_d = d;
                best = p;
            }
        }
        if best_d <= r {
            break;
        }
        centers.push(best);
        for (p, slot) in min_dist.iter_mut().enumerate() {
            let d = space.dist(p, best);
            if d < *slot {
                *slot = d;
            }
        }
    }
    centers
}

fn structured_levels(
    space: &FiniteMetricSpace,
    theta: f64,
    rho: f64,
    n_max: u32,
) -> Result<Vec<Vec<usize>>> {
    match space.structure() {
        Some(SpaceStructure::DyadicGrid { log2_spacing }) => {
            if theta != 1.0 || rho != 0.5 {
                return Err(Error::InvalidArgument(
                    "structured net on a dyadic grid requires theta=1, rho=1/2".into(),
                ));
            }
            if log2_spacing == 0 {
                return Err(Error::InvalidArgument(
                    "structured net needs a grid with at least 3 points".into(),
                ));
            }
            if n_max > log2_spacing + 1 {
                return Err(Error::InvalidArgument(format!(
                    "structured dyadic centers exist only up to level {} on this grid",
                    log2_spacing + 1
                )));
            }
            let mid = 1usize << (log2_spacing - 1); // index of 1/2
            let mut levels = Vec::new();
            for n in 1..=n_max {
                if n <= 2 {
                    levels.push(vec![mid]);
                } else {
                    // centers (2j+1)*2^(1-n) at grid indices (2j+1)*2^(k+1-n)
                    let shift = log2_spacing + 1 - n;
                    let count = 1usize << (n - 2);
                    levels.push((0..count).map(|j| (2 * j + 1) << shift).collect());
                }
            }
            Ok(levels)
        }
        Some(SpaceStructure::Cantor { level }) => {
            if theta != 0.5 || (rho - 1.0 / 3.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(
                    "structured net on a Cantor space requires theta=1/2, rho=1/3".into(),
                ));
            }
            // Points are generated in ascending order, so the level-n
            // construction blocks are consecutive runs of 2^(level-n)
            // points; the leader (left endpoint) of each block covers it
            // at radius (1/2)*3^(1-n).
            let mut levels = Vec::new();
            for n in 1..=n_max {
                let eff = n.min(level.max(1));
                let step = 1usize << (level.saturating_sub(eff));
                levels.push((0..space.len()).step_by(step.max(1)).collect());
            }
            Ok(levels)
        }
        None => Err(Error::InvalidArgument(
            "structured net requires a dyadic grid or Cantor space".into(),
        )),
    }
}

/// Per-level box-count ratios and the least-squares dimension slope.
pub struct DimensionEstimate {
    /// log|T_n| / -log(r_n) per level.
    pub per_level: Vec<f64>,
    /// Slope of log|T_n| against -log(r_n) over the finest half of the
    /// levels; the finite-truncation stand-in for the limsup.
    pub slope: f64,
}

pub fn minkowski_estimate(chain: &CoveringChain) -> Result<DimensionEstimate> {
    let depth = chain.depth();
    if depth < 3 {
        return Err(Error::InsufficientData(format!(
            "dimension estimate needs >= 3 levels, got {depth}"
        )));
    }
    let counts = chain.counts();
    let per_level: Vec<f64> = counts
        .iter()
        .zip(&chain.radii)
        .map(|(&c, &r)| {
            let y = (c as f64).ln();
            let x = -r.ln();
            if y == 0.0 {
                0.0
            } else {
                y / x
            }
        })
        .collect();
    let start = depth / 2;
    let xs: Vec<f64> = chain.radii[start..].iter().map(|&r| -r.ln()).collect();
    let ys: Vec<f64> = counts[start..].iter().map(|&c| (c as f64).ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    Ok(DimensionEstimate { per_level, slope })
}
