//! The two sum-of-two-point-blocks constructions.
//!
//! Every summand is a 2x2 block over an unordered pair {x, y}: off-diagonal
//! entries 1/d(x,y), optional diagonal +/-2^n. The exact construction pairs
//! every two points and adds the diagonal shift 2^n to block n, which makes
//! the sum summable for every positive exponent. The covering construction
//! pairs centers of consecutive covering levels within interaction-length
//! distance thresholds and leaves the diagonal zero, so the spectrum scales
//! with the covering geometry.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::covering::CoveringChain;
use crate::dyadic::{Dist, DyadicRational};
use crate::error::{Error, Result};
use crate::space::FiniteMetricSpace;

/// One 2x2 summand. Eigenvalues are +/- sqrt(diag^2 + 1/d^2); with a zero
/// diagonal that is +/- 1/d.
#[derive(Clone, Debug)]
pub struct TwoPointModule {
    /// Point index of the senior partner (in T_n for covering triples).
    pub x: usize,
    /// Point index of the junior partner (in T_n or T_(n+1)).
    pub y: usize,
    /// Distance d(x, y) > 0.
    pub dist: Dist,
    /// Some(n) encodes the diagonal shift 2^n; None encodes zero.
    pub diag_pow2: Option<u32>,
    /// Level: the enumeration index for the exact construction, the
    /// covering level n for the covering construction.
    pub level: u32,
    /// True when y belongs to level n+1 rather than n.
    pub cross: bool,
}

impl TwoPointModule {
    /// Standalone diagonal-free block; rejects coincident or nonpositive
    /// pairs (an equal pair carries the zero space, not a block).
    pub fn new(x: usize, y: usize, dist: Dist) -> Result<Self> {
        if x == y {
            return Err(Error::DegeneratePair(format!(
                "pair ({x}, {y}) has equal endpoints"
            )));
        }
        if !dist.is_positive() {
            return Err(Error::DegeneratePair(format!(
                "pair ({x}, {y}) has nonpositive distance {dist}"
            )));
        }
        Ok(Self {
            x,
            y,
            dist,
            diag_pow2: None,
            level: 1,
            cross: false,
        })
    }

    pub fn diag_value(&self) -> f64 {
        match self.diag_pow2 {
            None => 0.0,
            Some(n) => (n as f64).exp2(),
        }
    }

    /// |eigenvalue| = sqrt(diag^2 + d^-2). Overflows to infinity for very
    /// deep exact-construction blocks; the exact comparisons below never
    /// rely on this float.
    pub fn abs_eigenvalue(&self) -> f64 {
        let inv_d = 1.0 / self.dist.value();
        match self.diag_pow2 {
            None => inv_d,
            Some(n) => {
                let diag = (n as f64).exp2();
                (diag * diag + inv_d * inv_d).sqrt()
            }
        }
    }

    /// Whether |eigenvalue| strictly exceeds the diagonal shift. Squaring,
    /// the difference is exactly 1/d^2, so the strict inequality holds
    /// precisely when the distance is finite and positive; no floating
    /// subtraction of near-equal magnitudes is involved.
    pub fn eigenvalue_exceeds_diag(&self) -> bool {
        let d = self.dist.value();
        d > 0.0 && d.is_finite()
    }

    pub fn diag_label(&self) -> String {
        match self.diag_pow2 {
            None => "0".to_string(),
            Some(n) => format!("2^{n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleKind {
    /// All pairs, diagonal shifts 2^n: induces the metric exactly.
    Exact,
    /// Covering-chain pairs, zero diagonal: induces a (1+delta)-equivalent
    /// metric and sees the box-counting dimension.
    Covering,
    /// Hand-assembled module list.
    Custom,
}

/// Parameters of a covering construction.
#[derive(Clone, Copy, Debug)]
pub struct DeltaParams {
    pub theta: f64,
    pub rho: f64,
    pub delta: f64,
    pub k0: i32,
    pub interaction_length: u32,
    pub n_min: u32,
    pub n_max: u32,
}

/// A countable (here finite) direct sum of two-point blocks.
pub struct SpectralTripleSum {
    kind: TripleKind,
    space: Arc<FiniteMetricSpace>,
    modules: Vec<TwoPointModule>,
    /// For covering triples: contiguous module ranges per level n.
    level_ranges: Vec<(u32, std::ops::Range<usize>)>,
    params: Option<DeltaParams>,
}

impl SpectralTripleSum {
    pub fn from_modules(space: Arc<FiniteMetricSpace>, modules: Vec<TwoPointModule>) -> Self {
        Self {
            kind: TripleKind::Custom,
            space,
            modules,
            level_ranges: Vec::new(),
            params: None,
        }
    }

    pub fn kind(&self) -> TripleKind {
        self.kind
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn modules(&self) -> &[TwoPointModule] {
        &self.modules
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn params(&self) -> Option<&DeltaParams> {
        self.params.as_ref()
    }

    /// (level, modules of that level) in ascending level order; empty for
    /// non-covering triples.
    pub fn levels(&self) -> impl Iterator<Item = (u32, &[TwoPointModule])> {
        self.level_ranges
            .iter()
            .map(move |(n, r)| (*n, &self.modules[r.clone()]))
    }

    pub fn level_count(&self) -> usize {
        self.level_ranges.len()
    }

    /// Sorted point indices that appear in at least one module.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .modules
            .iter()
            .flat_map(|m| [m.x, m.y])
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Tab-separated dump: level, x-id, y-id, d, diag.
    pub fn dump_lines(&self) -> Vec<String> {
        self.modules
            .iter()
            .map(|m| {
                let xtag = m.level;
                let ytag = if m.cross { m.level + 1 } else { m.level };
                let (xid, yid) = match self.kind {
                    TripleKind::Covering => (
                        format!("{}@T{}", self.space.point_id(m.x), xtag),
                        format!("{}@T{}", self.space.point_id(m.y), ytag),
                    ),
                    _ => (self.space.point_id(m.x), self.space.point_id(m.y)),
                };
                let mut line = String::new();
                let _ = write!(line, "{}\t{}\t{}\t{}\t{}", m.level, xid, yid, m.dist, m.diag_label());
                line
            })
            .collect()
    }
}

/// The exact construction: one block per unordered pair, enumerated
/// lexicographically by (i, j), i < j, with diagonal shift 2^n on block n.
pub fn build_st_d(space: Arc<FiniteMetricSpace>) -> Result<SpectralTripleSum> {
    if space.len() < 2 {
        return Err(Error::EmptyTriple(format!(
            "exact construction needs >= 2 points, got {}",
            space.len()
        )));
    }
    let n_pts = space.len();
    let mut modules = Vec::with_capacity(n_pts * (n_pts - 1) / 2);
    let mut level = 0u32;
    for i in 0..n_pts {
        for j in (i + 1)..n_pts {
            level += 1;
            let dist = space.dist_exact(i, j);
            debug_assert!(dist.is_positive());
            modules.push(TwoPointModule {
                x: i,
                y: j,
                dist,
                diag_pow2: Some(level),
                level,
                cross: false,
            });
        }
    }
    Ok(SpectralTripleSum {
        kind: TripleKind::Exact,
        space,
        modules,
        level_ranges: Vec::new(),
        params: None,
    })
}

/// k0 and the interaction length l for given covering and accuracy
/// parameters. k0 is the unique integer with
/// theta*rho^(k0+1) < diam <= theta*rho^k0; l is 0 (or -k0 if that is
/// positive) when 4/(1-rho) < delta, and otherwise the least l >= max(0,-k0)
/// with 4*rho^l/(1-rho) < delta.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InteractionParams {
    pub k0: i32,
    pub l: u32,
}

pub fn interaction_params(theta: f64, rho: f64, delta: f64, diam: f64) -> Result<InteractionParams> {
    if !(theta > 0.0) || !(rho > 0.0 && rho < 1.0) || !(delta > 0.0) || !(diam > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need theta > 0, rho in (0,1), delta > 0, diam > 0; got {theta}, {rho}, {delta}, {diam}"
        )));
    }
    let mut k0 = ((diam / theta).ln() / rho.ln()).floor() as i32;
    // float fix-up at the boundaries
    while !(diam <= theta * rho.powi(k0)) {
        k0 -= 1;
    }
    while diam <= theta * rho.powi(k0 + 1) {
        k0 += 1;
    }
    let floor_l = 0.max(-k0) as u32;
    let l = if 4.0 / (1.0 - rho) < delta {
        floor_l
    } else {
        let mut l = floor_l;
        while !(4.0 * rho.powi(l as i32) / (1.0 - rho) < delta) {
            l += 1;
        }
        l
    };
    debug_assert!(k0 + l as i32 >= 0);
    debug_assert!(4.0 / (1.0 - rho) < delta || 4.0 * rho.powi(l as i32) / (1.0 - rho) < delta);
    Ok(InteractionParams { k0, l })
}

/// Same-level admission threshold (2 + rho^-(l+1)) * theta * rho^(n-1),
/// exact for the dyadic grid parameters.
fn same_level_threshold(theta: f64, rho: f64, l: u32, n: u32) -> Dist {
    if theta == 1.0 && rho == 0.5 && l < 60 {
        let c = 2i64 + (1i64 << (l + 1));
        Dist::Dyadic(DyadicRational::new(c, n - 1))
    } else {
        Dist::Float((2.0 + rho.powi(-(l as i32 + 1))) * theta * rho.powi(n as i32 - 1))
    }
}

/// Next-level admission threshold (1 + rho) * theta * rho^(n-1).
fn next_level_threshold(theta: f64, rho: f64, n: u32) -> Dist {
    if theta == 1.0 && rho == 0.5 {
        Dist::Dyadic(DyadicRational::new(3, n))
    } else {
        Dist::Float((1.0 + rho) * theta * rho.powi(n as i32 - 1))
    }
}

/// The covering construction over levels n_min..=n_max of the chain. Level
/// n pairs every x in T_n with same-level centers within the rule-(iii)
/// threshold and next-level centers within the rule-(iv) threshold.
/// Coincident cross-level centers (distance zero) carry the zero space and
/// are skipped.
pub fn build_st_delta(
    space: Arc<FiniteMetricSpace>,
    chain: &CoveringChain,
    delta: f64,
    n_min: u32,
    n_max: u32,
) -> Result<SpectralTripleSum> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be > 0, got {delta}")));
    }
    if n_min < 1 {
        return Err(Error::InvalidArgument("n_min must be >= 1".into()));
    }
    let params_base = interaction_params(chain.theta(), chain.rho(), delta, space.diameter())?;
    let mut modules = Vec::new();
    let mut level_ranges = Vec::new();
    if n_max >= n_min {
        let need = (n_max + 1) as usize;
        if chain.depth() < need {
            return Err(Error::InsufficientChain {
                have: chain.depth(),
                need,
            });
        }
        let theta = chain.theta();
        let rho = chain.rho();
        let l = params_base.l;
        for n in n_min..=n_max {
            let start = modules.len();
            let thr_same = same_level_threshold(theta, rho, l, n);
            let thr_next = next_level_threshold(theta, rho, n);
            let tn = chain.level(n);
            let tn1 = chain.level(n + 1);
            for (a, &x) in tn.iter().enumerate() {
                for &y in &tn[(a + 1)..] {
                    let d = space.dist_exact(x, y);
                    if d.is_positive() && d.le(&thr_same) {
                        modules.push(TwoPointModule {
                            x,
                            y,
                            dist: d,
                            diag_pow2: None,
                            level: n,
                            cross: false,
                        });
                    }
                }
            }
            for &x in tn {
                for &y in tn1 {
                    if x == y {
                        continue; // coincident centers across levels
                    }
                    let d = space.dist_exact(x, y);
                    if d.is_positive() && d.le(&thr_next) {
                        modules.push(TwoPointModule {
                            x,
                            y,
                            dist: d,
                            diag_pow2: None,
                            level: n,
                            cross: true,
                        });
                    }
                }
            }
            level_ranges.push((n, start..modules.len()));
        }
    }
    Ok(SpectralTripleSum {
        kind: TripleKind::Covering,
        space,
        modules,
        level_ranges,
        params: Some(DeltaParams {
            theta: chain.theta(),
            rho: chain.rho(),
            delta,
            k0: params_base.k0,
            interaction_length: params_base.l,
            n_min,
            n_max,
        }),
    })
}
