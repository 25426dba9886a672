//! Spectra of block sums: eigenvalue histograms, the counting function
//! N(Lambda), zeta traces, per-level summability probes, and the
//! logarithmic-average trace estimator.
//!
//! Multiplicities are dimension counts: each 2x2 block contributes the
//! eigenvalue pair +/-sqrt(diag^2 + 1/d^2), so it adds 2 to the |D| bucket
//! of its magnitude, and N(Lambda) is the plain cumulative sum.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fit::least_squares_slope;
use crate::triple::SpectralTripleSum;

/// An eigenvalue magnitude: exact `2^pow2 / den` (den odd) where the block
/// distance was an exact dyadic with zero diagonal, float otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralValue {
    Exact { pow2: i32, den: u64 },
    Approx(f64),
}

impl SpectralValue {
    pub fn value(&self) -> f64 {
        match self {
            SpectralValue::Exact { pow2, den } => (*pow2 as f64).exp2() / *den as f64,
            SpectralValue::Approx(v) => *v,
        }
    }

    pub fn pow2(n: i32) -> Self {
        SpectralValue::Exact { pow2: n, den: 1 }
    }

    pub fn pow2_over_3(n: i32) -> Self {
        SpectralValue::Exact { pow2: n, den: 3 }
    }
}

/// Multiset of (|D| eigenvalue, multiplicity), ascending, strictly
/// increasing values. The spectrum of D itself is the symmetric closure.
pub struct SpectrumHistogram {
    entries: Vec<(SpectralValue, u64)>,
    cumulative: Vec<u64>,
    symmetric: bool,
}

impl SpectrumHistogram {
    pub fn from_entries(mut entries: Vec<(SpectralValue, u64)>) -> Self {
        entries.sort_by(|a, b| a.0.value().total_cmp(&b.0.value()));
        let mut cumulative = Vec::with_capacity(entries.len());
        let mut acc = 0u64;
        for &(_, m) in &entries {
            acc += m;
            cumulative.push(acc);
        }
        Self {
            entries,
            cumulative,
            symmetric: true,
        }
    }

    pub fn entries(&self) -> &[(SpectralValue, u64)] {
        &self.entries
    }

    /// The spectrum of D is -sigma union +sigma with matched multiplicities.
    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    pub fn min_value(&self) -> Option<f64> {
        self.entries.first().map(|(v, _)| v.value())
    }

    /// Exact multiplicity of 2^n, if present.
    pub fn multiplicity_of_pow2(&self, n: i32) -> u64 {
        self.entries
            .iter()
            .find(|(v, _)| matches!(v, SpectralValue::Exact { pow2, den: 1 } if *pow2 == n))
            .map(|&(_, m)| m)
            .unwrap_or(0)
    }

    /// Exact multiplicity of 2^n/3, if present.
    pub fn multiplicity_of_pow2_over_3(&self, n: i32) -> u64 {
        self.entries
            .iter()
            .find(|(v, _)| matches!(v, SpectralValue::Exact { pow2, den: 3 } if *pow2 == n))
            .map(|&(_, m)| m)
            .unwrap_or(0)
    }

    /// N(Lambda): eigenvalues of D with absolute value at most Lambda,
    /// counted with multiplicity.
    pub fn counting(&self, lambda: f64) -> u64 {
        let idx = self
            .entries
            .partition_point(|(v, _)| v.value() <= lambda);
        if idx == 0 {
            0
        } else {
            self.cumulative[idx - 1]
        }
    }
}

/// Relative grouping tolerance for float eigenvalues.
const APPROX_GROUP_REL_TOL: f64 = 1e-12;

/// Aggregates block eigenvalue magnitudes. Exact dyadic reciprocals group
/// by equality; float values group at relative 1e-12.
pub fn spectrum(triple: &SpectralTripleSum) -> Result<SpectrumHistogram> {
    if triple.is_empty() {
        return Err(Error::EmptyTriple("spectrum of a module-free triple".into()));
    }
    let mut exact: HashMap<(i32, u64), u64> = HashMap::new();
    let mut approx: Vec<f64> = Vec::new();
    for m in triple.modules() {
        match (m.diag_pow2, m.dist.as_dyadic()) {
            (None, Some(d)) => {
                // 1/d for d = num/2^e is 2^e/num with num odd
                *exact
                    .entry((d.log2_den() as i32, d.num() as u64))
                    .or_insert(0) += 2;
            }
            _ => approx.push(m.abs_eigenvalue()),
        }
    }
    let mut entries: Vec<(SpectralValue, u64)> = exact
        .into_iter()
        .map(|((pow2, den), mult)| (SpectralValue::Exact { pow2, den }, mult))
        .collect();
    approx.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < approx.len() {
        let v = approx[i];
        let mut j = i + 1;
        while j < approx.len() && approx[j] <= v * (1.0 + APPROX_GROUP_REL_TOL) {
            j += 1;
        }
        entries.push((SpectralValue::Approx(v), 2 * (j - i) as u64));
        i = j;
    }
    Ok(SpectrumHistogram::from_entries(entries))
}

#[derive(Clone, Copy, Debug)]
pub struct SweepSample {
    pub lambda: f64,
    pub count: u64,
    pub ratio: f64,
}

/// N(Lambda)/Lambda over a window, sampled on a geometric grid refined
/// with every jump point (and its predecessor), so the step function's
/// extrema inside the window are hit exactly.
pub struct CountingSweep {
    pub samples: Vec<SweepSample>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl CountingSweep {
    /// (max - min) of the ratio per octave [2^k, 2^(k+1)) inside the window.
    pub fn octave_spreads(&self) -> Vec<(i32, f64)> {
        let mut per: HashMap<i32, (f64, f64)> = HashMap::new();
        for s in &self.samples {
            let oct = s.lambda.log2().floor() as i32;
            let e = per.entry(oct).or_insert((f64::INFINITY, f64::NEG_INFINITY));
            e.0 = e.0.min(s.ratio);
            e.1 = e.1.max(s.ratio);
        }
        let mut out: Vec<(i32, f64)> = per.into_iter().map(|(k, (lo, hi))| (k, hi - lo)).collect();
        out.sort_by_key(|&(k, _)| k);
        out
    }
}

pub fn counting_sweep(
    hist: &SpectrumHistogram,
    lambda_min: f64,
    lambda_max: f64,
    points_per_octave: u32,
) -> Result<CountingSweep> {
    if !(lambda_min > 0.0 && lambda_min < lambda_max) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < lambda_min < lambda_max, got {lambda_min}, {lambda_max}"
        )));
    }
    if points_per_octave < 8 {
        return Err(Error::InvalidArgument(format!(
            "points_per_octave must be >= 8, got {points_per_octave}"
        )));
    }
    let octaves = (lambda_max / lambda_min).log2();
    let steps = (octaves * points_per_octave as f64).ceil() as usize;
    let mut grid: Vec<f64> = (0..=steps)
        .map(|i| lambda_min * (octaves * i as f64 / steps as f64).exp2())
        .collect();
    for (v, _) in hist.entries() {
        let x = v.value();
        if x >= lambda_min && x <= lambda_max {
            grid.push(x);
            let before = f64::from_bits(x.to_bits() - 1);
            if before >= lambda_min {
                grid.push(before);
            }
        }
    }
    grid.push(lambda_min);
    grid.push(lambda_max);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid.retain(|&x| x <= lambda_max);
    let mut samples = Vec::with_capacity(grid.len());
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    for lambda in grid {
        let count = hist.counting(lambda);
        let ratio = count as f64 / lambda;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        samples.push(SweepSample {
            lambda,
            count,
            ratio,
        });
    }
    Ok(CountingSweep {
        samples,
        min_ratio,
        max_ratio,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZetaForm {
    /// tr |D|^-s
    Abs,
    /// tr (I + D^2)^(-s/2)
    Resolvent,
}

/// Trace sums over the histogram. The resolvent form is dominated termwise
/// by the abs form: 1/sqrt(1+v^2) <= 1/v.
pub fn zeta(hist: &SpectrumHistogram, s: f64, form: ZetaForm) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("zeta needs s > 0, got {s}")));
    }
    Ok(hist
        .entries()
        .iter()
        .map(|(v, mult)| {
            let x = v.value();
            let term = match form {
                ZetaForm::Abs => x.powf(-s),
                ZetaForm::Resolvent => (1.0 + x * x).powf(-s / 2.0),
            };
            *mult as f64 * term
        })
        .sum())
}

/// Per-level sums sum_{pairs in level n} d(x,y)^s and their geometric tail
/// ratio. A ratio below 1 means the level sums decay geometrically at the
/// truncation scale, i.e. the trace converges.
pub struct SummabilityProbe {
    pub s: f64,
    pub level_sums: Vec<(u32, f64)>,
    pub tail_ratio: f64,
}

pub fn summability_probe(
    triple: &SpectralTripleSum,
    s_values: &[f64],
) -> Result<Vec<SummabilityProbe>> {
    if triple.level_count() < 4 {
        return Err(Error::InsufficientData(format!(
            "summability probe needs >= 4 levels, got {}",
            triple.level_count()
        )));
    }
    Ok(s_values
        .iter()
        .map(|&s| {
            let level_sums: Vec<(u32, f64)> = triple
                .levels()
                .map(|(n, mods)| {
                    (n, mods.iter().map(|m| m.dist.value().powf(s)).sum::<f64>())
                })
                .collect();
            SummabilityProbe {
                s,
                tail_ratio: tail_ratio(&level_sums),
                level_sums,
            }
        })
        .collect())
}

/// Geometric fit of successive level sums: exp of the least-squares slope
/// of ln(sum) against the level index.
pub fn tail_ratio(level_sums: &[(u32, f64)]) -> f64 {
    let xs: Vec<f64> = level_sums.iter().map(|&(n, _)| n as f64).collect();
    let ys: Vec<f64> = level_sums.iter().map(|&(_, v)| v.ln()).collect();
    least_squares_slope(&xs, &ys).exp()
}

/// (1/log Lambda) * tr(|D|^-1 P_Lambda pi(f)) where P_Lambda keeps the
/// blocks with |eigenvalue| <= Lambda. Each block contributes
/// d*(f(x) + f(y)): its |D|^-1 restriction is d times the identity and
/// pi(f) is diag(f(x), f(y)). `values` holds f at every space point.
pub fn dixmier_estimate(
    triple: &SpectralTripleSum,
    values: &[f64],
    lambda: f64,
) -> Result<f64> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "dixmier estimate needs lambda > 1, got {lambda}"
        )));
    }
    if values.len() != triple.space().len() {
        return Err(Error::InvalidArgument(format!(
            "need one value per space point ({}), got {}",
            triple.space().len(),
            values.len()
        )));
    }
    let total: f64 = triple
        .modules()
        .iter()
        .filter(|m| m.abs_eigenvalue() <= lambda)
        .map(|m| m.dist.value() * (values[m.x] + values[m.y]))
        .sum();
    Ok(total / lambda.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{Dist, DyadicRational};
    use crate::space::FiniteMetricSpace;
    use crate::triple::{build_st_d, SpectralTripleSum, TwoPointModule};
    use std::sync::Arc;

    fn unit_pair() -> SpectralTripleSum {
        let space = Arc::new(FiniteMetricSpace::interval_grid(2).unwrap());
        let m = TwoPointModule::new(0, 1, Dist::Dyadic(DyadicRational::one())).unwrap();
        SpectralTripleSum::from_modules(space, vec![m])
    }

    #[test]
    fn one_module_histogram() {
        let hist = spectrum(&unit_pair()).unwrap();
        assert_eq!(hist.entries().len(), 1);
        assert_eq!(hist.entries()[0].0.value(), 1.0);
        assert_eq!(hist.entries()[0].1, 2);
        assert!(hist.symmetric());
    }

    #[test]
    fn exact_block_spectrum_has_multiplicity_two() {
        let space = Arc::new(FiniteMetricSpace::interval_grid(2).unwrap());
        let st = build_st_d(space).unwrap();
        let hist = spectrum(&st).unwrap();
        assert_eq!(hist.entries().len(), 1);
        assert!((hist.entries()[0].0.value() - 5.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(hist.entries()[0].1, 2);
    }

    #[test]
    fn total_multiplicity_is_twice_module_count() {
        let space = Arc::new(FiniteMetricSpace::random_cloud(9, 2, 2).unwrap());
        let st = build_st_d(space).unwrap();
        let hist = spectrum(&st).unwrap();
        assert_eq!(hist.total_multiplicity(), 2 * st.modules().len() as u64);
    }

    #[test]
    fn counting_below_minimum_is_zero() {
        let hist = spectrum(&unit_pair()).unwrap();
        assert_eq!(hist.counting(0.5), 0);
        assert_eq!(hist.counting(1.0), 2);
    }

    #[test]
    fn counting_matches_brute_force_scan() {
        let space = Arc::new(FiniteMetricSpace::random_cloud(10, 2, 31).unwrap());
        let st = build_st_d(space).unwrap();
        let hist = spectrum(&st).unwrap();
        for lambda in [0.5, 1.0, 2.0, 4.0, 10.0, 100.0, 1e6] {
            let brute = st
                .modules()
                .iter()
                .filter(|m| m.abs_eigenvalue() <= lambda)
                .count() as u64
                * 2;
            assert_eq!(hist.counting(lambda), brute, "lambda {lambda}");
        }
    }

    #[test]
    fn counting_is_monotone_and_right_continuous() {
        let space = Arc::new(FiniteMetricSpace::random_cloud(8, 2, 4).unwrap());
        let st = build_st_d(space).unwrap();
        let hist = spectrum(&st).unwrap();
        let mut prev = 0;
        for s in counting_sweep(&hist, 1.0, 1e4, 8).unwrap().samples {
            assert!(s.count >= prev);
            prev = s.count;
        }
        // right continuity: the count at a jump equals the count just above
        let v = hist.entries()[0].0.value();
        let above = f64::from_bits(v.to_bits() + 1);
        assert_eq!(hist.counting(v), hist.counting(above));
        let below = f64::from_bits(v.to_bits() - 1);
        assert!(hist.counting(below) < hist.counting(v));
    }

    #[test]
    fn sweep_below_spectrum_is_zero() {
        let hist = spectrum(&unit_pair()).unwrap();
        let sweep = counting_sweep(&hist, 0.01, 0.5, 8).unwrap();
        assert_eq!(sweep.max_ratio, 0.0);
    }

    #[test]
    fn zeta_of_unit_pair_is_two_for_every_s() {
        let hist = spectrum(&unit_pair()).unwrap();
        for s in [0.3, 1.0, 2.5, 7.0] {
            assert_eq!(zeta(&hist, s, ZetaForm::Abs).unwrap(), 2.0);
        }
        assert!(zeta(&hist, 0.0, ZetaForm::Abs).is_err());
    }

    #[test]
    fn zeta_is_decreasing_in_s_and_resolvent_dominated() {
        let space = Arc::new(FiniteMetricSpace::random_cloud(7, 2, 9).unwrap());
        let st = build_st_d(space).unwrap();
        let hist = spectrum(&st).unwrap();
        let mut prev = f64::INFINITY;
        for s in [0.5, 1.0, 1.5, 2.0, 3.0] {
            let abs = zeta(&hist, s, ZetaForm::Abs).unwrap();
            let res = zeta(&hist, s, ZetaForm::Resolvent).unwrap();
            assert!(res <= abs);
            assert!(abs < prev);
            prev = abs;
        }
    }

    #[test]
    fn resolvent_zeta_bounded_by_geometric_sum() {
        // per block: (1 + 4^n + d^-2)^(-s/2) <= 2^(-ns)
        let space = Arc::new(FiniteMetricSpace::random_cloud(12, 2, 13).unwrap());
        let st = build_st_d(space).unwrap();
        let hist = spectrum(&st).unwrap();
        let blocks = st.modules().len() as i32;
        for s in [0.5, 1.0, 2.0] {
            let lhs = zeta(&hist, s, ZetaForm::Resolvent).unwrap();
            let rhs: f64 = (1..=blocks).map(|n| 2.0 * (-(n as f64) * s).exp2()).sum();
            assert!(lhs <= rhs, "s={s}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn dixmier_is_linear_and_monotone_in_f() {
        let space = Arc::new(FiniteMetricSpace::interval_grid(9).unwrap());
        let st = build_st_d(space.clone()).unwrap();
        let ones = vec![1.0; 9];
        let xs: Vec<f64> = (0..9).map(|i| space.position(i).unwrap()).collect();
        let lam = 64.0;
        let a = dixmier_estimate(&st, &ones, lam).unwrap();
        let b = dixmier_estimate(&st, &xs, lam).unwrap();
        let combo: Vec<f64> = ones.iter().zip(&xs).map(|(u, v)| 2.0 * u + 3.0 * v).collect();
        let c = dixmier_estimate(&st, &combo, lam).unwrap();
        assert!((c - (2.0 * a + 3.0 * b)).abs() < 1e-12);
        assert!(b <= a + 1e-15); // x <= 1 pointwise
        assert!(dixmier_estimate(&st, &ones, 1.0).is_err());
    }
}
