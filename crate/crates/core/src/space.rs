//! Finite metric spaces: validated distance data plus the canonical
//! generators used throughout (dyadic interval grids, middle-third Cantor
//! endpoint sets, seeded random clouds) and CSV loaders.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{Dist, DyadicRational};
use crate::error::{Error, Result};

/// Relative tolerance for the triangle inequality. Euclidean clouds round
/// each distance once through a square root; exact 1-D spaces never need it.
pub const TRIANGLE_REL_TOL: f64 = 1e-9;

const MAX_CANTOR_LEVEL: u32 = 15;

/// Marks spaces whose points have closed-form structure that the covering
/// builder can exploit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceStructure {
    /// Grid 0, 1/2^k, ..., 1 with `log2_spacing = k`.
    DyadicGrid { log2_spacing: u32 },
    /// The 2^level left endpoints of the level-`level` middle-third
    /// construction intervals.
    Cantor { level: u32 },
}

enum Backing {
    /// Dense symmetric matrix, row-major.
    Matrix(Vec<f64>),
    /// Points on a line, positions strictly increasing. Distances are
    /// computed on demand; a 2^15-point Cantor set does not fit as a matrix.
    Line(Vec<f64>),
}

/// A finite metric space: points, a validated distance function, a label.
pub struct FiniteMetricSpace {
    label: String,
    len: usize,
    coords: Option<Vec<Vec<f64>>>,
    backing: Backing,
    structure: Option<SpaceStructure>,
}

impl FiniteMetricSpace {
    /// Builds from an explicit distance matrix, checking every axiom.
    pub fn from_matrix(label: &str, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "distance matrix row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &rows {
            flat.extend_from_slice(row);
        }
        let space = Self {
            label: label.to_string(),
            len: n,
            coords: None,
            backing: Backing::Matrix(flat),
            structure: None,
        };
        space.validate()?;
        Ok(space)
    }

    /// Builds from point coordinates with the Euclidean metric.
    pub fn from_points(label: &str, coords: Vec<Vec<f64>>) -> Result<Self> {
        let n = coords.len();
        let dim = coords.first().map(|c| c.len()).unwrap_or(0);
        for (i, c) in coords.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    c.len()
                )));
            }
        }
        let mut flat = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euclidean(&coords[i], &coords[j]);
                flat[i * n + j] = d;
                flat[j * n + i] = d;
            }
        }
        let space = Self {
            label: label.to_string(),
            len: n,
            coords: Some(coords),
            backing: Backing::Matrix(flat),
            structure: None,
        };
        space.validate()?;
        Ok(space)
    }

    /// m equally spaced points 0, 1/(m-1), ..., 1 with |x-y| distances.
    pub fn interval_grid(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!(
                "interval grid needs m >= 2, got {m}"
            )));
        }
        let spacing = (m - 1) as f64;
        let positions: Vec<f64> = (0..m).map(|j| j as f64 / spacing).collect();
        let structure = if (m - 1).is_power_of_two() {
            Some(SpaceStructure::DyadicGrid {
                log2_spacing: (m - 1).trailing_zeros(),
            })
        } else {
            None
        };
        Ok(Self {
            label: format!("interval-grid(m={m})"),
            len: m,
            coords: Some(positions.iter().map(|&p| vec![p]).collect()),
            backing: Backing::Line(positions),
            structure,
        })
    }

    /// The 2^level left endpoints of the level-`level` middle-third
    /// construction intervals, with the |x-y| metric.
    pub fn cantor(level: u32) -> Result<Self> {
        if level > MAX_CANTOR_LEVEL {
            return Err(Error::SizeLimit(format!(
                "cantor level {level} exceeds cap {MAX_CANTOR_LEVEL} (2^{level} points)"
            )));
        }
        // Numerators over 3^level. Each construction step keeps the left
        // child endpoint and adds the right child shifted by 2/3 of the
        // current interval length.
        let pow = 3u64.pow(level);
        let mut endpoints: Vec<u64> = vec![0];
        for i in 0..level {
            let step = 2 * pow / 3u64.pow(i + 1);
            let mut next = Vec::with_capacity(endpoints.len() * 2);
            for &e in &endpoints {
                next.push(e);
            }
            for &e in &endpoints {
                next.push(e + step);
            }
            next.sort_unstable();
            endpoints = next;
        }
        let positions: Vec<f64> = endpoints.iter().map(|&k| k as f64 / pow as f64).collect();
        Ok(Self {
            label: format!("cantor(level={level})"),
            len: positions.len(),
            coords: Some(positions.iter().map(|&p| vec![p]).collect()),
            backing: Backing::Line(positions),
            structure: Some(SpaceStructure::Cantor { level }),
        })
    }

    /// Seeded uniform cloud in the unit cube.
    pub fn random_cloud(n: usize, dim: usize, seed: u64) -> Result<Self> {
        if n < 1 || dim < 1 {
            return Err(Error::InvalidArgument(format!(
                "cloud needs n >= 1 and dim >= 1, got n={n}, dim={dim}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let mut space = Self::from_points(&format!("cloud(n={n},dim={dim},seed={seed})"), coords)?;
        space.label = format!("cloud(n={n},dim={dim},seed={seed})");
        Ok(space)
    }

    /// Loads a space from CSV. `#` lines are comments; `header` skips the
    /// first data row.
    pub fn load(path: &Path, format: InputFormat, header: bool) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let name = path.display().to_string();
        let mut data: Vec<Vec<f64>> = Vec::new();
        let mut skipped_header = !header;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !skipped_header {
                skipped_header = true;
                continue;
            }
            let mut vals = Vec::new();
            for (col, tok) in line.split(',').enumerate() {
                let tok = tok.trim();
                match tok.parse::<f64>() {
                    Ok(v) => vals.push(v),
                    Err(_) => {
                        return Err(Error::Parse {
                            path: name,
                            line: lineno + 1,
                            message: format!("column {}: not a number: {tok:?}", col + 1),
                        })
                    }
                }
            }
            data.push(vals);
        }
        if data.is_empty() {
            return Err(Error::Parse {
                path: name,
                line: 0,
                message: "no data rows".to_string(),
            });
        }
        match format {
            InputFormat::DistanceMatrix => Self::from_matrix(&name, data),
            InputFormat::PointCloud => Self::from_points(&name, data),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn structure(&self) -> Option<SpaceStructure> {
        self.structure
    }

    pub fn point_id(&self, i: usize) -> String {
        format!("p{i}")
    }

    pub fn coords(&self, i: usize) -> Option<&[f64]> {
        self.coords.as_ref().map(|c| c[i].as_slice())
    }

    /// 1-D position, for spaces on a line.
    pub fn position(&self, i: usize) -> Option<f64> {
        match &self.backing {
            Backing::Line(p) => Some(p[i]),
            Backing::Matrix(_) => None,
        }
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.backing {
            Backing::Matrix(m) => m[i * self.len + j],
            Backing::Line(p) => (p[i] - p[j]).abs(),
        }
    }

    /// Distance as an exact dyadic rational when the space is a dyadic grid.
    pub fn dist_exact(&self, i: usize, j: usize) -> Dist {
        match self.structure {
            Some(SpaceStructure::DyadicGrid { log2_spacing }) => Dist::Dyadic(
                DyadicRational::new((i as i64 - j as i64).abs(), log2_spacing),
            ),
            _ => Dist::Float(self.dist(i, j)),
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.backing {
            Backing::Line(p) => p.last().copied().unwrap_or(0.0) - p.first().copied().unwrap_or(0.0),
            Backing::Matrix(m) => m.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Checks all three metric axioms. O(n^3) for matrix-backed spaces;
    /// line-backed spaces only need the strict-ordering check.
    pub fn validate(&self) -> Result<()> {
        let n = self.len;
        match &self.backing {
            Backing::Line(p) => {
                for i in 1..n {
                    if !(p[i] > p[i - 1]) {
                        return Err(Error::MetricViolation {
                            kind: "duplicate or unordered positions",
                            i: i - 1,
                            j: i,
                            k: i,
                        });
                    }
                }
                Ok(())
            }
            Backing::Matrix(m) => {
                for i in 0..n {
                    if m[i * n + i] != 0.0 {
                        return Err(Error::MetricViolation {
                            kind: "nonzero diagonal",
                            i,
                            j: i,
                            k: i,
                        });
                    }
                    for j in (i + 1)..n {
                        let dij = m[i * n + j];
                        if dij != m[j * n + i] {
                            return Err(Error::MetricViolation {
                                kind: "asymmetry",
                                i,
                                j,
                                k: i,
                            });
                        }
                        if !(dij > 0.0) || !dij.is_finite() {
                            return Err(Error::MetricViolation {
                                kind: "nonpositive off-diagonal (duplicate points?)",
                                i,
                                j,
                                k: i,
                            });
                        }
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let dij = m[i * n + j];
                        for k in 0..n {
                            if k == i || k == j {
                                continue;
                            }
                            let bound = m[i * n + k] + m[k * n + j];
                            if dij > bound * (1.0 + TRIANGLE_REL_TOL) {
                                return Err(Error::MetricViolation {
                                    kind: "triangle inequality",
                                    i,
                                    j,
                                    k,
                                });
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    DistanceMatrix,
    PointCloud,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
