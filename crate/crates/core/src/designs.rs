//! Experimental designs on rectangular domains and their space-filling
//! metrics: fill distance `h`, separation radius `q` and mesh ratio `ρ = h/q`.

use std::cmp::Ordering;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csvio;
use crate::error::{Error, Result};
use crate::kernels::distance;

/// Candidate points per axis used for the fill distance when `d > 1`.
pub const DEFAULT_FILL_RESOLUTION: usize = 101;

const PRIMES: [u64; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131,
];

/// Axis-aligned box `Ω = ∏ [lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct Domain {
    bounds: Vec<(f64, f64)>,
}

impl Domain {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::Config("domain needs at least one dimension".into()));
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::Config(format!(
                    "domain axis {i} must have positive length, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { bounds })
    }

    /// `[0, 1]^dim`.
    pub fn unit(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            bounds: vec![(0.0, 1.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn volume(&self) -> f64 {
        self.bounds.iter().map(|(lo, hi)| hi - lo).product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(&self.bounds)
                .all(|(x, &(lo, hi))| *x >= lo && *x <= hi)
    }

    fn map_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(&self.bounds)
            .map(|(t, &(lo, hi))| lo + t * (hi - lo))
            .collect()
    }
}

impl Default for Domain {
    fn default() -> Self {
        Self::unit(1)
    }
}

impl TryFrom<Vec<(f64, f64)>> for Domain {
    type Error = Error;
    fn try_from(bounds: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(bounds)
    }
}

impl From<Domain> for Vec<(f64, f64)> {
    fn from(d: Domain) -> Self {
        d.bounds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Random,
    Grid,
    Halton,
    External,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Random => "random",
            Scheme::Grid => "grid",
            Scheme::Halton => "halton",
            Scheme::External => "external",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" | "rs" => Ok(Scheme::Random),
            "grid" | "gs" => Ok(Scheme::Grid),
            "halton" => Ok(Scheme::Halton),
            "external" => Ok(Scheme::External),
            other => Err(Error::Config(format!("unknown design scheme '{other}'"))),
        }
    }
}

/// A finite point set `X ⊂ Ω` together with how it was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    domain: Domain,
    points: Vec<Vec<f64>>,
    scheme: Scheme,
    seed: Option<u64>,
}

impl Design {
    /// Builds a design, checking that every point lies in the domain and that
    /// no two points coincide.
    pub fn new(domain: Domain, points: Vec<Vec<f64>>, scheme: Scheme, seed: Option<u64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DegenerateDesign("design has no points".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != domain.dim() {
                return Err(Error::Contract(format!(
                    "point {i} has {} coordinates, domain has {}",
                    p.len(),
                    domain.dim()
                )));
            }
            if !domain.contains(p) {
                return Err(Error::Config(format!("point {i} {p:?} lies outside the domain")));
            }
        }
        if let Some((i, j)) = find_duplicate(&points) {
            return Err(Error::DegenerateDesign(format!("points {i} and {j} coincide")));
        }
        Ok(Self {
            domain,
            points,
            scheme,
            seed,
        })
    }

    /// Wraps externally supplied points.
    pub fn external(domain: Domain, points: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(domain, points, Scheme::External, None)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Same design with one more point appended.
    pub fn with_point(&self, p: Vec<f64>) -> Result<Self> {
        let mut points = self.points.clone();
        points.push(p);
        Self::new(self.domain.clone(), points, Scheme::External, None)
    }

    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> Result<()> {
        let names: Vec<String> = (1..=self.dim()).map(|i| format!("x{i}")).collect();
        csvio::write_rows(out, header.then_some(names.as_slice()), &self.points)
    }

    /// Reads one point per row. `domain` defaults to the unit cube of the
    /// inferred dimension.
    pub fn read_csv<R: BufRead>(input: R, domain: Option<Domain>, header: bool) -> Result<Self> {
        let rows = csvio::read_rows(input, header)?;
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return Err(Error::Parse("design file has no points".into()));
        }
        let domain = domain.unwrap_or_else(|| Domain::unit(dim));
        Self::external(domain, rows)
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn find_duplicate(points: &[Vec<f64>]) -> Option<(usize, usize)> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| lex_cmp(&points[i], &points[j]));
    idx.windows(2)
        .find(|w| points[w[0]] == points[w[1]])
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
}

/// `n` i.i.d. uniform points, deterministic in `seed`. Points are not sorted.
pub fn gen_random(domain: &Domain, n: usize, seed: u64) -> Result<Design> {
    if n < 2 {
        return Err(Error::Config(format!("random design needs n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            domain
                .bounds()
                .iter()
                .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect()
        })
        .collect();
    Design::new(domain.clone(), points, Scheme::Random, Some(seed))
}

/// Equispaced lattice including the endpoints of every axis. In `d > 1`,
/// `n` must be a perfect `d`-th power.
pub fn gen_grid(domain: &Domain, n: usize) -> Result<Design> {
    let d = domain.dim();
    let per_axis = (n as f64).powf(1.0 / d as f64).round() as usize;
    if per_axis < 2 || per_axis.checked_pow(d as u32) != Some(n) {
        return Err(Error::Config(format!(
            "grid design needs n = m^{d} with m >= 2, got n = {n}"
        )));
    }
    let step = 1.0 / (per_axis - 1) as f64;
    let mut points = Vec::with_capacity(n);
    let mut idx = vec![0usize; d];
    for _ in 0..n {
        let unit: Vec<f64> = idx
            .iter()
            .map(|&i| if i == per_axis - 1 { 1.0 } else { i as f64 * step })
            .collect();
        points.push(domain.map_unit(&unit));
        // odometer increment, last axis fastest
        for axis in (0..d).rev() {
            idx[axis] += 1;
            if idx[axis] < per_axis {
                break;
            }
            idx[axis] = 0;
        }
    }
    Design::new(domain.clone(), points, Scheme::Grid, None)
}

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv_base = 1.0 / base as f64;
    let mut scale = inv_base;
    let mut acc = 0.0;
    while index > 0 {
        acc += (index % base) as f64 * scale;
        index /= base;
        scale *= inv_base;
    }
    acc
}

/// First `n` Halton points (indices 1..=n), bases are the first `d` primes.
pub fn gen_halton(domain: &Domain, n: usize) -> Result<Design> {
    let d = domain.dim();
    if d > PRIMES.len() {
        return Err(Error::Config(format!(
            "Halton sequence supports at most {} dimensions",
            PRIMES.len()
        )));
    }
    if n == 0 {
        return Err(Error::Config("Halton design needs n >= 1".into()));
    }
    let points = (1..=n as u64)
        .map(|i| {
            let unit: Vec<f64> = PRIMES[..d].iter().map(|&b| radical_inverse(i, b)).collect();
            domain.map_unit(&unit)
        })
        .collect();
    Design::new(domain.clone(), points, Scheme::Halton, None)
}

/// `q_X`: half the minimum pairwise distance.
pub fn separation_radius(design: &Design) -> Result<f64> {
    let pts = design.points();
    if pts.len() < 2 {
        return Err(Error::DegenerateDesign(
            "separation radius needs at least two points".into(),
        ));
    }
    let min_dist = if design.dim() == 1 {
        let xs = sorted_coords(design);
        xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    } else {
        (0..pts.len())
            .into_par_iter()
            .map(|i| {
                pts[i + 1..]
                    .iter()
                    .map(|p| distance(&pts[i], p))
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| f64::INFINITY, f64::min)
    };
    if min_dist <= 0.0 {
        return Err(Error::DegenerateDesign("design contains coincident points".into()));
    }
    Ok(min_dist / 2.0)
}

/// Fill distance value and whether it is exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FillDistance {
    pub value: f64,
    pub exact: bool,
}

/// `h_{X,Ω}`. Exact in one dimension; for `d > 1` a lower bound from the
/// maximin over a lattice with `resolution` candidates per axis.
pub fn fill_distance(design: &Design, resolution: usize) -> Result<FillDistance> {
    if design.is_empty() {
        return Err(Error::DegenerateDesign("empty design".into()));
    }
    if design.dim() == 1 {
        let (lo, hi) = design.domain().bounds()[0];
        let xs = sorted_coords(design);
        let half_gap = xs.windows(2).map(|w| 0.5 * (w[1] - w[0])).fold(0.0, f64::max);
        let value = half_gap.max(xs[0] - lo).max(hi - xs[xs.len() - 1]);
        return Ok(FillDistance { value, exact: true });
    }
    if resolution < 2 {
        return Err(Error::Config("fill-distance resolution must be >= 2".into()));
    }
    let d = design.dim();
    let total = resolution
        .checked_pow(d as u32)
        .ok_or_else(|| Error::Config("fill-distance lattice is too large".into()))?;
    let step = 1.0 / (resolution - 1) as f64;
    let value = (0..total)
        .into_par_iter()
        .map(|mut flat| {
            let mut unit = vec![0.0; d];
            for u in unit.iter_mut().rev() {
                *u = (flat % resolution) as f64 * step;
                flat /= resolution;
            }
            let x = design.domain().map_unit(&unit);
            design
                .points()
                .iter()
                .map(|p| distance(&x, p))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max);
    Ok(FillDistance { value, exact: false })
}

/// `ρ = h / q` with the default fill-distance resolution.
pub fn mesh_ratio(design: &Design) -> Result<f64> {
    Ok(DesignMetrics::compute(design, DEFAULT_FILL_RESOLUTION)?.mesh_ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignMetrics {
    pub fill_distance: f64,
    pub separation_radius: f64,
    pub mesh_ratio: f64,
    pub fill_is_exact: bool,
}

impl DesignMetrics {
    pub fn compute(design: &Design, resolution: usize) -> Result<Self> {
        let q = separation_radius(design)?;
        let h = fill_distance(design, resolution)?;
        Ok(Self {
            fill_distance: h.value,
            separation_radius: q,
            mesh_ratio: h.value / q,
            fill_is_exact: h.exact,
        })
    }
}

fn sorted_coords(design: &Design) -> Vec<f64> {
    let mut xs: Vec<f64> = design.points().iter().map(|p| p[0]).collect();
    xs.sort_by(f64::total_cmp);
    xs
}

/// The `n + 1` spacings of sorted points in `[lo, hi]`, boundary gaps included.
pub fn spacings(points: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut xs = points.to_vec();
    xs.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(xs.len() + 1);
    let mut prev = lo;
    for x in xs {
        out.push(x - prev);
        prev = x;
    }
    out.push(hi - prev);
    out
}

/// Normalized exponential partial sums `(E_1/E_{n+1}, …, E_n/E_{n+1})`, which
/// share the law of the order statistics of `n` uniforms on `[0, 1]`.
pub fn exponential_spacing_sample(n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Config("exponential spacing sample needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut partial = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    for _ in 0..=n {
        let y: f64 = rng.sample(Exp1);
        acc += y;
        partial.push(acc);
    }
    let total = partial.pop().expect("n + 1 sums");
    Ok(partial.into_iter().map(|s| s / total).collect())
}
