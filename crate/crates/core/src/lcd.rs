//! Lattice-distance machinery: `d_2(v, Z^N)`, the level function
//! `f(θ) = d_2((z/t)Aθ, Z^N)`, a certified search for `LCD_{α,γ}(A)` and
//! Monte Carlo estimates of the level-set measure and the lattice integral.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::geometry::{gaussian_norm_counts, GaussianMeasureEstimate, MeasureMethod};
use crate::models::Matrix;
use crate::quadrature::{binomial_ci, normal_two_sided_quantile};
use crate::rng::{self, tag};

/// Euclidean distance from `v` to the nearest point of the integer lattice.
pub fn dist_to_lattice(v: &[f64]) -> f64 {
    v.iter().map(|x| (x - x.round()).powi(2)).sum::<f64>().sqrt()
}

/// `f(θ) = d_2((z/t) Aθ, Z^N)`.
pub fn f_theta(z: f64, t: f64, a: &Matrix, theta: &[f64]) -> Result<f64> {
    if theta.len() != a.ncols() {
        return Err(Error::Dimension { expected: a.ncols(), got: theta.len() });
    }
    if !(t > 0.0) {
        return Err(param(format!("t must be > 0, got {t}")));
    }
    if !z.is_finite() {
        return Err(param(format!("z must be finite, got {z}")));
    }
    let mut v = vec![0.0; a.nrows()];
    a.apply_into(theta, &mut v);
    let k = z / t;
    Ok(dist_to_lattice(&v.iter().map(|x| k * x).collect::<Vec<_>>()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LcdParams {
    pub alpha: f64,
    pub gamma: f64,
}

impl LcdParams {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        let p = Self { alpha, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(param(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(param(format!("gamma must be in (0,1), got {}", self.gamma)));
        }
        Ok(())
    }
}

/// `d_2(Aθ, Z^N) < min(γ|Aθ|_2, α)`.
pub fn is_lcd_member(a: &Matrix, params: &LcdParams, theta: &[f64]) -> bool {
    let mut v = vec![0.0; a.nrows()];
    a.apply_into(theta, &mut v);
    member(&v, params)
}

fn member(atheta: &[f64], params: &LcdParams) -> bool {
    let norm = atheta.iter().map(|x| x * x).sum::<f64>().sqrt();
    dist_to_lattice(atheta) < (params.gamma * norm).min(params.alpha)
}

/// Bracket `[lower_certified, upper_witness]` around `LCD_{α,γ}(A)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcdResult {
    pub lower_certified: f64,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub upper_witness: f64,
    pub witness_theta: Option<Vec<f64>>,
    /// Side length of the finest cells.
    pub resolution: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Largest dimension the exhaustive search accepts.
pub const MAX_SEARCH_DIM: usize = 3;

struct Cell {
    center: Vec<f64>,
    // distance from the origin to the closed cell
    min_norm: f64,
}

fn cell_min_norm(center: &[f64], half: f64) -> f64 {
    center.iter().map(|c| (c.abs() - half).max(0.0).powi(2)).sum::<f64>().sqrt()
}

enum CellVerdict {
    Excluded,
    Flagged { hit: bool },
}

struct Searcher<'a> {
    a: &'a Matrix,
    params: LcdParams,
    sigma_max: f64,
    row_norms: Vec<f64>,
}

impl Searcher<'_> {
    /// Decides whether a cell with half-diagonal `rho` may contain a member.
    ///
    /// `d_2(A·, Z^N)` and `|A·|_2` are both `σ_max`-Lipschitz, so a member θ
    /// in the cell forces `d(Ag) < min(γ|Ag| + (1+γ)σρ, α + σρ)` at the
    /// center g. Cells with `|⟨a_i, θ⟩| <= 1/2` for every row and every θ in
    /// the cell are excluded outright: there `d(Aθ) = |Aθ| >= γ|Aθ|`.
    fn classify(&self, center: &[f64], rho: f64) -> CellVerdict {
        let mut v = vec![0.0; self.a.nrows()];
        self.a.apply_into(center, &mut v);
        if v.iter().zip(&self.row_norms).all(|(x, r)| x.abs() + r * rho <= 0.5) {
            return CellVerdict::Excluded;
        }
        let slack = self.sigma_max * rho;
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let d = dist_to_lattice(&v);
        let relaxed = (self.params.gamma * norm + (1.0 + self.params.gamma) * slack).min(self.params.alpha + slack);
        if d < relaxed {
            CellVerdict::Flagged { hit: member(&v, &self.params) }
        } else {
            CellVerdict::Excluded
        }
    }

    /// Pulls a member θ toward the origin along its ray by bisection; the
    /// returned point is always a verified member.
    fn refine(&self, theta: &[f64]) -> Vec<f64> {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            let cand: Vec<f64> = theta.iter().map(|x| x * mid).collect();
            if is_lcd_member(self.a, &self.params, &cand) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        theta.iter().map(|x| x * hi).collect()
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Certified search for `LCD_{α,γ}(A)` over `{|θ|_2 <= radius_max}`.
///
/// The cube `[-S/2, S/2]^n` with `S = grid_step · 2^L >= 2·radius_max` is
/// bisected level by level down to cells of side `grid_step`. A cell is
/// discarded when the Lipschitz-relaxed membership test rules it out, when
/// it lies beyond `radius_max`, or when it lies beyond the best verified
/// witness so far. Every θ with `|θ|_2 < lower_certified` lies in a
/// discarded cell, hence is not a member. Member cell centers are pulled
/// toward the origin by [`Searcher::refine`] to sharpen the witness.
pub fn lcd_search(a: &Matrix, params: &LcdParams, radius_max: f64, grid_step: f64) -> Result<LcdResult> {
    params.validate()?;
    if !(radius_max > 0.0 && radius_max.is_finite()) {
        return Err(param(format!("radius_max must be > 0, got {radius_max}")));
    }
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(param(format!("grid_step must be > 0, got {grid_step}")));
    }
    let n = a.ncols();
    if n > MAX_SEARCH_DIM {
        return Err(Error::Capability(format!("certified LCD search supports n <= {MAX_SEARCH_DIM}, got n = {n}")));
    }
    let sv = a.singular_values();
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = if a.nrows() >= n { sv.last().copied().unwrap_or(0.0) } else { 0.0 };
    let mut warnings = Vec::new();
    if sigma_min < 1.0 {
        warnings.push(format!(
            "smallest singular value {sigma_min} < 1: |Aθ| >= |θ| fails, the LCD hypothesis of the Littlewood-Offord bound does not hold"
        ));
    }
    let searcher = Searcher { a, params: *params, sigma_max, row_norms: a.rows().map(norm2).collect() };

    let levels = (2.0 * radius_max / grid_step).log2().ceil().max(0.0) as u32;
    let mut side = grid_step * 2f64.powi(levels as i32);
    let mut cells = vec![Cell { center: vec![0.0; n], min_norm: 0.0 }];
    let mut best: Option<Vec<f64>> = None;
    let mut upper = f64::INFINITY;
    let mut lower = radius_max;

    for level in 0..=levels {
        let half = side / 2.0;
        let rho = half * (n as f64).sqrt();
        let cutoff = upper.min(radius_max);
        let verdicts: Vec<(usize, bool)> = cells
            .par_iter()
            .enumerate()
            .filter(|(_, c)| c.min_norm < cutoff)
            .filter_map(|(i, c)| match searcher.classify(&c.center, rho) {
                CellVerdict::Excluded => None,
                CellVerdict::Flagged { hit } => Some((i, hit)),
            })
            .collect();

        let refined: Vec<Vec<f64>> =
            verdicts.par_iter().filter(|(_, hit)| *hit).map(|(i, _)| searcher.refine(&cells[*i].center)).collect();
        for w in refined {
            let r = norm2(&w);
            if r < upper {
                upper = r;
                best = Some(w);
            }
        }

        if level == levels {
            for (i, _) in &verdicts {
                lower = lower.min(cells[*i].min_norm);
            }
            break;
        }

        let quarter = half / 2.0;
        let cutoff = upper.min(radius_max);
        cells = verdicts
            .iter()
            .flat_map(|(i, _)| {
                let c = &cells[*i].center;
                (0..1usize << n).map(move |mask| {
                    let center: Vec<f64> = c
                        .iter()
                        .enumerate()
                        .map(|(k, x)| if mask >> k & 1 == 1 { x + quarter } else { x - quarter })
                        .collect();
                    let min_norm = cell_min_norm(&center, quarter);
                    Cell { center, min_norm }
                })
            })
            .filter(|c| c.min_norm < cutoff)
            .collect();
        side = half;
    }

    let lower = lower.min(upper).min(radius_max);
    if let Some(w) = &best {
        if !is_lcd_member(a, params, w) {
            return Err(Error::Convergence("witness failed re-verification".into()));
        }
    }
    Ok(LcdResult {
        lower_certified: lower,
        upper_witness: upper,
        witness_theta: best,
        resolution: grid_step,
        sigma_max,
        sigma_min,
        warnings,
    })
}

/// Brute-force check that no point of the grid `step·Z^n` with
/// `|θ|_2 < radius` is a member; returns the offending points.
pub fn scan_for_members(a: &Matrix, params: &LcdParams, radius: f64, step: f64) -> Result<Vec<Vec<f64>>> {
    params.validate()?;
    let n = a.ncols();
    if n > MAX_SEARCH_DIM {
        return Err(Error::Capability(format!("scan supports n <= {MAX_SEARCH_DIM}")));
    }
    let k = (radius / step).ceil() as i64;
    let width = (2 * k + 1) as usize;
    let total = width.pow(n as u32);
    let rows = a.nrows();
    let found: Vec<Vec<f64>> = (0..total)
        .into_par_iter()
        .map_init(
            || (vec![0.0; n], vec![0.0; rows]),
            |(theta, v), mut idx| {
                for c in theta.iter_mut() {
                    let i = (idx % width) as i64 - k;
                    idx /= width;
                    *c = i as f64 * step;
                }
                if norm2(theta) >= radius {
                    return None;
                }
                a.apply_into(theta, v);
                member(v, params).then(|| theta.clone())
            },
        )
        .flatten()
        .collect();
    Ok(found)
}

fn level_function(a: &Matrix, z: f64, t: f64) -> Result<impl Fn(&[f64]) -> f64 + Sync + '_> {
    if !(t > 0.0) {
        return Err(param(format!("t must be > 0, got {t}")));
    }
    if !z.is_finite() {
        return Err(param(format!("z must be finite, got {z}")));
    }
    let k = z / t;
    Ok(move |theta: &[f64]| {
        let mut v = vec![0.0; a.nrows()];
        a.apply_into(theta, &mut v);
        v.iter_mut().for_each(|x| *x *= k);
        dist_to_lattice(&v)
    })
}

/// `γ_n(T_s)` for `T_s = {θ : f(θ) <= s}` on a grid of levels, all from one
/// shared Gaussian batch (so the estimates are nondecreasing in s).
pub fn gamma_ts_grid(
    a: &Matrix,
    z: f64,
    t: f64,
    levels: &[f64],
    samples: usize,
    seed: u64,
    confidence: f64,
) -> Result<Vec<GaussianMeasureEstimate>> {
    if let Some(s) = levels.iter().find(|s| !(**s >= 0.0)) {
        return Err(param(format!("level s must be >= 0, got {s}")));
    }
    let f = level_function(a, z, t)?;
    let cap = (a.nrows() as f64).sqrt() / 2.0;
    if levels.iter().all(|s| *s >= cap) {
        return Ok(levels.iter().map(|_| GaussianMeasureEstimate::exact(1.0)).collect());
    }
    if samples == 0 {
        return Err(param("samples must be >= 1"));
    }
    let counts = gaussian_norm_counts(a.ncols(), samples, seed, tag::LEVEL_SET, levels, f);
    levels
        .iter()
        .zip(counts)
        .map(|(s, hits)| {
            if *s >= cap {
                return Ok(GaussianMeasureEstimate::exact(1.0));
            }
            let (lo, hi) = binomial_ci(hits, samples, confidence)?;
            Ok(GaussianMeasureEstimate {
                value: hits as f64 / samples as f64,
                method: MeasureMethod::MonteCarlo,
                ci: Some((lo, hi)),
                samples: Some(samples),
            })
        })
        .collect()
}

/// Monte Carlo `γ_n(T_s)`; exactly 1 once `s >= √N/2`.
pub fn gamma_ts_estimate(
    a: &Matrix,
    z: f64,
    t: f64,
    s: f64,
    samples: usize,
    seed: u64,
    confidence: f64,
) -> Result<GaussianMeasureEstimate> {
    let mut v = gamma_ts_grid(a, z, t, &[s], samples, seed, confidence)?;
    Ok(v.remove(0))
}

/// `(2Cts / (γ√n))^n`, the level-set measure bound with absolute constant
/// `C`. Meaningful when `4ts <= γ√n`.
pub fn level_set_bound(c: f64, t: f64, s: f64, gamma: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(param("dimension n must be >= 1"));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(param(format!("gamma must be in (0,1), got {gamma}")));
    }
    let nf = n as f64;
    Ok((2.0 * c * t * s / (gamma * nf.sqrt())).powi(n as i32))
}

/// Whether `(t, s)` satisfies the separation condition `4ts <= γ√n`.
pub fn level_set_bound_applies(t: f64, s: f64, gamma: f64, n: usize) -> bool {
    4.0 * t * s <= gamma * (n as f64).sqrt()
}

/// One z of [`lo_rhs_integral`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeIntegralPoint {
    pub z: f64,
    /// `E[e^{-4b f(Θ)²}]`, Θ standard Gaussian.
    pub value: f64,
    /// Normal-approximation half-width at the requested confidence.
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeIntegral {
    /// Max over the z grid of `(2π)^{-n/2} ∫ e^{-4b f(θ)² - |θ|²/2} dθ`.
    pub value: f64,
    pub argmax_z: f64,
    pub points: Vec<LatticeIntegralPoint>,
    pub samples: usize,
    pub seed: u64,
}

impl LatticeIntegral {
    /// The unnormalized integral `∫ e^{-4b f(θ)² - |θ|²/2} dθ`.
    pub fn lebesgue_value(&self, n: usize) -> f64 {
        self.value * (2.0 * std::f64::consts::PI).powf(n as f64 / 2.0)
    }
}

/// Max over `z_grid` of the Gaussian average of `e^{-4b f(Θ)²}`, all z
/// sharing one sample batch. The finite grid lower-bounds the supremum
/// over `z >= 1/2π`.
pub fn lo_rhs_integral(
    a: &Matrix,
    t: f64,
    b: f64,
    z_grid: &[f64],
    samples: usize,
    seed: u64,
    confidence: f64,
) -> Result<LatticeIntegral> {
    if z_grid.is_empty() {
        return Err(param("z_grid must be nonempty"));
    }
    let zmin = 1.0 / (2.0 * std::f64::consts::PI);
    if let Some(z) = z_grid.iter().find(|z| !(**z >= zmin * (1.0 - 1e-12)) || !z.is_finite()) {
        return Err(param(format!("every z must be >= 1/(2π), got {z}")));
    }
    if !(b > 0.0 && b < 1.0) {
        return Err(param(format!("b must be in (0,1), got {b}")));
    }
    if !(t > 0.0) {
        return Err(param(format!("t must be > 0, got {t}")));
    }
    if samples == 0 {
        return Err(param("samples must be >= 1"));
    }
    let n = a.ncols();
    let m = z_grid.len();
    let partial = rng::map_chunks(samples, seed, tag::LATTICE_INTEGRAL, |rng, len| {
        let mut theta = vec![0.0; n];
        let mut base = vec![0.0; a.nrows()];
        let mut scaled = vec![0.0; a.nrows()];
        let mut sums = vec![(0.0f64, 0.0f64); m];
        for _ in 0..len {
            for v in theta.iter_mut() {
                *v = StandardNormal.sample(rng);
            }
            a.apply_into(&theta, &mut base);
            for (acc, z) in sums.iter_mut().zip(z_grid) {
                let k = z / t;
                scaled.iter_mut().zip(&base).for_each(|(s, x)| *s = k * x);
                let f = dist_to_lattice(&scaled);
                let w = (-4.0 * b * f * f).exp();
                acc.0 += w;
                acc.1 += w * w;
            }
        }
        sums
    });
    let mut totals = vec![(0.0f64, 0.0f64); m];
    for chunk in partial {
        for (t, c) in totals.iter_mut().zip(chunk) {
            t.0 += c.0;
            t.1 += c.1;
        }
    }
    let q = normal_two_sided_quantile(confidence);
    let count = samples as f64;
    let points: Vec<LatticeIntegralPoint> = z_grid
        .iter()
        .zip(totals)
        .map(|(z, (s1, s2))| {
            let mean = s1 / count;
            let var = (s2 / count - mean * mean).max(0.0);
            LatticeIntegralPoint { z: *z, value: mean, half_width: q * (var / count).sqrt() }
        })
        .collect();
    let best = points.iter().fold(&points[0], |best, p| if p.value > best.value { p } else { best });
    Ok(LatticeIntegral { value: best.value, argmax_z: best.z, points: points.clone(), samples, seed })
}
