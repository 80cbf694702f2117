//! ℓ_p quasi-norms and the geometric constants the bounds consume: the
//! quasi-triangle constant C_K, the unit-ball volume |K|, the sphere area
//! |S^{n-1}| and the Gaussian measure γ_n(rK).

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::quadrature::binomial_ci;
use crate::rng::{self, tag};
use crate::special::{gamma_p, ln_gamma, normal_cdf};

/// Confidence level used when a caller does not pick one.
pub const DEFAULT_CONFIDENCE: f64 = 0.99;

/// An ℓ_p quasi-norm on R^n, `0 < p <= ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiNormSpec {
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub p: f64,
    pub n: usize,
}

impl QuasiNormSpec {
    pub fn new(p: f64, n: usize) -> Result<Self> {
        let spec = Self { p, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn euclidean(n: usize) -> Self {
        Self { p: 2.0, n }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0) {
            return Err(param(format!("exponent p must be > 0, got {}", self.p)));
        }
        if self.n == 0 {
            return Err(param("dimension n must be >= 1"));
        }
        Ok(())
    }

    /// ‖x‖_p. Panics in debug builds if `x.len() != n`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        lp_norm_unchecked(x, self.p)
    }

    pub fn constant(&self) -> f64 {
        quasinorm_constant(self)
    }

    pub fn ball_volume(&self) -> Result<f64> {
        lp_ball_volume(self.n, self.p)
    }

    pub fn is_euclidean(&self) -> bool {
        self.p == 2.0
    }
}

fn lp_norm_unchecked(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if m == 0.0 || p.is_infinite() {
        return m;
    }
    if p == 2.0 {
        let s: f64 = x.iter().map(|v| (v / m) * (v / m)).sum();
        return m * s.sqrt();
    }
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    let s: f64 = x.iter().map(|v| (v.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

/// (Σ|x_j|^p)^{1/p}, or max |x_j| for `p = ∞`.
pub fn lp_quasinorm(x: &[f64], p: f64) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyVector);
    }
    if !(p > 0.0) {
        return Err(param(format!("exponent p must be > 0, got {p}")));
    }
    Ok(lp_norm_unchecked(x, p))
}

/// Smallest C with ‖x + y‖ <= C (‖x‖ + ‖y‖): `max(1, 2^{1/p - 1})`.
pub fn quasinorm_constant(spec: &QuasiNormSpec) -> f64 {
    if spec.p >= 1.0 {
        1.0
    } else {
        (1.0 / spec.p - 1.0).exp2()
    }
}

/// Volume of the ℓ_p unit ball, `(2Γ(1 + 1/p))^n / Γ(1 + n/p)`.
pub fn lp_ball_volume(n: usize, p: f64) -> Result<f64> {
    if n == 0 {
        return Err(param("dimension n must be >= 1"));
    }
    if !(p > 0.0) {
        return Err(param(format!("exponent p must be > 0, got {p}")));
    }
    let nf = n as f64;
    if p.is_infinite() {
        return finite_positive(nf * 2f64.ln(), n, p);
    }
    let log_vol = nf * (2f64.ln() + ln_gamma(1.0 + 1.0 / p)) - ln_gamma(1.0 + nf / p);
    finite_positive(log_vol, n, p)
}

fn finite_positive(log_vol: f64, n: usize, p: f64) -> Result<f64> {
    let v = log_vol.exp();
    if !v.is_finite() || v == 0.0 || !log_vol.is_finite() {
        return Err(Error::Range(format!(
            "unit-ball volume for n = {n}, p = {p} is not representable (ln|K| = {log_vol})"
        )));
    }
    Ok(v)
}

/// Surface area of the unit Euclidean sphere in R^n, `2π^{n/2}/Γ(n/2)`.
pub fn sphere_area(n: usize) -> f64 {
    assert!(n >= 1, "sphere_area needs n >= 1");
    let h = n as f64 / 2.0;
    2.0 * (h * PI.ln() - ln_gamma(h)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureMethod {
    ClosedForm,
    MonteCarlo,
}

/// γ_n of a body, with the Monte Carlo interval when one was used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMeasureEstimate {
    pub value: f64,
    pub method: MeasureMethod,
    pub ci: Option<(f64, f64)>,
    pub samples: Option<usize>,
}

impl GaussianMeasureEstimate {
    pub(crate) fn exact(value: f64) -> Self {
        Self { value, method: MeasureMethod::ClosedForm, ci: None, samples: None }
    }
}

fn closed_form_measure(spec: &QuasiNormSpec, radius: f64) -> Option<f64> {
    if radius.is_infinite() {
        return Some(1.0);
    }
    let n = spec.n as f64;
    if spec.p == 2.0 {
        // |G|_2^2 is chi-square with n degrees of freedom
        return Some(gamma_p(n / 2.0, radius * radius / 2.0).expect("valid chi-square args"));
    }
    let interval = 2.0 * normal_cdf(radius) - 1.0;
    if spec.p.is_infinite() {
        return Some(interval.powi(spec.n as i32));
    }
    if spec.n == 1 {
        return Some(interval);
    }
    None
}

/// γ_n({x : ‖x‖ <= radius}) at [`DEFAULT_CONFIDENCE`].
///
/// Closed forms are used for p = 2 (chi-square), p = ∞ (product of
/// intervals) and n = 1; everything else is Monte Carlo over the shared
/// standard-normal batch for `(n, seed)`.
pub fn gaussian_measure(
    spec: &QuasiNormSpec,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<GaussianMeasureEstimate> {
    let mut v = gaussian_measure_grid(spec, &[radius], samples, seed, DEFAULT_CONFIDENCE)?;
    Ok(v.remove(0))
}

/// [`gaussian_measure`] on several radii at once. Monte Carlo estimates
/// share one sample batch, so they are nondecreasing in the radius.
pub fn gaussian_measure_grid(
    spec: &QuasiNormSpec,
    radii: &[f64],
    samples: usize,
    seed: u64,
    confidence: f64,
) -> Result<Vec<GaussianMeasureEstimate>> {
    spec.validate()?;
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0)) {
        return Err(param(format!("radius must be > 0, got {r}")));
    }
    let closed: Vec<Option<f64>> = radii.iter().map(|&r| closed_form_measure(spec, r)).collect();
    if closed.iter().all(Option::is_some) {
        return Ok(closed.into_iter().map(|v| GaussianMeasureEstimate::exact(v.unwrap())).collect());
    }
    if samples == 0 {
        return Err(param("Monte Carlo Gaussian measure needs samples >= 1"));
    }
    let counts = gaussian_norm_counts(spec.n, samples, seed, tag::GAUSSIAN_MEASURE, radii, |x| spec.eval(x));
    radii
        .iter()
        .zip(closed)
        .zip(counts)
        .map(|((_, exact), hits)| match exact {
            Some(v) => Ok(GaussianMeasureEstimate::exact(v)),
            None => {
                let (lo, hi) = binomial_ci(hits, samples, confidence)?;
                Ok(GaussianMeasureEstimate {
                    value: hits as f64 / samples as f64,
                    method: MeasureMethod::MonteCarlo,
                    ci: Some((lo, hi)),
                    samples: Some(samples),
                })
            }
        })
        .collect()
}

/// Monte Carlo γ_n of `{x : norm(x) <= radius}` for a user-supplied
/// quasi-norm, on the same shared batch as [`gaussian_measure_grid`].
pub fn gaussian_measure_with<F>(
    n: usize,
    norm: F,
    radius: f64,
    samples: usize,
    seed: u64,
    confidence: f64,
) -> Result<GaussianMeasureEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if n == 0 || samples == 0 {
        return Err(param("need n >= 1 and samples >= 1"));
    }
    let hits = gaussian_norm_counts(n, samples, seed, tag::GAUSSIAN_MEASURE, &[radius], norm)[0];
    let (lo, hi) = binomial_ci(hits, samples, confidence)?;
    Ok(GaussianMeasureEstimate {
        value: hits as f64 / samples as f64,
        method: MeasureMethod::MonteCarlo,
        ci: Some((lo, hi)),
        samples: Some(samples),
    })
}

/// Hit counts of `norm(G) <= radius` per radius over the shared batch for
/// `(n, seed, stream)`.
pub(crate) fn gaussian_norm_counts<F>(
    n: usize,
    samples: usize,
    seed: u64,
    stream: u64,
    radii: &[f64],
    norm: F,
) -> Vec<usize>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let per_chunk = rng::map_chunks(samples, seed, stream, |rng, len| {
        let mut x = vec![0.0; n];
        let mut counts = vec![0usize; radii.len()];
        for _ in 0..len {
            for v in x.iter_mut() {
                *v = StandardNormal.sample(rng);
            }
            let r = norm(&x);
            for (c, &rad) in counts.iter_mut().zip(radii) {
                if r <= rad {
                    *c += 1;
                }
            }
        }
        counts
    });
    let mut total = vec![0usize; radii.len()];
    for c in per_chunk {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    total
}
