//! Numeric oracles: adaptive Gauss–Kronrod quadrature, radial integrals over
//! R^n, Monte Carlo small-ball estimation with exact binomial intervals, and
//! numeric Sobolev norms of the standard Gaussian density.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bounds::{gamma_tail_bound, SobolevParams};
use crate::error::{param, Error, Result};
use crate::geometry::{sphere_area, QuasiNormSpec};
use crate::models::{fold_samples, VectorModel};
use crate::rng::{self, tag};
use crate::special::{beta_quantile, gamma, normal_cdf};

/// Monte Carlo estimate of a probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
    pub hits: usize,
    pub seed: u64,
    pub confidence: f64,
}

/// Value of a numeric integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Exact (Clopper–Pearson) two-sided interval for a binomial proportion.
pub fn binomial_ci(hits: usize, samples: usize, confidence: f64) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(param("binomial interval needs samples >= 1"));
    }
    if hits > samples {
        return Err(param(format!("hits ({hits}) exceed samples ({samples})")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(param(format!("confidence must be in (0, 1), got {confidence}")));
    }
    let alpha = 1.0 - confidence;
    let (k, n) = (hits as f64, samples as f64);
    let lo = if hits == 0 { 0.0 } else { beta_quantile(alpha / 2.0, k, n - k + 1.0)? };
    let hi = if hits == samples { 1.0 } else { beta_quantile(1.0 - alpha / 2.0, k + 1.0, n - k)? };
    Ok((lo, hi))
}

fn mc_estimate(hits: usize, samples: usize, seed: u64, confidence: f64) -> Result<McEstimate> {
    let (ci_low, ci_high) = binomial_ci(hits, samples, confidence)?;
    let p_hat = hits as f64 / samples as f64;
    Ok(McEstimate {
        p_hat,
        // interval endpoints are computed by bisection; keep p_hat inside
        ci_low: ci_low.min(p_hat),
        ci_high: ci_high.max(p_hat),
        samples,
        hits,
        seed,
        confidence,
    })
}

/// Monte Carlo P(‖X‖ <= t).
pub fn estimate_small_ball(
    model: &VectorModel,
    norm: &QuasiNormSpec,
    t: f64,
    samples: usize,
    seed: u64,
    confidence: f64,
) -> Result<McEstimate> {
    Ok(estimate_small_ball_grid(model, norm, &[t], samples, seed, confidence)?.remove(0))
}

/// [`estimate_small_ball`] for several radii on one shared sample stream,
/// so the estimates are nondecreasing in t.
pub fn estimate_small_ball_grid(
    model: &VectorModel,
    norm: &QuasiNormSpec,
    ts: &[f64],
    samples: usize,
    seed: u64,
    confidence: f64,
) -> Result<Vec<McEstimate>> {
    if samples == 0 {
        return Err(param("samples must be >= 1"));
    }
    model.validate()?;
    norm.validate()?;
    if norm.n != model.dim() {
        return Err(Error::Dimension { expected: model.dim(), got: norm.n });
    }
    let counts = fold_samples(
        model,
        samples,
        seed,
        || vec![0usize; ts.len()],
        |acc, x| {
            let r = norm.eval(x);
            for (c, &t) in acc.iter_mut().zip(ts) {
                if r <= t {
                    *c += 1;
                }
            }
        },
    );
    let mut hits = vec![0usize; ts.len()];
    for c in counts {
        for (h, v) in hits.iter_mut().zip(c) {
            *h += v;
        }
    }
    hits.into_iter().map(|h| mc_estimate(h, samples, seed, confidence)).collect()
}

// ---------------------------------------------------------------------------
// Gauss–Kronrod 7/15

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadTolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Default for QuadTolerance {
    fn default() -> Self {
        Self { abs: 1e-14, rel: 1e-12, max_segments: 4000 }
    }
}

/// Globally adaptive Gauss–Kronrod 7/15 on a finite interval. Returns the
/// best estimate even when the tolerance was not met; callers check
/// `abs_error_estimate` against their own contract.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: QuadTolerance) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, abs_error_estimate: 0.0, evaluations: 0 };
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    let (mut total, mut err, mut evals) = (v, e, 15usize);
    while err > tol.abs.max(tol.rel * total.abs()) && heap.len() < tol.max_segments {
        let s = heap.pop().expect("heap is never empty");
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            heap.push(s);
            break;
        }
        let (v1, e1) = gk15(&f, s.a, m);
        let (v2, e2) = gk15(&f, m, s.b);
        evals += 30;
        total += v1 + v2 - s.value;
        err += e1 + e2 - s.error;
        heap.push(Segment { a: s.a, b: m, value: v1, error: e1 });
        heap.push(Segment { a: m, b: s.b, value: v2, error: e2 });
    }
    // re-sum to shed accumulated cancellation in the running totals
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    QuadResult { value, abs_error_estimate: error, evaluations: evals }
}

/// Envelope `g(r) <= coef · r^power · e^{-rate r²}` valid beyond the last
/// breakpoint; lets [`radial_integral`] bound its truncation error.
#[derive(Debug, Clone, Copy)]
pub struct GaussianTail {
    pub coef: f64,
    pub power: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RadialOptions {
    /// Points where the profile is not smooth (e.g. a kink at r = 1).
    pub breakpoints: Vec<f64>,
    pub tail: Option<GaussianTail>,
}

/// Accuracy contract of [`radial_integral`].
pub const RADIAL_ABS_TOL: f64 = 1e-10;
pub const RADIAL_REL_TOL: f64 = 1e-8;

/// Bound on ∫_x^∞ u^{α-1} e^{-u} du, or `None` when no bound is available
/// at this x.
fn gamma_tail_envelope(x: f64, alpha: f64) -> Option<f64> {
    if x <= 0.0 {
        return None;
    }
    if alpha <= 1.0 {
        // u^{α-1} is nonincreasing
        return Some(x.powf(alpha - 1.0) * (-x).exp());
    }
    if x >= alpha {
        return gamma_tail_bound(x, alpha).ok();
    }
    None
}

/// `|S^{n-1}| ∫_0^∞ r^{n-1} g(r) dr`, the integral over R^n of the radial
/// function `g(|ξ|)`.
///
/// With a [`GaussianTail`] the domain is truncated where the tail bound
/// falls below 1e-12 of the running value; otherwise the domain is doubled
/// until a new segment contributes less than 1e-13 of the total.
pub fn radial_integral<G: Fn(f64) -> f64>(g: G, n: usize, opts: &RadialOptions) -> Result<QuadResult> {
    if n == 0 {
        return Err(param("dimension n must be >= 1"));
    }
    let tol = QuadTolerance::default();
    let nm1 = (n - 1) as i32;
    let integrand = |r: f64| r.powi(nm1) * g(r);
    let mut knots: Vec<f64> = opts.breakpoints.iter().copied().filter(|b| *b > 0.0).collect();
    knots.sort_by(f64::total_cmp);
    let start = knots.last().copied().unwrap_or(0.0).max(1.0);

    let mut value = 0.0;
    let mut err = 0.0;
    let mut evals = 0;
    let mut left = 0.0;
    for &k in knots.iter().chain(std::iter::once(&start)) {
        if k > left {
            let q = integrate(integrand, left, k, tol);
            value += q.value;
            err += q.abs_error_estimate;
            evals += q.evaluations;
            left = k;
        }
    }

    let mut right = left;
    let mut quiet_segments = 0;
    for _ in 0..80 {
        let next = if right < 1.0 { 1.0 } else { 2.0 * right };
        let q = integrate(integrand, right, next, tol);
        value += q.value;
        err += q.abs_error_estimate;
        evals += q.evaluations;
        right = next;
        match opts.tail {
            Some(t) => {
                let m = nm1 as f64 + t.power;
                let alpha = (m + 1.0) / 2.0;
                let x = t.rate * right * right;
                if let Some(b) = gamma_tail_envelope(x, alpha) {
                    let tail = 0.5 * t.coef * t.rate.powf(-alpha) * b;
                    if tail <= 1e-12 * value.abs() || tail <= 1e-300 {
                        err += tail;
                        return finish(value, err, evals, n);
                    }
                }
            }
            None => {
                if q.value.abs() <= 1e-13 * value.abs() {
                    quiet_segments += 1;
                    if quiet_segments >= 2 {
                        return finish(value, err, evals, n);
                    }
                } else {
                    quiet_segments = 0;
                }
            }
        }
    }
    Err(Error::Convergence(format!("radial integral did not settle by r = {right}")))
}

fn finish(value: f64, err: f64, evals: usize, n: usize) -> Result<QuadResult> {
    let s = sphere_area(n);
    let (value, err) = (s * value, s * err);
    if err > RADIAL_ABS_TOL.max(RADIAL_REL_TOL * value.abs()) {
        return Err(Error::Convergence(format!(
            "radial integral error estimate {err:e} exceeds contract for value {value:e}"
        )));
    }
    Ok(QuadResult { value, abs_error_estimate: err, evaluations: evals })
}

/// Sampling settings for Monte Carlo fallbacks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub samples: usize,
    pub seed: u64,
    pub confidence: f64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self { samples: 1_000_000, seed: 0, confidence: crate::geometry::DEFAULT_CONFIDENCE }
    }
}

/// Two-sided standard normal quantile for a confidence level.
pub fn normal_two_sided_quantile(confidence: f64) -> f64 {
    let target = 0.5 + confidence / 2.0;
    let (mut lo, mut hi) = (0.0_f64, 40.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `∫_{R^n} |φ_X(ξ)| e^{-t²|ξ|²/2} dξ`.
///
/// Radial quadrature when |φ_X| is a radial Gaussian (Gaussian, smoothed
/// Gaussian, point mass); otherwise importance sampling from the weight,
/// i.e. `(2π/t²)^{n/2} E|φ_X(Ξ)|` with `Ξ ~ N(0, I/t²)`, reporting the
/// normal-approximation half-width as the error.
pub fn weighted_charfun_integral(model: &VectorModel, t: f64, mc: &McSettings) -> Result<QuadResult> {
    if !(t > 0.0) {
        return Err(param(format!("t must be > 0, got {t}")));
    }
    model.validate()?;
    let n = model.dim();
    if let Some(c) = model.radial_gaussian_scale() {
        let rate = 0.5 * (c + t * t);
        let opts = RadialOptions { breakpoints: vec![], tail: Some(GaussianTail { coef: 1.0, power: 0.0, rate }) };
        return radial_integral(|r| (-rate * r * r).exp(), n, &opts);
    }
    if mc.samples < 2 {
        return Err(param("Monte Carlo charfun integral needs samples >= 2"));
    }
    let sums = rng::map_chunks(mc.samples, mc.seed, tag::CHARFUN_MC, |rng, len| {
        let mut xi = vec![0.0; n];
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..len {
            for v in xi.iter_mut() {
                let g: f64 = StandardNormal.sample(rng);
                *v = g / t;
            }
            let a = crate::models::charfun(model, &xi).expect("dimension checked").norm();
            s += a;
            s2 += a * a;
        }
        (s, s2)
    });
    let (s, s2) = sums.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let m = mc.samples as f64;
    let mean = s / m;
    let var = ((s2 / m - mean * mean) * m / (m - 1.0)).max(0.0);
    let scale = (2.0 * PI / (t * t)).powf(n as f64 / 2.0);
    Ok(QuadResult {
        value: scale * mean,
        abs_error_estimate: scale * normal_two_sided_quantile(mc.confidence) * (var / m).sqrt(),
        evaluations: mc.samples,
    })
}

/// `∫_{R^n} |φ_X(ξ)| dξ` when it is finite and computable.
pub fn charfun_l1_norm(model: &VectorModel, mc: &McSettings) -> Result<QuadResult> {
    model.validate()?;
    match model {
        VectorModel::Smoothed { base, t } => weighted_charfun_integral(base, *t, mc),
        _ => match model.radial_gaussian_scale() {
            Some(c) if c > 0.0 => {
                let rate = 0.5 * c;
                let opts =
                    RadialOptions { breakpoints: vec![], tail: Some(GaussianTail { coef: 1.0, power: 0.0, rate }) };
                radial_integral(|r| (-rate * r * r).exp(), model.dim(), &opts)
            }
            _ => Err(Error::NotApplicable(
                "∫|φ_X| is infinite for this model (no density); use the smoothed bound".into(),
            )),
        },
    }
}

/// Densities with a shipped numeric Sobolev norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SobolevDensity {
    StandardGaussian { n: usize },
}

/// The radial function `h = F^{-1}((1 + |ξ|²)^{β/2} f̂)` for the standard
/// Gaussian density f, with f̂(ξ) = ∫ e^{i⟨ξ,x⟩} f(x) dx and inverse
/// (2π)^{-n} ∫ e^{-i⟨x,ξ⟩} g(ξ) dξ.
///
/// Writing β/2 = k - s with k integer and 0 <= s < 1,
/// `(1+ρ²)^{-s} = Γ(s)^{-1} ∫_0^∞ u^{s-1} e^{-u(1+ρ²)} du`, so h is a
/// u-average of `(1 - Δ)^k` applied to Gaussians of variance 2(u + 1/2).
/// `(1 - Δ)^k` of a radial Gaussian is a polynomial in r² times the
/// Gaussian, computed exactly; only the u-average is numeric.
#[derive(Debug, Clone)]
pub struct BesselPotentialProfile {
    n: usize,
    k: u32,
    s: f64,
}

impl BesselPotentialProfile {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n == 0 || !(beta > 0.0) || !beta.is_finite() {
            return Err(param(format!("need n >= 1 and beta > 0 (n = {n}, beta = {beta})")));
        }
        let half = beta / 2.0;
        let k = half.ceil();
        let s = k - half;
        Ok(Self { n, k: k as u32, s: if s < 1e-15 { 0.0 } else { s } })
    }

    /// `(1 - Δ)^k [(4πc)^{-n/2} e^{-r²/(4c)}]` at radius r.
    fn gaussian_term(&self, c: f64, r: f64) -> f64 {
        let a = 1.0 / (4.0 * c);
        let n = self.n as f64;
        // coefficients of r^{2j}
        let mut poly = vec![1.0];
        for _ in 0..self.k {
            let mut next = poly.clone();
            next.push(0.0);
            for (j, &cj) in poly.iter().enumerate() {
                let jf = j as f64;
                // Δ(r^{2j} e^{-ar²}) = [2j(2j+n-2) r^{2j-2} - 2a(4j+n) r^{2j} + 4a² r^{2j+2}] e^{-ar²}
                if j > 0 {
                    next[j - 1] -= cj * 2.0 * jf * (2.0 * jf + n - 2.0);
                }
                next[j] += cj * 2.0 * a * (4.0 * jf + n);
                next[j + 1] -= cj * 4.0 * a * a;
            }
            poly = next;
        }
        let r2 = r * r;
        let p = poly.iter().rev().fold(0.0, |acc, c| acc * r2 + c);
        (4.0 * PI * c).powf(-n / 2.0) * (-a * r2).exp() * p
    }

    pub fn eval(&self, r: f64) -> f64 {
        if self.s == 0.0 {
            return self.gaussian_term(0.5, r);
        }
        let s = self.s;
        let tol = QuadTolerance { abs: 1e-300, rel: 1e-13, max_segments: 2000 };
        // u in [0, 1] with u = v^{1/s} to remove the u^{s-1} singularity
        let inner = integrate(
            |v: f64| {
                let u = v.powf(1.0 / s);
                (-u).exp() * self.gaussian_term(u + 0.5, r)
            },
            0.0,
            1.0,
            tol,
        );
        let upper = 1.0 + r + 60.0;
        let outer = integrate(|u: f64| u.powf(s - 1.0) * (-u).exp() * self.gaussian_term(u + 0.5, r), 1.0, upper, tol);
        (inner.value / s + outer.value) / gamma(s)
    }
}

/// `‖f‖_{β,p} = ‖F^{-1}((1 + |ξ|²)^{β/2} f̂)‖_{L_p}` for the shipped density.
pub fn sobolev_norm_numeric(density: &SobolevDensity, params: &SobolevParams) -> Result<QuadResult> {
    params.validate()?;
    let SobolevDensity::StandardGaussian { n } = *density;
    let profile = BesselPotentialProfile::new(n, params.beta)?;
    let p = params.p;
    let q = radial_integral(|r| profile.eval(r).abs().powf(p), n, &RadialOptions::default())?;
    let value = q.value.powf(1.0 / p);
    Ok(QuadResult {
        value,
        // first-order propagation through x ↦ x^{1/p}
        abs_error_estimate: value * q.abs_error_estimate / (p * q.value),
        evaluations: q.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::lp_ball_volume;
    use crate::models::{AtomLaw, Matrix};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn binomial_ci_examples() {
        let (lo, hi) = binomial_ci(5, 10, 0.95).unwrap();
        // reference: scipy.stats.beta.ppf
        assert!((lo - 0.187_086_028_447_398_55).abs() < 1e-12);
        assert!((hi - 0.812_913_971_552_601_5).abs() < 1e-12);
        let (lo, hi) = binomial_ci(0, 10, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 0.308_497_107_818_760_8).abs() < 1e-12);
        assert_eq!(binomial_ci(10, 10, 0.95).unwrap().1, 1.0);
        let (lo, hi) = binomial_ci(950_000, 1_000_000, 0.99).unwrap();
        assert!((lo - 0.949_435_966_676_455_8).abs() < 1e-9);
        assert!((hi - 0.950_559_747_084_012_6).abs() < 1e-9);
        let (lo, hi) = binomial_ci(3, 1000, 0.99).unwrap();
        assert!((lo - 0.000_338_144_529_066_493_44).abs() < 1e-12);
        assert!((hi - 0.010_933_777_420_405_24).abs() < 1e-12);
    }

    #[test]
    fn binomial_ci_errors() {
        assert!(binomial_ci(11, 10, 0.95).is_err());
        assert!(binomial_ci(0, 0, 0.95).is_err());
        assert!(binomial_ci(1, 10, 1.0).is_err());
    }

    #[test]
    fn small_ball_examples() {
        let pm = VectorModel::point_mass(2);
        let e = estimate_small_ball(&pm, &QuasiNormSpec::euclidean(2), 0.01, 1000, 1, 0.99).unwrap();
        assert_eq!((e.p_hat, e.ci_high, e.hits), (1.0, 1.0, 1000));

        let g = VectorModel::gaussian(1);
        let e = estimate_small_ball(&g, &QuasiNormSpec::euclidean(1), 1.959_964, 1_000_000, 4, 0.99).unwrap();
        assert!(e.ci_low <= 0.95 && 0.95 <= e.ci_high, "{e:?}");

        let ws = VectorModel::weighted_sum(Matrix::identity(2), AtomLaw::TwoPoint { a: 1.5 });
        let e = estimate_small_ball(&ws, &QuasiNormSpec::euclidean(2), 1.0, 10_000, 4, 0.99).unwrap();
        assert_eq!(e.p_hat, 0.0);
        assert_eq!(e.ci_low, 0.0);
    }

    #[test]
    fn small_ball_dimension_mismatch() {
        let g = VectorModel::gaussian(2);
        assert!(estimate_small_ball(&g, &QuasiNormSpec::euclidean(3), 1.0, 10, 1, 0.99).is_err());
        assert!(estimate_small_ball(&g, &QuasiNormSpec::euclidean(2), 1.0, 0, 1, 0.99).is_err());
    }

    #[test]
    fn small_ball_monotone_in_t_with_shared_samples() {
        let m =
            VectorModel::smoothed(VectorModel::weighted_sum(Matrix::identity(2), AtomLaw::TwoPoint { a: 1.5 }), 0.3);
        let ts: Vec<f64> = (1..40).map(|k| k as f64 * 0.1).collect();
        for p in [0.5, 1.0, 2.0, f64::INFINITY] {
            let est = estimate_small_ball_grid(&m, &QuasiNormSpec { p, n: 2 }, &ts, 20_000, 9, 0.99).unwrap();
            for w in est.windows(2) {
                assert!(w[0].hits <= w[1].hits);
            }
            // single-radius call uses the same stream
            let single = estimate_small_ball(&m, &QuasiNormSpec { p, n: 2 }, ts[10], 20_000, 9, 0.99).unwrap();
            assert_eq!(single, est[10]);
        }
    }

    #[test]
    fn gk_integrates_smooth_and_kinked() {
        let q = integrate(|x: f64| x.sin(), 0.0, PI, QuadTolerance::default());
        assert!((q.value - 2.0).abs() < 1e-13);
        let q = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, QuadTolerance::default());
        assert!((q.value - 0.29).abs() < 1e-12);
    }

    #[test]
    fn radial_gaussian_examples() {
        let opts = RadialOptions { breakpoints: vec![], tail: Some(GaussianTail { coef: 1.0, power: 0.0, rate: 0.5 }) };
        let q = radial_integral(|r| (-r * r / 2.0).exp(), 2, &opts).unwrap();
        assert!(rel(q.value, 2.0 * PI) < 1e-12);
        let q = radial_integral(|r| (-r * r / 2.0).exp(), 1, &opts).unwrap();
        assert!(rel(q.value, (2.0 * PI).sqrt()) < 1e-12);
        for n in 1..=5 {
            let q = radial_integral(|r| (-r * r / 2.0).exp(), n, &opts).unwrap();
            assert!(rel(q.value, (2.0 * PI).powf(n as f64 / 2.0)) < 1e-8, "n = {n}");
            // same without the tail hint (segment doubling)
            let q = radial_integral(|r| (-r * r / 2.0).exp(), n, &RadialOptions::default()).unwrap();
            assert!(rel(q.value, (2.0 * PI).powf(n as f64 / 2.0)) < 1e-8, "n = {n}");
        }
    }

    #[test]
    fn radial_ball_indicator() {
        let opts = RadialOptions { breakpoints: vec![1.0], tail: None };
        for n in 1..=4 {
            let q = radial_integral(|r| if r <= 1.0 { 1.0 } else { 0.0 }, n, &opts).unwrap();
            assert!(rel(q.value, lp_ball_volume(n, 2.0).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn weighted_integral_closed_forms() {
        let mc = McSettings::default();
        for t in [0.1, 0.5, 1.0, 2.0] {
            let q = weighted_charfun_integral(&VectorModel::gaussian(1), t, &mc).unwrap();
            assert!((q.value - (2.0 * PI / (1.0 + t * t)).sqrt()).abs() < 1e-8);
            let q = weighted_charfun_integral(&VectorModel::point_mass(1), t, &mc).unwrap();
            assert!(rel(q.value, (2.0 * PI).sqrt() / t) < 1e-10);
        }
        let q = weighted_charfun_integral(&VectorModel::gaussian(2), 1.0, &mc).unwrap();
        assert!(rel(q.value, PI) < 1e-10);
    }

    #[test]
    fn weighted_integral_monte_carlo() {
        // |φ| = |cos(1.5 s)| |cos(1.5 u)|; with weight e^{-t²|ξ|²/2} the
        // integral factorizes into 1-D integrals done by quadrature.
        let t = 0.8;
        let m = VectorModel::weighted_sum(Matrix::identity(2), AtomLaw::TwoPoint { a: 1.5 });
        let mc = McSettings { samples: 400_000, seed: 3, confidence: 0.99 };
        let q = weighted_charfun_integral(&m, t, &mc).unwrap();
        let one_d = integrate(
            |s: f64| 2.0 * (1.5 * s).cos().abs() * (-t * t * s * s / 2.0).exp(),
            0.0,
            40.0,
            QuadTolerance::default(),
        );
        let exact = one_d.value * one_d.value;
        assert!(
            (q.value - exact).abs() < q.abs_error_estimate * 1.5 + 1e-3,
            "{} vs {exact} ± {}",
            q.value,
            q.abs_error_estimate
        );
        assert!(q.abs_error_estimate < 0.01 * exact);
    }

    #[test]
    fn charfun_l1() {
        let mc = McSettings::default();
        let q = charfun_l1_norm(&VectorModel::gaussian(3), &mc).unwrap();
        assert!(rel(q.value, (2.0 * PI).powf(1.5)) < 1e-9);
        assert!(matches!(charfun_l1_norm(&VectorModel::point_mass(1), &mc), Err(Error::NotApplicable(_))));
        let q = charfun_l1_norm(&VectorModel::smoothed(VectorModel::point_mass(1), 0.5), &mc).unwrap();
        assert!(rel(q.value, (2.0 * PI).sqrt() / 0.5) < 1e-9);
    }

    /// (2π)^{-n} |S^{n-1}| ∫ ρ^{n-1} (1+ρ²)^β e^{-ρ²} dρ, i.e. ‖h‖_2² by
    /// Parseval, computed in frequency space.
    fn parseval_norm(n: usize, beta: f64) -> f64 {
        let opts = RadialOptions { breakpoints: vec![], tail: Some(GaussianTail { coef: 1.0, power: 0.0, rate: 0.5 }) };
        let q = radial_integral(|r| (1.0 + r * r).powf(beta) * (-r * r).exp(), n, &opts).unwrap();
        ((2.0 * PI).powf(-(n as f64)) * q.value).sqrt()
    }

    #[test]
    fn sobolev_small_beta_is_gaussian_lp_norm() {
        for (n, p) in [(1, 2.0), (2, 1.5), (3, 1.2)] {
            let got =
                sobolev_norm_numeric(&SobolevDensity::StandardGaussian { n }, &SobolevParams::new(1e-9, p).unwrap())
                    .unwrap();
            let nf = n as f64;
            let want = (2.0 * PI).powf(-nf / 2.0) * (2.0 * PI / p).powf(nf / (2.0 * p));
            assert!(rel(got.value, want) < 1e-6, "n = {n}, p = {p}: {} vs {want}", got.value);
        }
        let got =
            sobolev_norm_numeric(&SobolevDensity::StandardGaussian { n: 1 }, &SobolevParams::new(1e-9, 2.0).unwrap())
                .unwrap();
        assert!((got.value - 0.531_125_966_013_598_4).abs() < 1e-6);
    }

    #[test]
    fn sobolev_beta_two_exact() {
        // h = f - f'' = f (2 - x²); ‖h‖_2² = (2π)^{-1} · (11/4) √π
        let got =
            sobolev_norm_numeric(&SobolevDensity::StandardGaussian { n: 1 }, &SobolevParams::new(2.0, 2.0).unwrap())
                .unwrap();
        let want = (2.75 * PI.sqrt() / (2.0 * PI)).sqrt();
        assert!(rel(got.value, want) < 1e-9);
    }

    #[test]
    fn sobolev_parseval_cross_check() {
        for n in 1..=3 {
            for beta in [0.1, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0] {
                let got = sobolev_norm_numeric(
                    &SobolevDensity::StandardGaussian { n },
                    &SobolevParams::new(beta, 2.0).unwrap(),
                )
                .unwrap();
                let want = parseval_norm(n, beta);
                assert!(rel(got.value, want) < 1e-6, "n = {n}, β = {beta}: {} vs {want}", got.value);
            }
        }
    }

    #[test]
    fn sobolev_monotone_in_beta() {
        let mut last = 0.0;
        for beta in [0.1, 0.3, 0.7, 1.0, 1.4, 2.0, 2.5, 3.3] {
            let v = sobolev_norm_numeric(
                &SobolevDensity::StandardGaussian { n: 2 },
                &SobolevParams::new(beta, 2.0).unwrap(),
            )
            .unwrap()
            .value;
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn bessel_profile_gaussian_limits() {
        // β = 2k: closed form polynomial times Gaussian; n = 1, k = 1: f (2 - x²)
        let prof = BesselPotentialProfile::new(1, 2.0).unwrap();
        for x in [0.0, 0.5, 1.3, 4.0] {
            let f = (-x * x / 2.0_f64).exp() / (2.0 * PI).sqrt();
            assert!((prof.eval(x) - f * (2.0 - x * x)).abs() < 1e-14);
        }
        // β = 1 in n = 1 against direct cosine transform of √(1+ξ²) e^{-ξ²/2}
        let prof = BesselPotentialProfile::new(1, 1.0).unwrap();
        for x in [0.0, 0.7, 2.0, 5.0] {
            let direct = integrate(
                |xi: f64| (xi * x).cos() * (1.0 + xi * xi).sqrt() * (-xi * xi / 2.0).exp(),
                0.0,
                40.0,
                QuadTolerance::default(),
            )
            .value
                / PI;
            assert!((prof.eval(x) - direct).abs() < 1e-12, "x = {x}: {} vs {direct}", prof.eval(x));
        }
    }
}
