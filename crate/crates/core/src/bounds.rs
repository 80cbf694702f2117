//! Closed-form small-ball bounds.
//!
//! Every evaluator returns a [`BoundReport`] carrying the raw value (never
//! clamped to 1), the regime branch that produced it and an echo of its
//! scalar inputs. The constant written `C'_K` in the derivations is realized
//! as `C_K / π` throughout.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::geometry::sphere_area;
use crate::special::gamma;

/// Smoothness order β and integrability exponent p of a Sobolev norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevParams {
    pub beta: f64,
    pub p: f64,
    /// p' = p / (p - 1).
    pub p_conjugate: f64,
}

impl SobolevParams {
    pub fn new(beta: f64, p: f64) -> Result<Self> {
        let s = Self { beta, p, p_conjugate: p / (p - 1.0) };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p <= 2.0) {
            return Err(param(format!("p must be in (1,2], got {}", self.p)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(param(format!("beta must be > 0, got {}", self.beta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    FourierL1,
    Smoothed,
    Sobolev,
    SupDensity,
    HighSmoothness,
    LittlewoodOfford,
    IntegerStructure,
    GammaTail,
    WeightLpNorm,
    SobolevM,
}

impl TheoremId {
    pub const ALL: [TheoremId; 10] = [
        TheoremId::FourierL1,
        TheoremId::Smoothed,
        TheoremId::Sobolev,
        TheoremId::SupDensity,
        TheoremId::HighSmoothness,
        TheoremId::LittlewoodOfford,
        TheoremId::IntegerStructure,
        TheoremId::GammaTail,
        TheoremId::WeightLpNorm,
        TheoremId::SobolevM,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::FourierL1 => "fourier_l1",
            TheoremId::Smoothed => "smoothed",
            TheoremId::Sobolev => "sobolev",
            TheoremId::SupDensity => "sup_density",
            TheoremId::HighSmoothness => "high_smoothness",
            TheoremId::LittlewoodOfford => "littlewood_offord",
            TheoremId::IntegerStructure => "integer_structure",
            TheoremId::GammaTail => "gamma_tail",
            TheoremId::WeightLpNorm => "weight_lp_norm",
            TheoremId::SobolevM => "sobolev_m",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL.into_iter().find(|id| id.as_str() == s).ok_or_else(|| param(format!("unknown theorem {s:?}")))
    }
}

/// The six cases of the weight estimate, in display order. The first three
/// apply when `pt² <= 2`, the last three when `pt² >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// pt² ≤ 2, βp < n − 2.
    SmallRough,
    /// pt² ≤ 2, n − 2 ≤ βp < n.
    SmallCritical,
    /// pt² ≤ 2, βp ≥ n.
    SmallSmooth,
    /// 2 ≤ pt² ≤ n − βp.
    LargeBelowDeficit,
    /// n − βp ≤ pt² ≤ n.
    LargeMiddle,
    /// n ≤ pt².
    LargeBeyondN,
}

impl Regime {
    pub const ALL: [Regime; 6] = [
        Regime::SmallRough,
        Regime::SmallCritical,
        Regime::SmallSmooth,
        Regime::LargeBelowDeficit,
        Regime::LargeMiddle,
        Regime::LargeBeyondN,
    ];

    /// Branch label; contains no commas so it can sit in a CSV cell.
    pub fn label(self) -> &'static str {
        match self {
            Regime::SmallRough => "pt^2<=2; bp<n-2",
            Regime::SmallCritical => "pt^2<=2; n-2<=bp<n",
            Regime::SmallSmooth => "pt^2<=2; bp>=n",
            Regime::LargeBelowDeficit => "2<=pt^2<=n-bp",
            Regime::LargeMiddle => "n-bp<=pt^2<=n",
            Regime::LargeBeyondN => "n<=pt^2",
        }
    }

    pub fn from_label(s: &str) -> Option<Regime> {
        Regime::ALL.into_iter().find(|r| r.label() == s)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Branch label of bounds given by a single formula.
pub const SINGLE_BRANCH: &str = "single";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: TheoremId,
    pub value: f64,
    pub branch: String,
    pub inputs: BTreeMap<String, f64>,
}

impl BoundReport {
    fn new(theorem: TheoremId, value: f64, branch: &str, inputs: &[(&str, f64)]) -> Self {
        Self {
            theorem,
            value,
            branch: branch.to_string(),
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn regime(&self) -> Option<Regime> {
        Regime::from_label(&self.branch)
    }
}

/// How to resolve parameters sitting exactly on a regime boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// The case listed first in the display wins.
    #[default]
    FirstListed,
    /// Evaluate every case whose closed condition holds and keep the max.
    MaxAdjacent,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(param(format!("{name} must be a positive finite number, got {v}")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(param(format!("{name} must be a nonnegative finite number, got {v}")))
    }
}

fn dimension(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(param("dimension n must be >= 1"));
    }
    Ok(n as f64)
}

fn gauss_measure(gamma_k: f64) -> Result<()> {
    if gamma_k > 0.0 && gamma_k <= 1.0 {
        Ok(())
    } else {
        Err(param(format!("gammaK must be in (0,1], got {gamma_k}")))
    }
}

fn quasi_constant(c_k: f64) -> Result<()> {
    if c_k >= 1.0 && c_k.is_finite() {
        Ok(())
    } else {
        Err(param(format!("C_K must be >= 1, got {c_k}")))
    }
}

/// `volK · (t/2π)^n · ∫|φ_X|`.
pub fn fourier_l1_bound(t: f64, n: usize, vol_k: f64, l1_phi: f64) -> Result<BoundReport> {
    let nf = dimension(n)?;
    positive("t", t)?;
    positive("volK", vol_k)?;
    if l1_phi.is_infinite() {
        return Err(Error::NotApplicable("characteristic function is not integrable; use the smoothed bound".into()));
    }
    positive("l1_phi", l1_phi)?;
    let value = vol_k * (t / (2.0 * PI)).powi(n as i32) * l1_phi;
    Ok(BoundReport::new(
        TheoremId::FourierL1,
        value,
        SINGLE_BRANCH,
        &[("t", t), ("n", nf), ("volK", vol_k), ("l1_phi", l1_phi)],
    ))
}

/// `(volK/γK) · (C_K t/π)^n · ∫|φ_X(ξ)| e^{-t²|ξ|²/2} dξ`.
pub fn smoothed_bound(
    t: f64,
    n: usize,
    vol_k: f64,
    gamma_k: f64,
    c_k: f64,
    weighted_integral: f64,
) -> Result<BoundReport> {
    let nf = dimension(n)?;
    positive("t", t)?;
    positive("volK", vol_k)?;
    gauss_measure(gamma_k)?;
    quasi_constant(c_k)?;
    positive("weighted_integral", weighted_integral)?;
    let value = vol_k / gamma_k * (c_k * t / PI).powi(n as i32) * weighted_integral;
    Ok(BoundReport::new(
        TheoremId::Smoothed,
        value,
        SINGLE_BRANCH,
        &[
            ("t", t),
            ("n", nf),
            ("volK", vol_k),
            ("gammaK", gamma_k),
            ("C_K", c_k),
            ("weighted_integral", weighted_integral),
        ],
    ))
}

/// `2^{α+1} x^α e^{-x} / α`, an upper bound on `∫_x^∞ r^{α-1} e^{-r} dr`
/// valid for `x >= α >= 1`.
pub fn gamma_tail_bound(x: f64, alpha: f64) -> Result<f64> {
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("need alpha >= 1, got {alpha}")));
    }
    if !(x >= alpha) || !x.is_finite() {
        return Err(Error::Domain(format!("need x >= alpha, got x = {x}, alpha = {alpha}")));
    }
    let log = (alpha + 1.0) * std::f64::consts::LN_2 + alpha * x.ln() - x - alpha.ln();
    Ok(log.exp())
}

/// [`gamma_tail_bound`] wrapped in a report.
pub fn gamma_tail_report(x: f64, alpha: f64) -> Result<BoundReport> {
    let value = gamma_tail_bound(x, alpha)?;
    Ok(BoundReport::new(TheoremId::GammaTail, value, SINGLE_BRANCH, &[("x", x), ("alpha", alpha)]))
}

// Two reals equal up to rounding noise count as a regime boundary.
fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn le(a: f64, b: f64) -> bool {
    a <= b || near(a, b)
}

fn lt(a: f64, b: f64) -> bool {
    a < b && !near(a, b)
}

struct WeightInputs {
    n: f64,
    bp: f64,
    pt2: f64,
}

impl WeightInputs {
    fn new(params: &SobolevParams, n: usize, t: f64) -> Result<Self> {
        params.validate()?;
        let n = dimension(n)?;
        positive("t", t)?;
        Ok(Self { n, bp: params.beta * params.p, pt2: params.p * t * t })
    }

    /// Regimes whose condition holds, in display order. Under first-listed
    /// tie-breaking the head is taken; boundaries make the list longer.
    fn lemma_candidates(&self) -> Vec<Regime> {
        let Self { n, bp, pt2 } = *self;
        let mut out = Vec::with_capacity(2);
        if le(pt2, 2.0) {
            if le(bp, n - 2.0) {
                out.push(Regime::SmallRough);
            }
            if le(n - 2.0, bp) && le(bp, n) {
                out.push(Regime::SmallCritical);
            }
            if le(n, bp) {
                out.push(Regime::SmallSmooth);
            }
        }
        if le(2.0, pt2) {
            if le(pt2, n - bp) {
                out.push(Regime::LargeBelowDeficit);
            }
            if le(n - bp, pt2) && le(pt2, n) {
                out.push(Regime::LargeMiddle);
            }
            if le(n, pt2) {
                out.push(Regime::LargeBeyondN);
            }
        }
        out
    }

    /// The branch fixed by the display's own strict/nonstrict inequalities.
    fn lemma_first(&self) -> Regime {
        let Self { n, bp, pt2 } = *self;
        if le(pt2, 2.0) {
            if lt(bp, n - 2.0) {
                Regime::SmallRough
            } else if lt(bp, n) {
                Regime::SmallCritical
            } else {
                Regime::SmallSmooth
            }
        } else if le(pt2, n - bp) {
            Regime::LargeBelowDeficit
        } else if le(pt2, n) {
            Regime::LargeMiddle
        } else {
            Regime::LargeBeyondN
        }
    }

    fn lemma_value(&self, r: Regime) -> f64 {
        let Self { n, bp, pt2 } = *self;
        let a = (n - bp) / 2.0;
        let u = 2.0 / pt2;
        match r {
            Regime::SmallRough => gamma(a) * u.powf(a),
            Regime::SmallCritical => (2.0 * E / pt2).ln() * u.powf(a),
            Regime::SmallSmooth => (2.0 * E / pt2).ln(),
            Regime::LargeBelowDeficit => 2.0 * (-pt2 / 18.0).exp() + u.powf(a) * gamma(a),
            Regime::LargeMiddle => 3.0 * (-pt2 / 18.0).exp(),
            Regime::LargeBeyondN => (2.0 * n / pt2 * (E * pt2 / n).ln()).powf(n / 2.0),
        }
    }
}

fn pick(candidates: &[Regime], first: Regime, tie: TieBreak, value: impl Fn(Regime) -> f64) -> (Regime, f64) {
    match tie {
        TieBreak::FirstListed => (first, value(first)),
        TieBreak::MaxAdjacent => candidates
            .iter()
            .map(|&r| (r, value(r)))
            .chain(std::iter::once((first, value(first))))
            .fold((first, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best }),
    }
}

/// Regimes of the weight estimate whose closed conditions hold at `(β,p,n,t)`.
/// One entry in the interior of a regime, two or more on a boundary.
pub fn weight_regimes(params: &SobolevParams, n: usize, t: f64) -> Result<Vec<Regime>> {
    Ok(WeightInputs::new(params, n, t)?.lemma_candidates())
}

/// The formula of one weight-estimate branch, whether or not its condition
/// holds at `(β,p,n,t)`.
pub fn weight_branch_value(params: &SobolevParams, n: usize, t: f64, regime: Regime) -> Result<f64> {
    Ok(WeightInputs::new(params, n, t)?.lemma_value(regime))
}

/// Upper bound on `‖(1+|ξ|²)^{-β/2} e^{-t²|ξ|²/2}‖_{L_p}^p / |S^{n-1}|`,
/// i.e. on `∫_0^∞ r^{n-1} min(1, r^{-βp}) e^{-pt²r²/2} dr`.
pub fn weight_lp_norm_bound(params: &SobolevParams, n: usize, t: f64) -> Result<BoundReport> {
    weight_lp_norm_bound_with(params, n, t, TieBreak::FirstListed)
}

pub fn weight_lp_norm_bound_with(params: &SobolevParams, n: usize, t: f64, tie: TieBreak) -> Result<BoundReport> {
    let w = WeightInputs::new(params, n, t)?;
    let (regime, value) = pick(&w.lemma_candidates(), w.lemma_first(), tie, |r| w.lemma_value(r));
    Ok(BoundReport::new(
        TheoremId::WeightLpNorm,
        value,
        regime.label(),
        &[("beta", params.beta), ("p", params.p), ("n", w.n), ("t", t)],
    ))
}

/// The theorem's M(β,p,n,t), evaluated from its own regime table.
pub fn sobolev_m(params: &SobolevParams, n: usize, t: f64) -> Result<BoundReport> {
    let w = WeightInputs::new(params, n, t)?;
    let WeightInputs { n: nf, bp, pt2 } = w;
    let (beta, p) = (params.beta, params.p);
    let deficit = nf - bp;
    let regime = if le(pt2, 2.0) {
        if lt(2.0, deficit) {
            Regime::SmallRough
        } else if lt(0.0, deficit) {
            Regime::SmallCritical
        } else {
            Regime::SmallSmooth
        }
    } else if le(pt2, deficit) {
        Regime::LargeBelowDeficit
    } else if le(pt2, nf) {
        Regime::LargeMiddle
    } else {
        Regime::LargeBeyondN
    };

    let s = sphere_area(n).powf(1.0 / p);
    let tn = t.powi(n as i32);
    let lead = 2f64.powf(nf / (2.0 * p) - beta / 2.0) * p.powf(beta / 2.0 - nf / (2.0 * p));
    let t_rough = t.powf(beta + nf / params.p_conjugate);
    let log_small = (2.0 * E / pt2).ln();
    let a = deficit / 2.0;
    let value = match regime {
        Regime::SmallRough => lead * s * gamma(a).powf(1.0 / p) * t_rough,
        Regime::SmallCritical => lead * s * log_small.powf(1.0 / p) * t_rough,
        Regime::SmallSmooth => s * log_small.powf(1.0 / p) * tn,
        Regime::LargeBelowDeficit => {
            s * (2.0 * (-pt2 / 18.0).exp() + (2.0 / pt2).powf(a) * gamma(a)).powf(1.0 / p) * tn
        }
        Regime::LargeMiddle => 3f64.powf(1.0 / p) * s * (-t * t / 18.0).exp() * tn,
        Regime::LargeBeyondN => s * (2.0 * nf / pt2 * (E * pt2 / nf).ln()).powf(nf / (2.0 * p)) * tn,
    };
    Ok(BoundReport::new(TheoremId::SobolevM, value, regime.label(), &[("beta", beta), ("p", p), ("n", nf), ("t", t)]))
}

/// `(C_K/π)^n · (volK/γK) · ‖f_X‖_{β,p} · M(β,p,n,t)`.
#[allow(clippy::too_many_arguments)]
pub fn sobolev_small_ball_bound(
    t: f64,
    n: usize,
    vol_k: f64,
    gamma_k: f64,
    c_k: f64,
    sobolev_norm: f64,
    params: &SobolevParams,
) -> Result<BoundReport> {
    positive("volK", vol_k)?;
    gauss_measure(gamma_k)?;
    quasi_constant(c_k)?;
    nonnegative("sobolev_norm", sobolev_norm)?;
    let m = sobolev_m(params, n, t)?;
    let value = (c_k / PI).powi(n as i32) * vol_k / gamma_k * sobolev_norm * m.value;
    Ok(BoundReport::new(
        TheoremId::Sobolev,
        value,
        &m.branch,
        &[
            ("t", t),
            ("n", n as f64),
            ("volK", vol_k),
            ("gammaK", gamma_k),
            ("C_K", c_k),
            ("sobolev_norm", sobolev_norm),
            ("beta", params.beta),
            ("p", params.p),
            ("M", m.value),
        ],
    ))
}

/// `volK · t^n · sup f_X`.
pub fn sup_density_bound(t: f64, n: usize, vol_k: f64, sup_density: f64) -> Result<BoundReport> {
    let nf = dimension(n)?;
    nonnegative("t", t)?;
    positive("volK", vol_k)?;
    nonnegative("sup_density", sup_density)?;
    let value = vol_k * t.powi(n as i32) * sup_density;
    Ok(BoundReport::new(
        TheoremId::SupDensity,
        value,
        SINGLE_BRANCH,
        &[("t", t), ("n", nf), ("volK", vol_k), ("sup_density", sup_density)],
    ))
}

/// `|S^{n-1}| · (1/(βp-n) + 1/n)^{1/p} · volK · t^n · ‖f_X‖_{β,p}`, for βp > n.
pub fn high_smoothness_bound(
    t: f64,
    n: usize,
    vol_k: f64,
    sobolev_norm: f64,
    params: &SobolevParams,
) -> Result<BoundReport> {
    params.validate()?;
    let nf = dimension(n)?;
    nonnegative("t", t)?;
    positive("volK", vol_k)?;
    nonnegative("sobolev_norm", sobolev_norm)?;
    let bp = params.beta * params.p;
    if !(bp > nf) {
        return Err(Error::NotApplicable(format!("needs beta*p > n, got beta*p = {bp}, n = {n}")));
    }
    let shape = (1.0 / (bp - nf) + 1.0 / nf).powf(1.0 / params.p);
    let value = sphere_area(n) * shape * vol_k * t.powi(n as i32) * sobolev_norm;
    Ok(BoundReport::new(
        TheoremId::HighSmoothness,
        value,
        SINGLE_BRANCH,
        &[("t", t), ("n", nf), ("volK", vol_k), ("sobolev_norm", sobolev_norm), ("beta", params.beta), ("p", params.p)],
    ))
}

/// Parameters of the Littlewood–Offord bound beyond the geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoParams {
    /// Spread parameter of the atom law.
    pub b: f64,
    pub gamma: f64,
    pub alpha: f64,
    /// Absolute constant multiplying `t` in the first term; 1 reproduces the
    /// statement as displayed.
    pub c_abs: f64,
}

impl LoParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b < 1.0) {
            return Err(param(format!("b must be in (0,1), got {}", self.b)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(param(format!("gamma must be in (0,1), got {}", self.gamma)));
        }
        positive("alpha", self.alpha)?;
        if !(self.c_abs >= 1.0 && self.c_abs.is_finite()) {
            return Err(param(format!("C_abs must be >= 1, got {}", self.c_abs)));
        }
        Ok(())
    }
}

/// `(volK/γK) · (C_K/π)^n · ((C_abs t/(γ√b))^n + e^{-bα²})`.
///
/// The caller is responsible for `t >= √n / LCD_{α,γ}(A)`.
pub fn lo_bound(t: f64, n: usize, vol_k: f64, gamma_k: f64, c_k: f64, lo: &LoParams) -> Result<BoundReport> {
    let nf = dimension(n)?;
    positive("t", t)?;
    positive("volK", vol_k)?;
    gauss_measure(gamma_k)?;
    quasi_constant(c_k)?;
    lo.validate()?;
    let ni = n as i32;
    let structured = (lo.c_abs * t / (lo.gamma * lo.b.sqrt())).powi(ni);
    let value = vol_k / gamma_k * (c_k / PI).powi(ni) * (structured + (-lo.b * lo.alpha * lo.alpha).exp());
    Ok(BoundReport::new(
        TheoremId::LittlewoodOfford,
        value,
        SINGLE_BRANCH,
        &[
            ("t", t),
            ("n", nf),
            ("volK", vol_k),
            ("gammaK", gamma_k),
            ("C_K", c_k),
            ("b", lo.b),
            ("gamma", lo.gamma),
            ("alpha", lo.alpha),
            ("C_abs", lo.c_abs),
        ],
    ))
}

/// The ℓ_p constant exactly as printed in the corollary form,
/// `min{2^{1/p-1}, 1}`.
///
/// For p < 1 this is 1 while the quasi-triangle constant is `2^{1/p-1} > 1`,
/// so the printed `min` is suspect; [`lo_bound`] takes `C_K` explicitly and
/// does not use this.
pub fn corollary_lp_constant(p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(param(format!("exponent p must be > 0, got {p}")));
    }
    Ok(2f64.powf(1.0 / p - 1.0).min(1.0))
}

/// Corollary form `(C·C_p)^n ((t/(γ√b))^n + e^{-bα²})` bounding
/// `P(|X|_p <= t n^{1/p})`, with the absolute constant `C` supplied.
pub fn lo_corollary_bound(t: f64, n: usize, p: f64, c: f64, lo: &LoParams) -> Result<BoundReport> {
    let nf = dimension(n)?;
    positive("t", t)?;
    positive("C", c)?;
    lo.validate()?;
    let cp = corollary_lp_constant(p)?;
    let ni = n as i32;
    let value =
        (c * cp).powi(ni) * ((lo.c_abs * t / (lo.gamma * lo.b.sqrt())).powi(ni) + (-lo.b * lo.alpha * lo.alpha).exp());
    Ok(BoundReport::new(
        TheoremId::LittlewoodOfford,
        value,
        "lp-corollary",
        &[("t", t), ("n", nf), ("p", p), ("C", c), ("C_p", cp), ("b", lo.b), ("gamma", lo.gamma), ("alpha", lo.alpha)],
    ))
}

/// `(volK/γK) · (C_K/π)^n · I`, where `I` is the lattice integral
/// `sup_z ∫ e^{-4b f(θ)² - |θ|²/2} dθ` (unnormalized Lebesgue integral).
pub fn integer_structure_bound(
    n: usize,
    vol_k: f64,
    gamma_k: f64,
    c_k: f64,
    lattice_integral: f64,
) -> Result<BoundReport> {
    let nf = dimension(n)?;
    positive("volK", vol_k)?;
    gauss_measure(gamma_k)?;
    quasi_constant(c_k)?;
    nonnegative("lattice_integral", lattice_integral)?;
    let value = vol_k / gamma_k * (c_k / PI).powi(n as i32) * lattice_integral;
    Ok(BoundReport::new(
        TheoremId::IntegerStructure,
        value,
        SINGLE_BRANCH,
        &[("n", nf), ("volK", vol_k), ("gammaK", gamma_k), ("C_K", c_k), ("lattice_integral", lattice_integral)],
    ))
}
