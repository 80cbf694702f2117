//! Wiring between a config and the library: parameter resolution, bound
//! evaluation on a t grid and Monte Carlo verification rows.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use smallball::bounds::{self, BoundReport, LoParams, SobolevParams, TheoremId};
use smallball::geometry::gaussian_measure;
use smallball::lcd::{lcd_search, lo_rhs_integral, LcdParams, LcdResult};
use smallball::models::{spread_parameter, VectorModel};
use smallball::quadrature::{
    charfun_l1_norm, estimate_small_ball_grid, sobolev_norm_numeric, weighted_charfun_integral, McEstimate, McSettings,
    SobolevDensity,
};
use smallball::{Error, QuasiNormSpec};

use crate::config::{BoundParams, ExperimentConfig};
use crate::CliError;

/// z values used when a config gives none.
pub fn default_z_grid() -> Vec<f64> {
    vec![1.0 / (2.0 * PI), 0.5, 1.0, 2.0, 4.0]
}

pub const DEFAULT_LATTICE_SAMPLES: usize = 100_000;
pub const DEFAULT_LCD_STEP: f64 = 1e-3;
pub const DEFAULT_LCD_RADIUS: f64 = 10.0;

fn missing(name: &str, theorem: TheoremId) -> CliError {
    CliError::Usage(format!("missing parameter '{name}' for theorem {theorem}"))
}

/// Bound evaluator with every t-independent quantity resolved once.
pub struct BoundEvaluator {
    params: BoundParams,
    model: Option<VectorModel>,
    n: Option<usize>,
    vol_k: Option<f64>,
    gamma_k: Option<f64>,
    c_k: Option<f64>,
    mc: McSettings,
    sobolev: Option<SobolevParams>,
    sobolev_norm: Option<f64>,
    l1_phi: Option<f64>,
    spread: Option<f64>,
    lo: Option<LoParams>,
    lcd: Option<LcdResult>,
}

impl BoundEvaluator {
    pub fn new(cfg: &ExperimentConfig, params: &BoundParams) -> Result<Self, CliError> {
        let theorem = params.theorem;
        let mc = McSettings { samples: cfg.samples(), seed: cfg.seed(), confidence: cfg.confidence() };
        let norm: Option<&QuasiNormSpec> = cfg.norm.as_ref();
        let model = cfg.model.clone();
        let n = params.n.or(norm.map(|s| s.n)).or(model.as_ref().map(VectorModel::dim));

        let needs_geometry = matches!(
            theorem,
            TheoremId::FourierL1
                | TheoremId::Smoothed
                | TheoremId::Sobolev
                | TheoremId::SupDensity
                | TheoremId::HighSmoothness
                | TheoremId::LittlewoodOfford
                | TheoremId::IntegerStructure
        );
        let needs_gauss = matches!(
            theorem,
            TheoremId::Smoothed | TheoremId::Sobolev | TheoremId::LittlewoodOfford | TheoremId::IntegerStructure
        );
        let needs_ck = needs_gauss;

        let vol_k = match (params.vol_k, norm) {
            (Some(v), _) => Some(v),
            (None, Some(s)) if needs_geometry => Some(s.ball_volume()?),
            _ => None,
        };
        let c_k = match (params.c_k, norm) {
            (Some(v), _) => Some(v),
            (None, Some(s)) if needs_ck => Some(s.constant()),
            _ => None,
        };
        let gamma_k = match (params.gamma_k, norm) {
            (Some(v), _) => Some(v),
            (None, Some(s)) if needs_gauss => Some(gaussian_measure(s, 1.0, mc.samples, mc.seed)?.value),
            _ => None,
        };

        let sobolev = match theorem {
            TheoremId::Sobolev | TheoremId::HighSmoothness | TheoremId::WeightLpNorm | TheoremId::SobolevM => {
                let beta = params.beta.ok_or_else(|| missing("beta", theorem))?;
                let p = params.p.ok_or_else(|| missing("p", theorem))?;
                Some(SobolevParams::new(beta, p)?)
            }
            _ => None,
        };
        let sobolev_norm = match (theorem, params.sobolev_norm) {
            (TheoremId::Sobolev | TheoremId::HighSmoothness, Some(v)) => Some(v),
            (TheoremId::Sobolev | TheoremId::HighSmoothness, None) => match &model {
                Some(VectorModel::StandardGaussian { n }) => Some(
                    sobolev_norm_numeric(&SobolevDensity::StandardGaussian { n: *n }, sobolev.as_ref().unwrap())?.value,
                ),
                _ => {
                    return Err(CliError::Usage(
                        "sobolev_norm must be given unless the model is standard-gaussian".into(),
                    ))
                }
            },
            _ => None,
        };
        let l1_phi = match (theorem, params.l1_phi) {
            (TheoremId::FourierL1, Some(v)) => Some(v),
            (TheoremId::FourierL1, None) => {
                let m = model.as_ref().ok_or_else(|| missing("l1_phi", theorem))?;
                Some(charfun_l1_norm(m, &mc)?.value)
            }
            _ => None,
        };

        let spread = match theorem {
            TheoremId::LittlewoodOfford | TheoremId::IntegerStructure => Some(match (params.b, &model) {
                (Some(b), _) => b,
                (None, Some(VectorModel::WeightedSum { atom, .. })) => spread_parameter(atom)?,
                _ => return Err(missing("b", theorem)),
            }),
            _ => None,
        };
        let mut lcd = None;
        let lo = match (theorem, spread) {
            (TheoremId::LittlewoodOfford, Some(b)) => {
                let gamma = params.gamma.ok_or_else(|| missing("gamma", theorem))?;
                let alpha = params.alpha.ok_or_else(|| missing("alpha", theorem))?;
                let lo = LoParams { b, gamma, alpha, c_abs: params.c_abs.unwrap_or(1.0) };
                lo.validate()?;
                if let Some(VectorModel::WeightedSum { matrix, .. }) = &model {
                    if matrix.ncols() <= smallball::lcd::MAX_SEARCH_DIM {
                        let radius = params.lcd_radius.unwrap_or(DEFAULT_LCD_RADIUS);
                        let step = params.lcd_step.unwrap_or(DEFAULT_LCD_STEP);
                        lcd = Some(lcd_search(matrix, &LcdParams::new(alpha, gamma)?, radius, step)?);
                    }
                }
                Some(lo)
            }
            _ => None,
        };

        Ok(Self {
            params: params.clone(),
            model,
            n,
            vol_k,
            gamma_k,
            c_k,
            mc,
            sobolev,
            sobolev_norm,
            l1_phi,
            spread,
            lo,
            lcd,
        })
    }

    pub fn theorem(&self) -> TheoremId {
        self.params.theorem
    }

    /// The LCD bracket computed for the Littlewood–Offord hypothesis check.
    pub fn lcd(&self) -> Option<&LcdResult> {
        self.lcd.as_ref()
    }

    /// Smallest t the Littlewood–Offord bound certifiably applies to.
    pub fn lo_t_min(&self) -> Option<f64> {
        let n = self.n? as f64;
        self.lcd.as_ref().map(|r| n.sqrt() / r.lower_certified)
    }

    fn need<T: Copy>(&self, v: Option<T>, name: &str) -> Result<T, CliError> {
        v.ok_or_else(|| missing(name, self.params.theorem))
    }

    pub fn eval(&self, t: f64) -> Result<BoundReport, CliError> {
        let theorem = self.params.theorem;
        let mut report = match theorem {
            TheoremId::FourierL1 => bounds::fourier_l1_bound(
                t,
                self.need(self.n, "n")?,
                self.need(self.vol_k, "vol_k")?,
                self.need(self.l1_phi, "l1_phi")?,
            )?,
            TheoremId::Smoothed => {
                let w = match self.params.weighted_integral {
                    Some(w) => w,
                    None => {
                        let m = self.model.as_ref().ok_or_else(|| missing("weighted_integral", theorem))?;
                        weighted_charfun_integral(m, t, &self.mc)?.value
                    }
                };
                bounds::smoothed_bound(
                    t,
                    self.need(self.n, "n")?,
                    self.need(self.vol_k, "vol_k")?,
                    self.need(self.gamma_k, "gamma_k")?,
                    self.need(self.c_k, "c_k")?,
                    w,
                )?
            }
            TheoremId::Sobolev => bounds::sobolev_small_ball_bound(
                t,
                self.need(self.n, "n")?,
                self.need(self.vol_k, "vol_k")?,
                self.need(self.gamma_k, "gamma_k")?,
                self.need(self.c_k, "c_k")?,
                self.need(self.sobolev_norm, "sobolev_norm")?,
                self.sobolev.as_ref().unwrap(),
            )?,
            TheoremId::SupDensity => {
                let sup = match self.params.sup_density {
                    Some(s) => s,
                    None => self.model.as_ref().and_then(VectorModel::sup_density).ok_or_else(|| {
                        CliError::Usage(
                            "sup_density must be given: the model has no bounded density in closed form".into(),
                        )
                    })?,
                };
                bounds::sup_density_bound(t, self.need(self.n, "n")?, self.need(self.vol_k, "vol_k")?, sup)?
            }
            TheoremId::HighSmoothness => bounds::high_smoothness_bound(
                t,
                self.need(self.n, "n")?,
                self.need(self.vol_k, "vol_k")?,
                self.need(self.sobolev_norm, "sobolev_norm")?,
                self.sobolev.as_ref().unwrap(),
            )?,
            TheoremId::LittlewoodOfford => {
                if let Some(t_min) = self.lo_t_min() {
                    if t < t_min * (1.0 - 1e-12) {
                        return Err(CliError::Usage(format!(
                            "t = {t} is below sqrt(n)/LCD = {t_min} (certified lower LCD bound); the bound does not apply"
                        )));
                    }
                }
                bounds::lo_bound(
                    t,
                    self.need(self.n, "n")?,
                    self.need(self.vol_k, "vol_k")?,
                    self.need(self.gamma_k, "gamma_k")?,
                    self.need(self.c_k, "c_k")?,
                    self.lo.as_ref().unwrap(),
                )?
            }
            TheoremId::IntegerStructure => {
                let n = self.need(self.n, "n")?;
                let integral = match self.params.lattice_integral {
                    Some(v) => v,
                    None => {
                        let Some(VectorModel::WeightedSum { matrix, .. }) = &self.model else {
                            return Err(missing("lattice_integral", theorem));
                        };
                        let z = self.params.z_grid.clone().unwrap_or_else(default_z_grid);
                        let samples = self.params.lattice_samples.unwrap_or(DEFAULT_LATTICE_SAMPLES);
                        let b = self.need(self.spread, "b")?;
                        lo_rhs_integral(matrix, t, b, &z, samples, self.mc.seed, self.mc.confidence)?.lebesgue_value(n)
                    }
                };
                bounds::integer_structure_bound(
                    n,
                    self.need(self.vol_k, "vol_k")?,
                    self.need(self.gamma_k, "gamma_k")?,
                    self.need(self.c_k, "c_k")?,
                    integral,
                )?
            }
            TheoremId::GammaTail => {
                bounds::gamma_tail_report(self.need(self.params.x, "x")?, self.need(self.params.alpha, "alpha")?)?
            }
            TheoremId::WeightLpNorm => bounds::weight_lp_norm_bound_with(
                self.sobolev.as_ref().unwrap(),
                self.need(self.n, "n")?,
                t,
                self.params.tie_break.into(),
            )?,
            TheoremId::SobolevM => bounds::sobolev_m(self.sobolev.as_ref().unwrap(), self.need(self.n, "n")?, t)?,
        };
        if self.params.clamp && report.value > 1.0 {
            report.inputs.insert("raw_value".into(), report.value);
            report.value = 1.0;
        }
        Ok(report)
    }
}

/// One line of a verification table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRow {
    pub t: f64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound_value: f64,
    pub branch: String,
    pub pass: bool,
}

pub const VERIFY_HEADER: [&str; 7] = ["t", "p_hat", "ci_low", "ci_high", "bound_value", "branch", "pass"];

fn require_model(cfg: &ExperimentConfig) -> Result<(&VectorModel, &QuasiNormSpec), CliError> {
    let model = cfg.model.as_ref().ok_or_else(|| CliError::Usage("config needs a model".into()))?;
    let norm = cfg.norm.as_ref().ok_or_else(|| CliError::Usage("config needs a norm".into()))?;
    Ok((model, norm))
}

fn require_grid(cfg: &ExperimentConfig) -> Result<&[f64], CliError> {
    if cfg.t_grid.is_empty() {
        return Err(CliError::Usage("config needs a nonempty t_grid".into()));
    }
    Ok(&cfg.t_grid)
}

/// Monte Carlo small-ball estimates on the t grid (shared samples).
pub fn estimate(cfg: &ExperimentConfig) -> Result<Vec<(f64, McEstimate)>, CliError> {
    cfg.validate()?;
    let (model, norm) = require_model(cfg)?;
    let ts = require_grid(cfg)?;
    let est = estimate_small_ball_grid(model, norm, ts, cfg.samples(), cfg.seed(), cfg.confidence())?;
    Ok(ts.iter().copied().zip(est).collect())
}

/// Bound vs Monte Carlo on every t of the grid; `pass` iff `ci_high <= bound`.
pub fn verify(cfg: &ExperimentConfig) -> Result<Vec<VerificationRow>, CliError> {
    cfg.validate()?;
    let (model, norm) = require_model(cfg)?;
    let ts = require_grid(cfg)?;
    let params = cfg.bound.as_ref().ok_or_else(|| CliError::Usage("config needs a bound".into()))?;
    if params.theorem == TheoremId::FourierL1
        && params.l1_phi.is_none()
        && charfun_l1_norm(model, &McSettings::default()).is_err()
    {
        return Err(CliError::Usage(
            "the Fourier bound needs an integrable characteristic function; this model has atoms".into(),
        ));
    }
    let eval = BoundEvaluator::new(cfg, params)?;
    let reports = ts.iter().map(|&t| eval.eval(t)).collect::<Result<Vec<_>, _>>()?;
    let est = estimate_small_ball_grid(model, norm, ts, cfg.samples(), cfg.seed(), cfg.confidence())?;
    Ok(ts
        .iter()
        .zip(reports)
        .zip(est)
        .map(|((&t, r), e)| VerificationRow {
            t,
            p_hat: e.p_hat,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            bound_value: r.value,
            pass: e.ci_high <= r.value,
            branch: r.branch,
        })
        .collect())
}

/// Bound values for the configured theorem, one per t (or the bound's own t).
pub fn bound_reports(cfg: &ExperimentConfig) -> Result<Vec<BoundReport>, CliError> {
    cfg.validate()?;
    let params = cfg.bound.as_ref().ok_or_else(|| CliError::Usage("config needs a bound".into()))?;
    let eval = BoundEvaluator::new(cfg, params)?;
    let ts: Vec<f64> = match (params.t, params.theorem) {
        (_, TheoremId::GammaTail) => vec![f64::NAN],
        (Some(t), _) => vec![t],
        (None, _) if !cfg.t_grid.is_empty() => cfg.t_grid.clone(),
        _ => return Err(CliError::Usage("give the bound a t or the config a t_grid".into())),
    };
    ts.into_iter().map(|t| eval.eval(t)).collect()
}

/// One line of a sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub theorem: TheoremId,
    pub bound_value: f64,
    pub branch: String,
}

pub const SWEEP_HEADER: [&str; 4] = ["t", "theorem", "bound_value", "branch"];

/// Every requested (or every applicable) theorem across the t grid.
pub fn sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, CliError> {
    cfg.validate()?;
    let ts = require_grid(cfg)?;
    let base = cfg.bound.clone().unwrap_or_else(|| BoundParams::new(TheoremId::FourierL1));
    let explicit = !cfg.sweep_theorems.is_empty();
    let theorems: Vec<TheoremId> = if explicit {
        cfg.sweep_theorems.clone()
    } else {
        vec![
            TheoremId::FourierL1,
            TheoremId::Smoothed,
            TheoremId::Sobolev,
            TheoremId::SupDensity,
            TheoremId::HighSmoothness,
            TheoremId::LittlewoodOfford,
            TheoremId::IntegerStructure,
        ]
    };
    let mut rows = Vec::new();
    for th in theorems {
        let params = BoundParams { theorem: th, ..base.clone() };
        let attempt = BoundEvaluator::new(cfg, &params)
            .and_then(|ev| ts.iter().map(|&t| ev.eval(t)).collect::<Result<Vec<_>, _>>());
        match attempt {
            Ok(reports) => rows.extend(ts.iter().zip(reports).map(|(&t, r)| SweepRow {
                t,
                theorem: th,
                bound_value: r.value,
                branch: r.branch,
            })),
            Err(e) if explicit => return Err(e),
            Err(_) => {}
        }
    }
    Ok(rows)
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Convergence(m) => CliError::Failed(format!("no convergence: {m}")),
            other => CliError::Usage(other.to_string()),
        }
    }
}
