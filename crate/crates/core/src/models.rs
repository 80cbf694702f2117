//! Random vectors paired with their characteristic functions.
//!
//! Three families: the standard Gaussian on R^n, a Gaussian-smoothed vector
//! `X + tG` with `G` independent of `X`, and weighted sums `Σ_k δ_k a_k` of
//! fixed rows `a_k` with i.i.d. scalar atoms `δ_k`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::rng::{self, tag};

/// Dense row-major real matrix. Serialized as a list of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(param("matrix needs at least one row"));
        }
        let c = rows[0].len();
        if c == 0 {
            return Err(param("matrix needs at least one column"));
        }
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::Dimension { expected: c, got: bad.len() });
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(param("matrix entries must be finite"));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { rows: n, cols: n, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    /// `out = A θ`.
    pub fn apply_into(&self, theta: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.rows()) {
            *o = row.iter().zip(theta).map(|(a, t)| a * t).sum();
        }
    }

    pub fn apply(&self, theta: &[f64]) -> Result<Vec<f64>> {
        if theta.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, got: theta.len() });
        }
        let mut out = vec![0.0; self.rows];
        self.apply_into(theta, &mut out);
        Ok(out)
    }

    /// Singular values, largest first.
    pub fn singular_values(&self) -> Vec<f64> {
        let m = nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data);
        let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn max_row_norm(&self) -> f64 {
        self.rows().map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.rows().map(<[f64]>::to_vec).collect()
    }
}

/// A user-provided scalar law: a sampler and its characteristic function.
#[derive(Clone)]
pub struct CustomAtom {
    pub name: String,
    pub sampler: Arc<dyn Fn(&mut ChaCha8Rng) -> f64 + Send + Sync>,
    pub charfun: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
}

impl fmt::Debug for CustomAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomAtom").field("name", &self.name).finish_non_exhaustive()
    }
}

impl PartialEq for CustomAtom {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.sampler, &other.sampler) && Arc::ptr_eq(&self.charfun, &other.charfun)
    }
}

/// Law of the i.i.d. coefficients δ_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AtomLaw {
    /// ±a with probability 1/2 each.
    TwoPoint { a: f64 },
    /// Uniform on [lo, hi].
    UniformInterval { lo: f64, hi: f64 },
    #[serde(skip)]
    Custom(CustomAtom),
}

impl AtomLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            AtomLaw::TwoPoint { a } if !(*a > 0.0 && a.is_finite()) => {
                Err(param(format!("two-point atom needs a > 0, got {a}")))
            }
            AtomLaw::UniformInterval { lo, hi } if !(lo < hi && lo.is_finite() && hi.is_finite()) => {
                Err(param(format!("uniform atom needs lo < hi, got [{lo}, {hi}]")))
            }
            _ => Ok(()),
        }
    }

    pub fn charfun(&self, s: f64) -> Complex64 {
        match self {
            AtomLaw::TwoPoint { a } => Complex64::new((a * s).cos(), 0.0),
            AtomLaw::UniformInterval { lo, hi } => {
                let half = 0.5 * (hi - lo) * s;
                let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { half.sin() / half };
                Complex64::from_polar(sinc, 0.5 * (lo + hi) * s)
            }
            AtomLaw::Custom(c) => (c.charfun)(s),
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            AtomLaw::TwoPoint { a } => {
                if rng.random::<bool>() {
                    *a
                } else {
                    -*a
                }
            }
            AtomLaw::UniformInterval { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            AtomLaw::Custom(c) => (c.sampler)(rng),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            AtomLaw::TwoPoint { .. } => true,
            AtomLaw::UniformInterval { lo, hi } => lo == &-hi,
            AtomLaw::Custom(_) => false,
        }
    }
}

/// Largest b with `sup_x P(|δ - x| <= 1) <= 1 - b`.
pub fn spread_parameter(law: &AtomLaw) -> Result<f64> {
    law.validate()?;
    let sup_mass = match law {
        // a closed window of length 2 holds both atoms iff their gap 2a <= 2
        AtomLaw::TwoPoint { a } => {
            if *a <= 1.0 {
                1.0
            } else {
                0.5
            }
        }
        AtomLaw::UniformInterval { lo, hi } => (2.0 / (hi - lo)).min(1.0),
        AtomLaw::Custom(c) => {
            return Err(Error::Capability(format!("spread parameter of custom law {:?} is not computable", c.name)))
        }
    };
    let b = 1.0 - sup_mass;
    if b <= 0.0 {
        return Err(Error::NoValidSpread(format!("{law:?}: some window of length 2 carries full mass")));
    }
    Ok(b)
}

/// A random vector in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VectorModel {
    StandardGaussian {
        n: usize,
    },
    Smoothed {
        base: Box<VectorModel>,
        t: f64,
    },
    /// `X = Σ_k δ_k a_k` where `a_k` are the rows of `matrix` (N × n).
    WeightedSum {
        matrix: Matrix,
        atom: AtomLaw,
    },
}

impl VectorModel {
    pub fn gaussian(n: usize) -> Self {
        VectorModel::StandardGaussian { n }
    }

    pub fn smoothed(base: VectorModel, t: f64) -> Self {
        VectorModel::Smoothed { base: Box::new(base), t }
    }

    pub fn weighted_sum(matrix: Matrix, atom: AtomLaw) -> Self {
        VectorModel::WeightedSum { matrix, atom }
    }

    /// The point mass at the origin of R^n (zero coefficient matrix).
    pub fn point_mass(n: usize) -> Self {
        VectorModel::WeightedSum { matrix: Matrix::zeros(1, n), atom: AtomLaw::TwoPoint { a: 1.0 } }
    }

    pub fn dim(&self) -> usize {
        match self {
            VectorModel::StandardGaussian { n } => *n,
            VectorModel::Smoothed { base, .. } => base.dim(),
            VectorModel::WeightedSum { matrix, .. } => matrix.ncols(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            VectorModel::StandardGaussian { n } if *n == 0 => Err(param("dimension must be >= 1")),
            VectorModel::StandardGaussian { .. } => Ok(()),
            VectorModel::Smoothed { base, t } => {
                if !(*t > 0.0 && t.is_finite()) {
                    return Err(param(format!("smoothing scale t must be > 0, got {t}")));
                }
                base.validate()
            }
            VectorModel::WeightedSum { atom, .. } => atom.validate(),
        }
    }

    /// Total Gaussian variance c such that `|φ_X(ξ)| = e^{-c|ξ|²/2}`, when
    /// the modulus of the characteristic function is of that radial form.
    /// A point mass gives `c = 0`.
    pub fn radial_gaussian_scale(&self) -> Option<f64> {
        match self {
            VectorModel::StandardGaussian { .. } => Some(1.0),
            VectorModel::Smoothed { base, t } => base.radial_gaussian_scale().map(|c| c + t * t),
            VectorModel::WeightedSum { matrix, .. } if matrix.is_zero() => Some(0.0),
            VectorModel::WeightedSum { .. } => None,
        }
    }

    /// Largest density value, when it has a closed form (Gaussian types).
    pub fn sup_density(&self) -> Option<f64> {
        match self.radial_gaussian_scale() {
            Some(c) if c > 0.0 && self.is_gaussian_type() => {
                Some((2.0 * std::f64::consts::PI * c).powf(-(self.dim() as f64) / 2.0))
            }
            _ => None,
        }
    }

    fn is_gaussian_type(&self) -> bool {
        match self {
            VectorModel::StandardGaussian { .. } => true,
            VectorModel::Smoothed { base, .. } => base.is_gaussian_type() || base.radial_gaussian_scale() == Some(0.0),
            VectorModel::WeightedSum { .. } => false,
        }
    }

    /// Whether this is the zero vector almost surely.
    pub fn is_point_mass(&self) -> bool {
        matches!(self, VectorModel::WeightedSum { matrix, .. } if matrix.is_zero())
    }

    fn charfun_unchecked(&self, xi: &[f64]) -> Complex64 {
        match self {
            VectorModel::StandardGaussian { .. } => Complex64::new((-0.5 * norm2_sq(xi)).exp(), 0.0),
            VectorModel::Smoothed { base, t } => base.charfun_unchecked(xi) * (-0.5 * t * t * norm2_sq(xi)).exp(),
            VectorModel::WeightedSum { matrix, atom } => {
                matrix.rows().map(|row| atom.charfun(row.iter().zip(xi).map(|(a, x)| a * x).sum())).product()
            }
        }
    }

    /// Draws one vector into `out`.
    pub fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        match self {
            VectorModel::StandardGaussian { .. } => {
                for v in out.iter_mut() {
                    *v = StandardNormal.sample(rng);
                }
            }
            VectorModel::Smoothed { base, t } => {
                base.draw(rng, out);
                for v in out.iter_mut() {
                    let g: f64 = StandardNormal.sample(rng);
                    *v += t * g;
                }
            }
            VectorModel::WeightedSum { matrix, atom } => {
                out.iter_mut().for_each(|v| *v = 0.0);
                for row in matrix.rows() {
                    let d = atom.sample(rng);
                    for (o, a) in out.iter_mut().zip(row) {
                        *o += d * a;
                    }
                }
            }
        }
    }
}

fn norm2_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// φ_X(ξ) = E exp(i⟨ξ, X⟩).
pub fn charfun(model: &VectorModel, xi: &[f64]) -> Result<Complex64> {
    if xi.len() != model.dim() {
        return Err(Error::Dimension { expected: model.dim(), got: xi.len() });
    }
    Ok(model.charfun_unchecked(xi))
}

/// `count` i.i.d. draws stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.data.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }
}

/// Draws `count` samples; the stream is a function of `(seed, chunk)` only.
pub fn sample(model: &VectorModel, count: usize, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Err(param("sample count must be >= 1"));
    }
    model.validate()?;
    let n = model.dim();
    let chunks = rng::map_chunks(count, seed, tag::MODEL, |rng, len| {
        let mut buf = vec![0.0; len * n];
        for x in buf.chunks_exact_mut(n) {
            model.draw(rng, x);
        }
        buf
    });
    Ok(SampleBatch { n, data: chunks.concat() })
}

/// Streams the draws of [`sample`] (same stream) through a per-chunk
/// accumulator without storing them. Accumulators return in chunk order.
pub fn fold_samples<T, I, F>(model: &VectorModel, count: usize, seed: u64, init: I, visit: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> T + Sync,
    F: Fn(&mut T, &[f64]) + Sync,
{
    let n = model.dim();
    rng::map_chunks(count, seed, tag::MODEL, |rng, len| {
        let mut acc = init();
        let mut x = vec![0.0; n];
        for _ in 0..len {
            model.draw(rng, &mut x);
            visit(&mut acc, &x);
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn two_point() -> AtomLaw {
        AtomLaw::TwoPoint { a: 1.5 }
    }

    #[test]
    fn charfun_examples() {
        let g = VectorModel::gaussian(3);
        assert_eq!(charfun(&g, &[0.0; 3]).unwrap(), Complex64::new(1.0, 0.0));
        let xi = [0.3, -1.0, 2.0];
        let want = (-0.5 * norm2_sq(&xi)).exp();
        assert!((charfun(&g, &xi).unwrap().re - want).abs() < 1e-15);

        let m = Matrix::from_rows(vec![vec![1.0, 0.0]]).unwrap();
        let ws = VectorModel::weighted_sum(m, two_point());
        for (s, u) in [(0.7, 3.0), (-2.0, 0.1)] {
            let v = charfun(&ws, &[s, u]).unwrap();
            assert!((v.re - (1.5 * s).cos()).abs() < 1e-15 && v.im == 0.0);
        }

        let sm = VectorModel::smoothed(VectorModel::gaussian(1), 1.0);
        for s in [0.0, 0.5, 2.0] {
            assert!((charfun(&sm, &[s]).unwrap().re - (-s * s).exp()).abs() < 1e-15);
        }
        assert!(matches!(charfun(&sm, &[1.0, 2.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn uniform_charfun_closed_form() {
        let law = AtomLaw::UniformInterval { lo: 0.0, hi: 4.0 };
        // E e^{isU} = (e^{4is} - 1) / (4is)
        for s in [0.3, 1.0, -2.5] {
            let want = (Complex64::new(0.0, 4.0 * s).exp() - 1.0) / Complex64::new(0.0, 4.0 * s);
            assert!((law.charfun(s) - want).norm() < 1e-14);
        }
        assert!((law.charfun(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn spread_parameters() {
        assert_eq!(spread_parameter(&two_point()).unwrap(), 0.5);
        assert_eq!(spread_parameter(&AtomLaw::UniformInterval { lo: 0.0, hi: 4.0 }).unwrap(), 0.5);
        assert!(matches!(spread_parameter(&AtomLaw::TwoPoint { a: 1.0 }), Err(Error::NoValidSpread(_))));
        assert!(matches!(
            spread_parameter(&AtomLaw::UniformInterval { lo: -1.0, hi: 1.0 }),
            Err(Error::NoValidSpread(_))
        ));
        assert!(spread_parameter(&AtomLaw::TwoPoint { a: -1.0 }).is_err());
    }

    #[test]
    fn gaussian_sample_mean() {
        let b = sample(&VectorModel::gaussian(2), 1_000_000, 3).unwrap();
        assert_eq!(b.len(), 1_000_000);
        for j in 0..2 {
            let mean: f64 = b.rows().map(|x| x[j]).sum::<f64>() / b.len() as f64;
            assert!(mean.abs() < 4e-3, "coordinate {j}: {mean}");
        }
    }

    #[test]
    fn two_point_support() {
        let m = VectorModel::weighted_sum(Matrix::identity(2), two_point());
        let b = sample(&m, 10_000, 1).unwrap();
        assert!(b.data.iter().all(|v| v.abs() == 1.5));
    }

    #[test]
    fn smoothed_point_mass_covariance() {
        let t = 0.7;
        let m = VectorModel::smoothed(VectorModel::point_mass(2), t);
        let b = sample(&m, 1_000_000, 8).unwrap();
        let n = b.len() as f64;
        let mut cov = [[0.0; 2]; 2];
        for x in b.rows() {
            for i in 0..2 {
                for j in 0..2 {
                    cov[i][j] += x[i] * x[j] / n;
                }
            }
        }
        assert!((cov[0][0] / (t * t) - 1.0).abs() < 0.01);
        assert!((cov[1][1] / (t * t) - 1.0).abs() < 0.01);
        assert!(cov[0][1].abs() / (t * t) < 0.01);
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = VectorModel::smoothed(VectorModel::weighted_sum(Matrix::identity(3), two_point()), 0.2);
        assert_eq!(sample(&m, 40_000, 77).unwrap(), sample(&m, 40_000, 77).unwrap());
        assert_ne!(sample(&m, 100, 77).unwrap(), sample(&m, 100, 78).unwrap());
    }

    #[test]
    fn empirical_charfun_matches() {
        use rand::SeedableRng;
        let m = VectorModel::smoothed(
            VectorModel::weighted_sum(
                Matrix::from_rows(vec![vec![1.0, 0.2], vec![-0.3, 0.8], vec![0.5, 0.5]]).unwrap(),
                AtomLaw::UniformInterval { lo: 0.0, hi: 4.0 },
            ),
            0.3,
        );
        let b = sample(&m, 1_000_000, 12).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let dir: [f64; 2] = [StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)];
            let r = 3.0 * rng.random::<f64>() / norm2_sq(&dir).sqrt();
            let xi = [dir[0] * r, dir[1] * r];
            let emp: Complex64 =
                b.rows().map(|x| Complex64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1])).sum::<Complex64>()
                    / b.len() as f64;
            let exact = charfun(&m, &xi).unwrap();
            assert!((emp - exact).norm() < 5e-3, "ξ = {xi:?}: {emp} vs {exact}");
        }
    }

    #[test]
    fn serde_roundtrip_descriptor() {
        let m = VectorModel::smoothed(
            VectorModel::weighted_sum(Matrix::identity(2), AtomLaw::UniformInterval { lo: 0.0, hi: 4.0 }),
            0.5,
        );
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<VectorModel>(&s).unwrap(), m);
        let bad = r#"{"kind":"weighted-sum","matrix":[[1,2],[3]],"atom":{"kind":"two-point","a":1.5}}"#;
        assert!(serde_json::from_str::<VectorModel>(bad).is_err());
    }

    fn arb_model() -> impl Strategy<Value = VectorModel> {
        let rows = prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 2), 1..5);
        (rows, prop::bool::ANY, 0.05..2.0f64, prop::bool::ANY).prop_map(|(rows, uniform, t, smooth)| {
            let atom =
                if uniform { AtomLaw::UniformInterval { lo: -1.0, hi: 3.0 } } else { AtomLaw::TwoPoint { a: 1.5 } };
            let base = VectorModel::weighted_sum(Matrix::from_rows(rows).unwrap(), atom);
            if smooth {
                VectorModel::smoothed(base, t)
            } else {
                base
            }
        })
    }

    proptest! {
        #[test]
        fn charfun_modulus_at_most_one(m in arb_model(), x in -20.0..20.0f64, y in -20.0..20.0f64) {
            prop_assert!(charfun(&m, &[x, y]).unwrap().norm() <= 1.0 + 1e-12);
            prop_assert!((charfun(&m, &[0.0, 0.0]).unwrap() - 1.0).norm() < 1e-12);
        }

        #[test]
        fn symmetric_weighted_sums_real_and_even(rows in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 3), 1..6),
                                                 xi in prop::collection::vec(-5.0..5.0f64, 3)) {
            let m = VectorModel::weighted_sum(Matrix::from_rows(rows).unwrap(), AtomLaw::UniformInterval { lo: -2.0, hi: 2.0 });
            let v = charfun(&m, &xi).unwrap();
            let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
            prop_assert!(v.im.abs() < 1e-12);
            prop_assert!((charfun(&m, &neg).unwrap() - v).norm() < 1e-12);
        }

        #[test]
        fn smoothing_identity(m in arb_model(), t in 0.01..3.0f64, x in -5.0..5.0f64, y in -5.0..5.0f64) {
            let s = VectorModel::smoothed(m.clone(), t);
            let lhs = charfun(&s, &[x, y]).unwrap();
            let rhs = charfun(&m, &[x, y]).unwrap() * (-0.5 * t * t * (x * x + y * y)).exp();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1e-300));
        }
    }
}
