//! Shipped test fixtures.

use smallball::models::{AtomLaw, Matrix, VectorModel};

/// Rotation angles of the stacked fixture.
pub const LO_ANGLES: [f64; 3] = [0.0, 0.7, 1.9];
/// Common scale of the stacked rotations; all singular values equal
/// `LO_SCALE·√3 ≈ 1.039`.
pub const LO_SCALE: f64 = 0.6;

/// `N × 2` matrix stacking `scale·R(φ)` for each angle. Every singular value
/// equals `scale·√(angles.len())`, since `Σ RᵀR = k·I`.
pub fn rotation_stack(scale: f64, angles: &[f64]) -> Matrix {
    let rows = angles
        .iter()
        .flat_map(|&phi| {
            let (s, c) = phi.sin_cos();
            [vec![scale * c, -scale * s], vec![scale * s, scale * c]]
        })
        .collect();
    Matrix::from_rows(rows).expect("well-formed rotation stack")
}

/// The 6 × 2 Littlewood–Offord fixture.
pub fn lo_matrix() -> Matrix {
    rotation_stack(LO_SCALE, &LO_ANGLES)
}

/// Weighted sum of the fixture rows with ±3/2 atoms (spread b = 1/2).
pub fn lo_model() -> VectorModel {
    VectorModel::weighted_sum(lo_matrix(), AtomLaw::TwoPoint { a: 1.5 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_singular_values() {
        let sv = lo_matrix().singular_values();
        assert_eq!(sv.len(), 2);
        for s in sv {
            assert!((s - LO_SCALE * 3f64.sqrt()).abs() < 1e-12);
            assert!(s >= 1.0);
        }
        assert_eq!(lo_matrix().nrows(), 6);
    }
}
