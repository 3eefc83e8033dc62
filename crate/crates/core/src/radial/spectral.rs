use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::laplacian::Laplacian;
use crate::error::SpectralError;

/// Largest tolerated weighted asymmetry of the operator handed to
/// [`eigendecompose`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Full eigendecomposition of the discrete radial Laplacian.
///
/// Eigenvectors are stored in symmetrized coordinates (`√w ⊙ e_k`), where
/// they form an ordinary orthonormal basis. Eigenvalues are sorted
/// descending, so index 0 is the ground mode, and each vector is signed so
/// that its first non-negligible component is positive.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub eigenvalues: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub sqrt_weights: Vec<f64>,
}

pub fn eigendecompose(lap: &Laplacian) -> Result<SpectralBasis, SpectralError> {
    let asym = lap.asymmetry();
    if !(asym <= SYMMETRY_TOLERANCE) {
        return Err(SpectralError::NotSelfAdjoint(asym));
    }
    let m = lap.len();
    let (d, e) = lap.symmetrized();
    let mut s = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        s[(j, j)] = d[j];
        if j + 1 < m {
            s[(j, j + 1)] = e[j];
            s[(j + 1, j)] = e[j];
        }
    }
    let eig = SymmetricEigen::try_new(s, f64::EPSILON, 0)
        .ok_or_else(|| SpectralError::Decomposition("QR iteration did not converge".into()))?;

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut vectors = DMatrix::<f64>::zeros(m, m);
    let mut eigenvalues = Vec::with_capacity(m);
    for (k, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let peak = col.amax();
        let sign = col
            .iter()
            .find(|x| x.abs() > 1e-10 * peak)
            .map_or(1.0, |x| x.signum());
        vectors.column_mut(k).copy_from(&(col * sign));
        eigenvalues.push(eig.eigenvalues[src]);
    }
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(SpectralError::Decomposition("non-finite eigenvalue".into()));
    }
    let sqrt_weights = lap.weights.iter().map(|w| w.sqrt()).collect();
    Ok(SpectralBasis { eigenvalues, vectors, sqrt_weights })
}

impl SpectralBasis {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `max_k |λ_k|`.
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    /// Eigenfunction `e_k` on the nodes, unit norm in the weighted product.
    pub fn eigenfunction(&self, k: usize) -> Vec<f64> {
        self.vectors
            .column(k)
            .iter()
            .zip(&self.sqrt_weights)
            .map(|(v, s)| v / s)
            .collect()
    }

    fn to_sym(&self, u: &[Complex64]) -> DMatrix<f64> {
        let m = self.len();
        assert_eq!(u.len(), m, "field length does not match basis");
        DMatrix::from_fn(m, 2, |j, c| {
            let z = u[j] * self.sqrt_weights[j];
            if c == 0 {
                z.re
            } else {
                z.im
            }
        })
    }

    fn from_sym(&self, y: &DMatrix<f64>) -> Vec<Complex64> {
        (0..self.len())
            .map(|j| Complex64::new(y[(j, 0)], y[(j, 1)]) / self.sqrt_weights[j])
            .collect()
    }

    /// Coefficients `c_k = ⟨u, e_k⟩`.
    pub fn coefficients(&self, u: &[Complex64]) -> Vec<Complex64> {
        let c = self.vectors.tr_mul(&self.to_sym(u));
        (0..self.len()).map(|k| Complex64::new(c[(k, 0)], c[(k, 1)])).collect()
    }

    /// `Σ_k c_k e_k`.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let m = self.len();
        assert_eq!(coeffs.len(), m, "coefficient count does not match basis");
        let c = DMatrix::from_fn(m, 2, |k, col| if col == 0 { coeffs[k].re } else { coeffs[k].im });
        self.from_sym(&(&self.vectors * c))
    }

    /// `f(L) u` for the diagonal symbol `mult[k] = f(λ_k)`.
    pub fn apply_diagonal(&self, u: &[Complex64], mult: &[Complex64]) -> Vec<Complex64> {
        let mut c = self.vectors.tr_mul(&self.to_sym(u));
        for (k, m) in mult.iter().enumerate() {
            let (re, im) = (c[(k, 0)], c[(k, 1)]);
            c[(k, 0)] = m.re * re - m.im * im;
            c[(k, 1)] = m.re * im + m.im * re;
        }
        self.from_sym(&(&self.vectors * c))
    }

    /// Real-symbol variant of [`apply_diagonal`](Self::apply_diagonal).
    pub fn apply_real_symbol(&self, u: &[Complex64], mult: &[f64]) -> Vec<Complex64> {
        let mut c = self.vectors.tr_mul(&self.to_sym(u));
        for (k, m) in mult.iter().enumerate() {
            c[(k, 0)] *= m;
            c[(k, 1)] *= m;
        }
        self.from_sym(&(&self.vectors * c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{build_grid, build_laplacian};

    #[test]
    fn spectrum_is_nonpositive_and_sorted() {
        let g = build_grid(5.0, 128, 5).unwrap();
        let basis = eigendecompose(&build_laplacian(&g)).unwrap();
        assert!(basis.eigenvalues.iter().all(|&l| l < 0.0));
        assert!(basis.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eigenpairs_satisfy_operator() {
        let g = build_grid(5.0, 64, 5).unwrap();
        let lap = build_laplacian(&g);
        let basis = eigendecompose(&lap).unwrap();
        for k in [0, 10, 63] {
            let e = basis.eigenfunction(k);
            let le = lap.apply_real(&e);
            let lam = basis.eigenvalues[k];
            let err = le.iter().zip(&e).map(|(a, b)| (a - lam * b).abs()).fold(0.0, f64::max);
            let scale = e.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(err <= 1e-8 * lam.abs() * scale, "k={k} err={err}");
        }
    }

    #[test]
    fn asymmetric_operator_rejected() {
        let g = build_grid(5.0, 16, 5).unwrap();
        let mut lap = build_laplacian(&g);
        lap.upper[3] *= 2.0;
        assert!(matches!(eigendecompose(&lap), Err(SpectralError::NotSelfAdjoint(_))));
    }
}
