//! The ambient flat semi-Euclidean space and its bilinear form.
//!
//! The ambient is ℝⁿ with metric diag(ε₁, ..., εₙ), εᵢ = ±1. Everything
//! downstream assumes the Lorentz signature (-, +, ..., +) but the
//! helpers here work for any diagonal signature.

use nalgebra::{DMatrix, DVector};

/// Flat semi-Euclidean ℝⁿ with a diagonal ±1 metric.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientSpace {
    signature: Vec<f64>,
}

impl AmbientSpace {
    /// Signature (-, +, ..., +) in dimension `dim`.
    pub fn lorentzian(dim: usize) -> Self {
        assert!(dim >= 1);
        let mut signature = vec![1.0; dim];
        signature[0] = -1.0;
        AmbientSpace { signature }
    }

    /// Arbitrary diagonal signature; entries must be ±1.
    pub fn with_signature(signature: Vec<f64>) -> Self {
        assert!(
            signature.iter().all(|&e| e == 1.0 || e == -1.0),
            "signature entries must be +1 or -1"
        );
        AmbientSpace { signature }
    }

    pub fn dim(&self) -> usize {
        self.signature.len()
    }

    pub fn signature(&self) -> &[f64] {
        &self.signature
    }

    /// The metric pairing ⟨a, b⟩ = Σ εᵢ aᵢ bᵢ.
    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        assert_eq!(a.len(), self.dim());
        assert_eq!(b.len(), self.dim());
        self.signature
            .iter()
            .zip(a.iter().zip(b.iter()))
            .map(|(e, (x, y))| e * x * y)
            .sum()
    }

    /// Squared causal norm ⟨a, a⟩ (negative for timelike vectors).
    pub fn norm2(&self, a: &DVector<f64>) -> f64 {
        self.inner(a, a)
    }

    /// Gram matrix of a list of vectors under the ambient metric.
    pub fn gram(&self, vecs: &[DVector<f64>]) -> DMatrix<f64> {
        let n = vecs.len();
        DMatrix::from_fn(n, n, |i, j| self.inner(&vecs[i], &vecs[j]))
    }

    /// Apply the metric to a vector: `(g a)ᵢ = εᵢ aᵢ`. Useful for
    /// assembling adjoints.
    pub fn lower(&self, a: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.dim(), |i, _| self.signature[i] * a[i])
    }
}

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi
/// rotations. Returns the eigenvalues paired with the columns of the
/// rotation product, unsorted.
///
/// The matrices in this crate are tiny (at most ambient dimension), and
/// Jacobi keeps eigenvalues and eigenvectors consistently paired even
/// for nearly diagonal inputs with denormal off-diagonal entries, where
/// general tridiagonalization-based solvers can deflate incorrectly.
pub fn symmetric_eigen(mat: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = mat.nrows();
    assert_eq!(n, mat.ncols());
    let mut a = DMatrix::from_fn(n, n, |i, j| 0.5 * (mat[(i, j)] + mat[(j, i)]));
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.amax().max(f64::MIN_POSITIVE);
    for _sweep in 0..64 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip - s * aiq;
                    a[(i, q)] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[(p, i)];
                    let aqi = a[(q, i)];
                    a[(p, i)] = c * api - s * aqi;
                    a[(q, i)] = s * api + c * aqi;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }
    (DVector::from_fn(n, |i, _| a[(i, i)]), v)
}

/// Numerical rank and kernel of a symmetric Gram matrix.
///
/// Eigenvalues with `|λ| <= rel_tol * max|λ|` count as zero. Returns the
/// rank and an orthonormal (Euclidean) basis of the kernel, each basis
/// vector normalized so its first nontrivial coefficient is positive.
pub fn null_kernel(gram: &DMatrix<f64>, rel_tol: f64) -> (usize, Vec<DVector<f64>>) {
    let n = gram.nrows();
    assert_eq!(n, gram.ncols());
    if n == 0 {
        return (0, Vec::new());
    }
    let (eigenvalues, eigenvectors) = symmetric_eigen(gram);
    let scale = eigenvalues.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
    if scale == 0.0 {
        let basis = (0..n)
            .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        return (0, basis);
    }
    let cut = rel_tol * scale;
    let mut kernel = Vec::new();
    let mut rank = 0;
    for (k, &l) in eigenvalues.iter().enumerate() {
        if l.abs() <= cut {
            let mut v: DVector<f64> = eigenvectors.column(k).into_owned();
            let lead = v
                .iter()
                .find(|x| x.abs() > 1e-10)
                .copied()
                .unwrap_or(1.0);
            if lead < 0.0 {
                v.neg_mut();
            }
            kernel.push(v);
        } else {
            rank += 1;
        }
    }
    (rank, kernel)
}

/// Orthonormalize `vecs` against the ambient metric by modified
/// Gram-Schmidt, assuming every pivot is spacelike or timelike (the
/// caller guarantees the span contains no null directions). Returns the
/// orthonormal vectors paired with their causal signs ⟨e, e⟩ = ±1, or
/// `None` if a pivot degenerates below `tol` (relative to the running
/// Euclidean norm).
pub fn orthonormalize(
    space: &AmbientSpace,
    vecs: &[DVector<f64>],
    tol: f64,
) -> Option<Vec<(DVector<f64>, f64)>> {
    let mut out: Vec<(DVector<f64>, f64)> = Vec::with_capacity(vecs.len());
    for v in vecs {
        let mut w = v.clone();
        for (e, sign) in &out {
            let c = space.inner(&w, e) * sign;
            w -= e * c;
        }
        let q = space.norm2(&w);
        if q.abs() <= tol * (1.0 + w.norm_squared()) {
            return None;
        }
        let sign = q.signum();
        w /= q.abs().sqrt();
        out.push((w, sign));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(entries: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(entries)
    }

    #[test]
    fn lorentz_inner_products() {
        let sp = AmbientSpace::lorentzian(3);
        assert_eq!(sp.inner(&v(&[1.0, 0.0, 0.0]), &v(&[1.0, 0.0, 0.0])), -1.0);
        assert_eq!(sp.inner(&v(&[0.0, 2.0, 0.0]), &v(&[0.0, 3.0, 0.0])), 6.0);
        // a null vector
        assert_eq!(sp.norm2(&v(&[1.0, 1.0, 0.0])), 0.0);
    }

    #[test]
    fn kernel_of_degenerate_gram() {
        // Gram of {xi, w} with xi null and w unit spacelike, xi ⟂ w:
        // [[0, 0], [0, 1]] has a rank-1 kernel spanned by e1.
        let g = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let (rank, kernel) = null_kernel(&g, 1e-9);
        assert_eq!(rank, 1);
        assert_eq!(kernel.len(), 1);
        assert_relative_eq!(kernel[0][0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(kernel[0][1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn kernel_sign_convention() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let (rank, kernel) = null_kernel(&g, 1e-9);
        assert_eq!(rank, 1);
        // kernel spanned by (1, -1)/√2, leading coefficient positive
        assert!(kernel[0][0] > 0.0);
        assert_relative_eq!(kernel[0][0], 1.0 / 2f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn orthonormalize_mixed_signature() {
        let sp = AmbientSpace::lorentzian(3);
        let basis = orthonormalize(
            &sp,
            &[v(&[2.0, 1.0, 0.0]), v(&[1.0, 2.0, 1.0])],
            1e-12,
        )
        .unwrap();
        assert_eq!(basis.len(), 2);
        assert_relative_eq!(sp.norm2(&basis[0].0), basis[0].1, max_relative = 1e-12);
        assert_relative_eq!(sp.norm2(&basis[1].0), basis[1].1, max_relative = 1e-12);
        assert_relative_eq!(
            sp.inner(&basis[0].0, &basis[1].0),
            0.0,
            epsilon = 1e-12
        );
        // first pivot is timelike (2,1,0): ⟨·,·⟩ = -4+1 = -3
        assert_eq!(basis[0].1, -1.0);
    }

    #[test]
    fn orthonormalize_rejects_null_pivot() {
        let sp = AmbientSpace::lorentzian(3);
        assert!(orthonormalize(&sp, &[v(&[1.0, 1.0, 0.0])], 1e-12).is_none());
    }

    #[test]
    fn jacobi_eigen_reconstructs_input() {
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[
                2.0, -1.0, 0.5, 0.0, -1.0, 3.0, 0.0, 0.25, 0.5, 0.0, -2.0, 1.0, 0.0, 0.25,
                1.0, 0.5,
            ],
        );
        let (values, vectors) = symmetric_eigen(&a);
        let recon = &vectors * DMatrix::from_diagonal(&values) * vectors.transpose();
        assert!((recon - &a).amax() < 1e-12);
        let orth = vectors.transpose() * &vectors - DMatrix::<f64>::identity(4, 4);
        assert!(orth.amax() < 1e-12);
    }

    #[test]
    fn kernel_of_nearly_diagonal_gram_with_denormal_pivot() {
        // Regression case: a Gram matrix whose null direction sits on a
        // diagonal entry of order 1e-16 next to healthy entries. A
        // tridiagonalization-based solver mispaired eigenvectors here.
        let g = DMatrix::from_row_slice(
            3,
            3,
            &[
                3.053e-16, 0.0, 2.359e-16, 0.0, 3.593147288, 1.110e-16, 2.359e-16, 1.110e-16,
                0.540344846,
            ],
        );
        let (rank, kernel) = null_kernel(&g, 1e-9);
        assert_eq!(rank, 2);
        assert_eq!(kernel.len(), 1);
        assert!(kernel[0][0].abs() > 0.999, "kernel must align with e1");
        assert!(kernel[0][1].abs() < 1e-6);
        assert!(kernel[0][2].abs() < 1e-6);
    }
}
