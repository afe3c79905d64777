//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: relative asymmetry {asymmetry:.3e}")]
    NotHermitian { asymmetry: f64 },
    #[error("Jacobi sweeps did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    ConvergenceFailure { sweeps: usize, off_norm: f64 },
}

/// Settings for [`eigensolve_hermitian_with`].
#[derive(Debug, Clone, Copy)]
pub struct JacobiSettings {
    /// Converged once the off-diagonal Frobenius norm drops below `tolerance * ||M||_F`.
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Admissible relative deviation from Hermiticity of the input.
    pub hermitian_tolerance: f64,
}

impl Default for JacobiSettings {
    fn default() -> Self {
        Self { tolerance: 1e-12, max_sweeps: 100, hermitian_tolerance: 1e-9 }
    }
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> nalgebra::DVector<Complex64> {
        self.vectors.column(k).into_owned()
    }
}

pub fn eigensolve_hermitian(m: &DMatrix<Complex64>) -> Result<Eigen, EigenError> {
    eigensolve_hermitian_with(m, JacobiSettings::default())
}

/// Convenience wrapper for real symmetric input.
pub fn eigensolve_symmetric(m: &DMatrix<f64>) -> Result<Eigen, EigenError> {
    eigensolve_hermitian(&m.map(|x| Complex64::new(x, 0.0)))
}

pub fn eigensolve_hermitian_with(
    m: &DMatrix<Complex64>,
    settings: JacobiSettings,
) -> Result<Eigen, EigenError> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(EigenError::NotSquare { rows: n, cols: m.ncols() });
    }
    let scale = m.norm();
    if n == 0 {
        return Ok(Eigen { values: Vec::new(), vectors: DMatrix::zeros(0, 0) });
    }
    let asym = (m - m.adjoint()).norm();
    if scale > 0.0 && asym > settings.hermitian_tolerance * scale {
        return Err(EigenError::NotHermitian { asymmetry: asym / scale });
    }

    // Symmetrize so rounding in the input cannot leak into the rotations.
    let mut a = (m + m.adjoint()).scale(0.5);
    let mut v = DMatrix::<Complex64>::identity(n, n);
    let threshold = settings.tolerance * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold || scale == 0.0 {
            break;
        }
        if sweeps == settings.max_sweeps {
            return Err(EigenError::ConvergenceFailure { sweeps, off_norm: off / scale });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

fn off_diagonal_norm(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[(p, q)]` with the unitary `U = diag(1, e^{-i phi}) * R(c, s)`
/// acting on the `(p, q)` plane, and accumulates `U` into `v`.
fn rotate(a: &mut DMatrix<Complex64>, v: &mut DMatrix<Complex64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that would be lost in rounding against the diagonal.
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r; // e^{i phi}
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    let n = a.nrows();
    // A <- A U
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    // A <- U^dagger A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V <- V U
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        (&g + g.adjoint()).scale(0.5)
    }

    #[test]
    fn pauli_x() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let e = eigensolve_hermitian(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0), c(-2.0), c(0.5)]));
        let e = eigensolve_hermitian(&m).unwrap();
        assert_eq!(e.values, vec![-2.0, 0.5, 3.0]);
    }

    #[test]
    fn random_50_reconstructs() {
        let m = random_hermitian(50, 11);
        let e = eigensolve_hermitian(&m).unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            50,
            e.values.iter().map(|&x| c(x)),
        ));
        let rec = &e.vectors * d * e.vectors.adjoint();
        assert!((&rec - &m).norm() <= 1e-8 * m.norm());
        let unit = e.vectors.adjoint() * &e.vectors;
        assert!((unit - DMatrix::<Complex64>::identity(50, 50)).norm() < 1e-9);
        for k in 0..50 {
            let vk = e.vector(k);
            let res = (&m * &vk - vk.scale(e.values[k])).norm();
            assert!(res <= 1e-9 * m.norm(), "pair {k}: residual {res}");
        }
    }

    #[test]
    fn agrees_with_nalgebra_on_real_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = DMatrix::<f64>::from_fn(20, 20, |_, _| rng.gen_range(-1.0..1.0));
        let m = &g + g.transpose();
        let ours = eigensolve_symmetric(&m).unwrap();
        let mut theirs: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (a, b) in ours.values.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(2.0), c(0.0)]);
        assert!(matches!(eigensolve_hermitian(&m), Err(EigenError::NotHermitian { .. })));
    }

    #[test]
    fn sweep_cap_reports_failure() {
        let m = random_hermitian(12, 3);
        let settings = JacobiSettings { max_sweeps: 1, ..Default::default() };
        assert!(matches!(
            eigensolve_hermitian_with(&m, settings),
            Err(EigenError::ConvergenceFailure { sweeps: 1, .. })
        ));
    }
}
