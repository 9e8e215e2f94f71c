//! Dense 4×4 kernels shared by the block, resolvent and evolution code.

use nalgebra::{Matrix4, Schur, Vector4, SVD};
use num_complex::Complex64;

pub type CMatrix4 = Matrix4<Complex64>;
pub type CVector4 = Vector4<Complex64>;

pub(crate) fn complexify(m: &Matrix4<f64>) -> CMatrix4 {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Eigenvalues of a real 4×4 via the real Schur form. `None` if the QR
/// iteration does not converge.
pub(crate) fn real_eigenvalues(m: &Matrix4<f64>) -> Option<[Complex64; 4]> {
    let schur = Schur::try_new(*m, f64::EPSILON, 100_000)?;
    let ev = schur.complex_eigenvalues();
    Some([ev[0], ev[1], ev[2], ev[3]])
}

fn singular_values(m: &CMatrix4) -> [f64; 4] {
    let sv = m.singular_values();
    let mut s = [sv[0], sv[1], sv[2], sv[3]];
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub(crate) fn largest_singular_value(m: &CMatrix4) -> f64 {
    singular_values(m)[0]
}

pub(crate) fn smallest_singular_value(m: &CMatrix4) -> f64 {
    singular_values(m)[3]
}

/// 2-norm condition number; infinite for a numerically singular matrix.
pub(crate) fn condition_number(m: &CMatrix4) -> f64 {
    let s = singular_values(m);
    if s[3] == 0.0 {
        f64::INFINITY
    } else {
        s[0] / s[3]
    }
}

/// Unit right singular vector for the smallest singular value.
pub(crate) fn null_vector(m: &CMatrix4) -> CVector4 {
    let svd = SVD::new(*m, false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("four singular values");
    let row = v_t.row(imin);
    let v = CVector4::new(row[0].conj(), row[1].conj(), row[2].conj(), row[3].conj());
    v / Complex64::new(v.norm(), 0.0)
}

/// exp(A) by scaling and squaring of a truncated Taylor series. The
/// series is cut once the tail bound ‖A‖^{m+1}/(m+1)! / (1 − ‖A‖/(m+2))
/// on the scaled matrix drops below 1e-17, well under 1e-12 relative to
/// ‖exp(A/2^s)‖ ≥ e^{-1/2}.
pub fn expm_scaling_squaring(a: &Matrix4<f64>) -> Matrix4<f64> {
    let norm = a.abs().row_sum().max();
    if norm == 0.0 {
        return Matrix4::identity();
    }
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * 0.5f64.powi(squarings);
    let theta = norm * 0.5f64.powi(squarings);

    let mut result = Matrix4::identity();
    let mut term = Matrix4::identity();
    let mut bound = 1.0;
    for k in 1..60 {
        term = term * scaled / k as f64;
        result += term;
        bound *= theta / k as f64;
        let tail = bound * theta / (k + 1) as f64 / (1.0 - theta / (k + 2) as f64);
        if tail < 1e-17 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result * result;
    }
    result
}
