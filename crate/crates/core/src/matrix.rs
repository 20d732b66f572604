//! Dense complex matrices and the small amount of linear algebra the
//! averaging code needs.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn zeros(dim: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(dim, dim)
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.norm()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `U† X U`.
pub fn conjugate(x: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    u.adjoint() * x * u
}

pub fn is_unitary(u: &ComplexMatrix, eps: f64) -> bool {
    u.is_square() && frobenius(&(u.adjoint() * u - identity(u.nrows()))) <= eps * u.nrows() as f64
}

pub fn is_hermitian(h: &ComplexMatrix, eps: f64) -> bool {
    h.is_square() && frobenius(&(h - h.adjoint())) <= eps * h.nrows() as f64
}

pub fn is_traceless(x: &ComplexMatrix, eps: f64) -> bool {
    x.is_square() && x.trace().norm() <= eps * x.nrows() as f64
}

/// Eigenvalues and eigenvector columns of a Hermitian matrix.
pub fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// `W diag(f(λ)) W†` for a spectral decomposition `(λ, W)`.
pub fn spectral_apply(values: &[f64], vectors: &ComplexMatrix, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        let fv = f(v);
        for x in scaled.column_mut(j).iter_mut() {
            *x *= fv;
        }
    }
    scaled * vectors.adjoint()
}

/// `exp(−i h t)` for Hermitian `h`.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let (values, vectors) = hermitian_eigen(h);
    spectral_apply(&values, &vectors, |l| Complex64::from_polar(1.0, -l * t))
}

/// Eigen-angles θ ∈ (−π, π] and eigenvectors of a unitary matrix.
///
/// The commuting Hermitian parts `(U + U†)/2` and `(U − U†)/2i` are
/// diagonalized jointly through a generic real combination; a combination
/// that merges distinct eigenvalues is detected by the residual and another
/// one is tried.
pub fn unitary_eigen(u: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    const MIXES: [f64; 4] = [0.618_033_988_749_894_9, 1.324_717_957_244_746, 0.271_828_182_845_904_5, 2.414_213_562_373_095];
    let dim = u.nrows();
    let dev = frobenius(&(u.adjoint() * u - identity(dim)));
    if !u.is_square() || dev > 1e-9 * dim as f64 {
        return Err(Error::NotUnitary(dev));
    }
    let re = (u + u.adjoint()).scale(0.5);
    let im = (u - u.adjoint()) * c64(0.0, -0.5);
    for mix in MIXES {
        let (_, w) = hermitian_eigen(&(&re + &im * c64(mix, 0.0)));
        let diag: Vec<Complex64> = (0..dim).map(|j| (w.column(j).adjoint() * u * w.column(j))[(0, 0)]).collect();
        let mut resid = u * &w;
        for (j, &z) in diag.iter().enumerate() {
            let target = w.column(j) * z;
            resid.column_mut(j).axpy(c64(-1.0, 0.0), &target, c64(1.0, 0.0));
        }
        if frobenius(&resid) <= 1e-10 * dim as f64 {
            let angles = diag
                .iter()
                .map(|z| {
                    let theta = z.arg();
                    // keep −1 on the +π side of the branch cut
                    if theta <= -std::f64::consts::PI + 1e-9 {
                        theta + 2.0 * std::f64::consts::PI
                    } else {
                        theta
                    }
                })
                .collect();
            return Ok((angles, w));
        }
    }
    Err(Error::Verification("joint diagonalization of unitary did not converge".into()))
}

/// `‖U − e^{iφ} V‖_F` minimized over the global phase φ.
pub fn distance_mod_phase(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    let overlap = (v.adjoint() * u).trace();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c64(1.0, 0.0) };
    frobenius(&(u - v * phase))
}

/// Phase-insensitive fidelity `|tr(U†V)| / dim`.
pub fn overlap_mod_phase(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    (u.adjoint() * v).trace().norm() / u.nrows() as f64
}

/// Random Hermitian matrix with unit Frobenius norm, optionally traceless.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, traceless: bool) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let mut h = (&g + g.adjoint()).scale(0.5);
    if traceless {
        let shift = h.trace() / dim as f64;
        for i in 0..dim {
            h[(i, i)] -= shift;
        }
    }
    let norm = frobenius(&h);
    h.unscale(norm)
}

/// Random complex matrix with standard normal entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Row-major nested `[re, im]` pairs.
pub fn to_pairs(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let n = rows.len();
    for r in rows {
        if r.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: r.len() });
        }
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| c64(rows[i][j][0], rows[i][j][1])))
}

/// Serde adapter storing a square matrix as nested `[re, im]` rows.
pub mod serde_pairs {
    use super::*;

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_pairs(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ComplexMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_pairs(&rows).map_err(serde::de::Error::custom)
    }
}
