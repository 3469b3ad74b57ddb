//! Explicit conjugator witnesses: an orthogonal (real skew case) or
//! special-unitary (skew-Hermitian case) matrix A with A X A^{-1} = X'.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    c, charpoly_real_parts, max_abs, skew_canonical_basis, skew_hermitian_diagonalizer, CMat, RMat,
};

/// A conjugation witness together with its honest residual.
#[derive(Debug, Clone)]
pub struct ConjugacyWitness {
    /// Orthogonal or special-unitary matrix (real matrices are carried with
    /// zero imaginary part).
    pub a: CMat,
    /// || A X A^-1 - X' || (max entry).
    pub residual: f64,
    /// Orthogonality / unitarity residual of A.
    pub unitary_residual: f64,
    pub real_case: bool,
}

const CHARPOLY_MATCH_TOL: f64 = 1e-8;

fn charpoly_gap(x: &CMat, xp: &CMat) -> f64 {
    let (a, _) = charpoly_real_parts(x);
    let (b, _) = charpoly_real_parts(xp);
    a.iter()
        .zip(b.iter())
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

/// Builds a witness by matching canonical forms. Real case: 2x2 rotation
/// blocks ordered by rotation speed descending, kernel last. Complex case:
/// unitary diagonalization with eigenvalues sorted by imaginary part and the
/// determinant corrected to 1 by a global phase. Degenerate eigenvalue
/// clusters still produce a witness; the residual reports the quality.
pub fn conjugator_witness(x: &CMat, xp: &CMat) -> Result<ConjugacyWitness> {
    if x.nrows() != xp.nrows() {
        return Err(Error::Config("witness inputs must have equal size".into()));
    }
    let gap = charpoly_gap(x, xp);
    if gap > CHARPOLY_MATCH_TOL {
        return Err(Error::NotConjugate {
            coeff_residual: gap,
        });
    }
    let real_input = x.iter().chain(xp.iter()).all(|z| z.im == 0.0);
    if real_input {
        let n = x.nrows();
        let xr = RMat::from_fn(n, n, |r, cl| x[(r, cl)].re);
        let xpr = RMat::from_fn(n, n, |r, cl| xp[(r, cl)].re);
        let q1 = skew_canonical_basis(&xr)?;
        let q2 = skew_canonical_basis(&xpr)?;
        let a = &q2 * q1.transpose();
        let residual = (&a * &xr * a.transpose() - &xpr).amax();
        let unitary_residual = (&a * a.transpose() - RMat::identity(n, n)).amax();
        Ok(ConjugacyWitness {
            a: CMat::from_fn(n, n, |r, cl| c(a[(r, cl)])),
            residual,
            unitary_residual,
            real_case: true,
        })
    } else {
        let n = x.nrows();
        let u1 = skew_hermitian_diagonalizer(x)?;
        let u2 = skew_hermitian_diagonalizer(xp)?;
        let mut a = &u2 * u1.adjoint();
        // det correction by a global phase leaves the conjugation unchanged
        let det = a.determinant();
        let theta = -det.arg() / n as f64;
        let phase = Complex::new(theta.cos(), theta.sin());
        a *= phase;
        let residual = max_abs(&(&a * x * a.adjoint() - xp));
        let unitary_residual = max_abs(&(&a * a.adjoint() - CMat::identity(n, n)));
        Ok(ConjugacyWitness {
            a,
            residual,
            unitary_residual,
            real_case: false,
        })
    }
}
