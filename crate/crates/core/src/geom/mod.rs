//! Left-invariant metrics g_lambda = (Id + lambda)^* g_0, their Ricci and
//! full curvature tensors, the norm-difference identity for isospectral
//! pairs, trace identities for tr(ad^2 ad^2), heat invariants, and the
//! conformal doubled-group construction.

mod conformal;
mod curvature;

pub use conformal::{
    conformal_scal_profile, random_special_orthogonal, ConformalProfile, MaxLocalization,
};
pub use curvature::{
    heat_invariants, koszul_connection_and_curvature, CurvatureReport, CurvatureTensors,
};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lie::{centralizer_split, MatrixFamily, MatrixLieAlgebra, TorusSubalgebra};
use crate::linalg::{CMat, RMat, RVec};
use crate::maps::{charpoly_coeffs, conjugator_witness, JMap};

/// lambda: g -> h stored as the d x r coefficient matrix L with
/// L[i][s] = <E_i, j_{Z_s}>; column s holds the coordinates of j_{Z_s}.
#[derive(Debug, Clone)]
pub struct LambdaMap {
    algebra: Arc<MatrixLieAlgebra>,
    torus: TorusSubalgebra,
    matrix: RMat,
}

impl LambdaMap {
    /// Transpose of a JMap with respect to g_0.
    pub fn from_jmap(j: &JMap) -> Result<Self> {
        let algebra = j.algebra().clone();
        let torus = j.torus().clone();
        let d = algebra.dim();
        let r = torus.rank();
        let mut matrix = RMat::zeros(d, r);
        for s in 0..r {
            matrix.set_column(s, j.image_coords(s));
        }
        let lm = LambdaMap {
            algebra,
            torus,
            matrix,
        };
        let res = lm.invariant_residual()?;
        if res > 1e-10 {
            return Err(Error::Domain(format!(
                "lambda does not vanish on h + u (residual {res:.3e})"
            )));
        }
        Ok(lm)
    }

    pub fn algebra(&self) -> &Arc<MatrixLieAlgebra> {
        &self.algebra
    }

    pub fn torus(&self) -> &TorusSubalgebra {
        &self.torus
    }

    pub fn rank(&self) -> usize {
        self.matrix.ncols()
    }

    /// Coordinates of j_{Z_s} (column s).
    pub fn j_coords(&self, s: usize) -> RVec {
        RVec::from(self.matrix.column(s))
    }

    /// j_Z for an arbitrary Z in h-coordinates.
    pub fn j_at(&self, z: &[f64]) -> RVec {
        let mut out = RVec::zeros(self.algebra.dim());
        for s in 0..self.rank() {
            out += z[s] * self.j_coords(s);
        }
        out
    }

    /// Endomorphism matrix of lambda on g (image inside h).
    pub fn endo(&self) -> RMat {
        let d = self.algebra.dim();
        let mut out = RMat::zeros(d, d);
        for s in 0..self.rank() {
            let z = &self.torus.basis()[s];
            let col = self.j_coords(s);
            // lambda(X) = sum_s <X, j_s> Z_s
            out += RMat::from_fn(d, d, |r, cidx| z[r] * col[cidx]);
        }
        out
    }

    /// Largest violation of lambda|_{h+u} = 0, lambda^2 = 0, and the
    /// placement of the images in z(h) cap h^perp.
    pub fn invariant_residual(&self) -> Result<f64> {
        let split = centralizer_split(&self.algebra, &self.torus)?;
        let mut res: f64 = 0.0;
        for s in 0..self.rank() {
            let col = self.j_coords(s);
            res = res.max(split.residual_outside_zh(&col));
            for z in self.torus.basis() {
                res = res.max(self.algebra.inner(&col, z).abs());
            }
        }
        let e = self.endo();
        res = res.max((&e * &e).amax());
        Ok(res)
    }
}

/// A left-invariant metric given by the nilpotent deformation lambda: frame
/// Etilde_i = E_i - lambda(E_i) is orthonormal for (Id + lambda)^* g_0.
#[derive(Debug, Clone)]
pub struct LeftInvariantMetric {
    pub lambda: LambdaMap,
    /// Total volume constant carried through the heat invariants.
    pub volume_normalization: f64,
}

/// Builds the metric after validating the lambda invariants.
pub fn metric_from_lambda(lambda: LambdaMap) -> Result<LeftInvariantMetric> {
    let res = lambda.invariant_residual()?;
    if res > 1e-10 {
        return Err(Error::Domain(format!(
            "lambda invariants violated (residual {res:.3e})"
        )));
    }
    Ok(LeftInvariantMetric {
        lambda,
        volume_normalization: 1.0,
    })
}

impl LeftInvariantMetric {
    pub fn algebra(&self) -> &Arc<MatrixLieAlgebra> {
        &self.lambda.algebra
    }

    /// Gram matrix of the metric in the orthonormal g_0 basis:
    /// (I + L)^T (I + L) for the endomorphism L of lambda.
    pub fn gram(&self) -> RMat {
        let d = self.algebra().dim();
        let ipl = RMat::identity(d, d) + self.lambda.endo();
        ipl.transpose() * ipl
    }

    /// Frame coordinates as columns: Etilde_i = (I - L) e_i.
    pub fn frame(&self) -> RMat {
        let d = self.algebra().dim();
        RMat::identity(d, d) - self.lambda.endo()
    }

    /// Gram of the frame under the metric; identity up to roundoff.
    pub fn frame_gram(&self) -> RMat {
        let f = self.frame();
        f.transpose() * self.gram() * f
    }

    /// det(Id + lambda); equals 1 since lambda is 2-step nilpotent.
    pub fn det_id_plus_lambda(&self) -> f64 {
        let d = self.algebra().dim();
        (RMat::identity(d, d) + self.lambda.endo()).determinant()
    }
}

/// Ricci form on the frame by the algebraic identity
/// Ric(Et_i, Et_k) = <Ric0 (I+j) E_i, (I+j) E_k>
///                 + sum_s <ad_{Z_s} ad_{j_s} E_i, E_k>
///                 + 1/2 sum_s <ad_{j_s}^2 E_i, E_k>.
pub fn ricci(metric: &LeftInvariantMetric) -> RMat {
    let alg = metric.algebra();
    let d = alg.dim();
    let r0 = alg.ricci_biinvariant();
    let j = metric.lambda.endo().transpose();
    let ipj = RMat::identity(d, d) + j;
    let mut m = ipj.transpose() * r0 * ipj;
    for s in 0..metric.lambda.rank() {
        let adz = alg.ad(&metric.lambda.torus.basis()[s]);
        let adj = alg.ad(&metric.lambda.j_coords(s));
        m += adz * &adj + 0.5 * (&adj * &adj);
    }
    m
}

/// Right-hand side of the Ricci norm-difference identity:
/// 1/4 (sum_{i,k} tr(ad_{j_i}^2 ad_{j_k}^2) - the same for j').
pub fn ricci_norm_diff_rhs(lambda: &LambdaMap, lambda_p: &LambdaMap) -> f64 {
    let mut total = 0.0;
    for (lm, sign) in [(lambda, 1.0), (lambda_p, -1.0)] {
        let alg = &lm.algebra;
        for i in 0..lm.rank() {
            for k in 0..lm.rank() {
                let a = alg.ad(&lm.j_coords(i));
                let b = alg.ad(&lm.j_coords(k));
                total += sign * (&a * &a * &b * b).trace();
            }
        }
    }
    0.25 * total
}

/// Closed form for tr(ad_X^2 ad_Y^2) in the defining-representation traces:
/// so(n): (n-6) tr(X^2 Y^2) - 2 tr(XYXY) + tr(X^2) tr(Y^2) + 2 (tr XY)^2;
/// su(n): 2n tr(X^2 Y^2) + 2 tr(X^2) tr(Y^2) + 4 (tr XY)^2.
pub fn ad_square_trace_identity(family: MatrixFamily, x: &CMat, y: &CMat) -> Result<f64> {
    let n = family.matrix_size();
    if x.nrows() != n || y.nrows() != n {
        return Err(Error::Config(format!(
            "ad_square_trace_identity: matrices of size {} do not match family n = {n}",
            x.nrows()
        )));
    }
    for m in [x, y] {
        let skew_herm = (m + m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let imag = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let tr = m.trace();
        let bad = match family {
            MatrixFamily::SoN(_) => skew_herm > 1e-10 || imag > 1e-12,
            MatrixFamily::SuN(_) => skew_herm > 1e-10 || tr.norm() > 1e-10,
        };
        if bad {
            return Err(Error::Config(format!(
                "ad_square_trace_identity: input is not an element of {family:?}"
            )));
        }
    }
    let x2y2 = (x * x * y * y).trace().re;
    let xyxy = (x * y * x * y).trace().re;
    let x2 = (x * x).trace().re;
    let y2 = (y * y).trace().re;
    let xy = (x * y).trace().re;
    Ok(match family {
        MatrixFamily::SoN(_) => (n as f64 - 6.0) * x2y2 - 2.0 * xyxy + x2 * y2 + 2.0 * xy * xy,
        MatrixFamily::SuN(_) => 2.0 * n as f64 * x2y2 + 2.0 * x2 * y2 + 4.0 * xy * xy,
    })
}

/// Outcome of the conjugacy-condition check for a pair of deformations.
#[derive(Debug, Clone)]
pub struct ConjugacyConditionReport {
    pub passes: bool,
    /// Largest charpoly-coefficient gap of j_Z vs j'_Z over the h-grid.
    pub max_charpoly_residual: f64,
    /// Largest conjugator-witness residual (None when the layout has no
    /// identified centralizer block and the check fell back to charpoly-only
    /// certification).
    pub max_witness_residual: Option<f64>,
    /// Largest commutation residual [j_Z, h].
    pub max_commutation_residual: f64,
    /// True when witnesses could not be constructed inside a centralizer
    /// block and the certificate is charpoly-only.
    pub charpoly_only: bool,
}

/// Checks the conjugacy condition for every Z on a coefficient grid in h:
/// charpoly equality of j_Z vs j'_Z, witness construction inside the leading
/// matrix block (which commutes with h in the supported layouts), and
/// commutation of the images with h.
pub fn verify_conjugacy_condition(
    lambda: &LambdaMap,
    lambda_p: &LambdaMap,
    grid: usize,
    tol: f64,
) -> Result<ConjugacyConditionReport> {
    let alg = &lambda.algebra;
    if !Arc::ptr_eq(alg, &lambda_p.algebra) && alg.dim() != lambda_p.algebra.dim() {
        return Err(Error::Config(
            "conjugacy check needs a shared algebra".into(),
        ));
    }
    let r = lambda.rank();
    let mut max_cp: f64 = 0.0;
    let mut max_wit: f64 = 0.0;
    let mut max_comm: f64 = 0.0;
    let mut witness_ok = true;
    for gi in 0..grid {
        for gj in 0..grid {
            let s = -1.0 + 2.0 * gi as f64 / (grid - 1) as f64;
            let u = if r > 1 {
                -1.0 + 2.0 * gj as f64 / (grid - 1) as f64
            } else {
                0.0
            };
            let z = if r > 1 { vec![s, u] } else { vec![s] };
            let jz = lambda.j_at(&z);
            let jzp = lambda_p.j_at(&z);
            let mz = alg.matrix_from_coords(&jz);
            let mzp = lambda_p.algebra.matrix_from_coords(&jzp);
            let ca = charpoly_coeffs(&mz);
            let cb = charpoly_coeffs(&mzp);
            for (x, y) in ca.iter().zip(cb.iter()) {
                max_cp = max_cp.max((x - y).abs());
            }
            for zb in lambda.torus.basis() {
                max_comm = max_comm.max(alg.bracket(&jz, zb).norm());
                max_comm = max_comm.max(alg.bracket(&jzp, zb).norm());
            }
            if max_cp <= tol {
                match conjugator_witness(&mz, &mzp) {
                    Ok(w) => max_wit = max_wit.max(w.residual),
                    Err(_) => witness_ok = false,
                }
            }
            if r == 1 {
                break;
            }
        }
    }
    Ok(ConjugacyConditionReport {
        passes: max_cp <= tol && max_comm <= tol.max(1e-9),
        max_charpoly_residual: max_cp,
        max_witness_residual: if witness_ok { Some(max_wit) } else { None },
        max_commutation_residual: max_comm,
        charpoly_only: !witness_ok,
    })
}

/// The doubled-algebra map on k + k + h: (X, Y) -> lambda(X) + lambda'(Y),
/// with h central in the product.
pub fn barred_lambda(lambda: &LambdaMap, lambda_p: &LambdaMap) -> Result<LambdaMap> {
    let alg = &lambda.algebra;
    let summands = alg.summands();
    if summands.len() != 1 || lambda_p.algebra.summands().len() != 1 {
        return Err(Error::Config(
            "barred_lambda expects single-summand factors".into(),
        ));
    }
    if summands[0].family != lambda_p.algebra.summands()[0].family
        || alg.abelian_dim() != lambda_p.algebra.abelian_dim()
        || (alg.scale() - lambda_p.algebra.scale()).abs() > 0.0
    {
        return Err(Error::Config(
            "barred_lambda factors must share (k, h)".into(),
        ));
    }
    let fam = summands[0].family;
    let r = alg.abelian_dim();
    let doubled = Arc::new(MatrixLieAlgebra::from_summands(
        &[fam, fam],
        r,
        alg.scale(),
    )?);
    let torus = TorusSubalgebra::central(doubled.clone())?;
    let dk = alg.matrix_dim();
    let n = alg.matrix_size();
    let images = (0..r)
        .map(|s| {
            // block placement: first copy takes j from lambda, second from lambda'
            let j_first = lambda.j_coords(s);
            let j_second = lambda_p.j_coords(s);
            let mut big = CMat::zeros(2 * n, 2 * n);
            big.view_mut((0, 0), (n, n))
                .copy_from(&alg.matrix_from_coords(&j_first));
            big.view_mut((n, n), (n, n))
                .copy_from(&lambda_p.algebra.matrix_from_coords(&j_second));
            let _ = dk;
            big
        })
        .collect::<Vec<_>>();
    let j = JMap::new(doubled, torus, images)?;
    LambdaMap::from_jmap(&j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{family_so5, JMap};

    fn so5_metric(t: f64) -> LeftInvariantMetric {
        let j = family_so5(t).unwrap();
        metric_from_lambda(LambdaMap::from_jmap(&j).unwrap()).unwrap()
    }

    #[test]
    fn zero_lambda_reproduces_g0() {
        let j = family_so5(0.0).unwrap();
        let zero: Vec<CMat> = (0..2).map(|_| CMat::zeros(5, 5)).collect();
        let jz = JMap::new(j.algebra().clone(), j.torus().clone(), zero).unwrap();
        let m = metric_from_lambda(LambdaMap::from_jmap(&jz).unwrap()).unwrap();
        assert_eq!(m.gram(), RMat::identity(12, 12));
        let ric = ricci(&m);
        let r0 = m.algebra().ricci_biinvariant();
        assert!((ric - r0).amax() < 1e-14);
    }

    #[test]
    fn frame_gram_is_identity_and_det_one() {
        for &t in &[0.0, 0.1, 0.3] {
            let m = so5_metric(t);
            let res = (m.frame_gram() - RMat::identity(12, 12)).amax();
            assert!(res < 1e-12, "frame gram residual {res}");
            assert!((m.det_id_plus_lambda() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ricci_is_symmetric() {
        let m = so5_metric(0.2);
        let ric = ricci(&m);
        assert!((&ric - ric.transpose()).amax() < 1e-10);
    }

    #[test]
    fn rhs_vanishes_for_equal_pair() {
        let lm = LambdaMap::from_jmap(&family_so5(0.1).unwrap()).unwrap();
        assert!(ricci_norm_diff_rhs(&lm, &lm).abs() < 1e-10);
    }

    #[test]
    fn ad_square_trace_identity_zero_inputs() {
        let z = CMat::zeros(5, 5);
        let v = ad_square_trace_identity(MatrixFamily::SoN(5), &z, &z).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn conjugacy_condition_accepts_identical_maps() {
        let lm = LambdaMap::from_jmap(&family_so5(0.1).unwrap()).unwrap();
        let rep = verify_conjugacy_condition(&lm, &lm, 5, 1e-9).unwrap();
        assert!(rep.passes);
        assert_eq!(rep.max_charpoly_residual, 0.0);
    }

    #[test]
    fn conjugacy_condition_rejects_scaled_map() {
        let j = family_so5(0.1).unwrap();
        let doubled: Vec<CMat> = (0..2)
            .map(|s| j.image(s) * nalgebra::Complex::new(2.0, 0.0))
            .collect();
        let j2 = JMap::new(j.algebra().clone(), j.torus().clone(), doubled).unwrap();
        let la = LambdaMap::from_jmap(&j).unwrap();
        let lb = LambdaMap::from_jmap(&j2).unwrap();
        let rep = verify_conjugacy_condition(&la, &lb, 5, 1e-9).unwrap();
        assert!(!rep.passes);
    }

    #[test]
    fn barred_lambda_of_zero_is_zero() {
        let j = family_so5(0.0).unwrap();
        let zero: Vec<CMat> = (0..2).map(|_| CMat::zeros(5, 5)).collect();
        let jz = JMap::new(j.algebra().clone(), j.torus().clone(), zero).unwrap();
        let lm = LambdaMap::from_jmap(&jz).unwrap();
        let bar = barred_lambda(&lm, &lm).unwrap();
        assert_eq!(bar.endo().amax(), 0.0);
        assert_eq!(bar.algebra().dim(), 22);
    }

    #[test]
    fn barred_lambda_restricts_to_first_factor() {
        let la = LambdaMap::from_jmap(&family_so5(0.0).unwrap()).unwrap();
        let lb = LambdaMap::from_jmap(&family_so5(0.1).unwrap()).unwrap();
        let bar = barred_lambda(&la, &lb).unwrap();
        // first 10 coordinates of the barred images match lambda's
        for s in 0..2 {
            let jb = bar.j_coords(s);
            let ja = la.j_coords(s);
            for i in 0..10 {
                assert!((jb[i] - ja[i]).abs() < 1e-12);
            }
        }
    }
}
