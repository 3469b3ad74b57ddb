//! Full curvature of a left-invariant metric from the Koszul formula on an
//! orthonormal frame, and the heat-trace coefficients built from it.

use super::LeftInvariantMetric;
use crate::linalg::{RMat, RVec};

/// Curvature data on the orthonormal frame.
#[derive(Debug, Clone)]
pub struct CurvatureTensors {
    /// Ricci form Ric(Et_i, Et_k).
    pub ricci: RMat,
    pub scal: f64,
    pub ric_norm_sq: f64,
    pub riem_norm_sq: f64,
    /// Sectional numerators <R(Et_i, Et_j) Et_j, Et_i> for i < j.
    pub sectional: Vec<f64>,
}

/// Heat-trace report of a metric. The space is homogeneous, so every
/// curvature integrand is a constant times the volume.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub scal: f64,
    pub ric_norm_sq: f64,
    pub riem_norm_sq: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2_0: f64,
    pub a2_1: f64,
}

/// Levi-Civita connection and curvature of the frame Et_i = E_i - lambda(E_i)
/// via the Koszul formula for left-invariant fields:
/// 2 <nabla_X Y, Z> = <[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>.
pub fn koszul_connection_and_curvature(metric: &LeftInvariantMetric) -> CurvatureTensors {
    let alg = metric.algebra();
    let d = alg.dim();
    let g = metric.gram();
    let frame = metric.frame();

    // frame structure constants ct[i][j][k] = <[F_i, F_j], F_k>_lambda
    let gf = &g * &frame;
    let mut brackets = vec![vec![RVec::zeros(d); d]; d];
    for i in 0..d {
        let fi = RVec::from(frame.column(i));
        for j in 0..d {
            let fj = RVec::from(frame.column(j));
            brackets[i][j] = alg.bracket(&fi, &fj);
        }
    }
    let mut ct = vec![0.0; d * d * d];
    let idx = |i: usize, j: usize, k: usize| (i * d + j) * d + k;
    for i in 0..d {
        for j in 0..d {
            let w = brackets[i][j].transpose() * &gf;
            for k in 0..d {
                ct[idx(i, j, k)] = w[(0, k)];
            }
        }
    }

    // Gamma[i][j][k] = <nabla_{F_i} F_j, F_k>
    let mut gamma = vec![0.0; d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                gamma[idx(i, j, k)] =
                    0.5 * (ct[idx(i, j, k)] - ct[idx(j, k, i)] + ct[idx(k, i, j)]);
            }
        }
    }

    // R(F_i,F_j)F_k = nabla_i nabla_j F_k - nabla_j nabla_i F_k - nabla_{[F_i,F_j]} F_k
    // components R[i][j][k][l] on the orthonormal frame
    let mut ricci = RMat::zeros(d, d);
    let mut riem2 = 0.0;
    let mut sectional = Vec::with_capacity(d * (d - 1) / 2);
    let mut r_ijk = vec![0.0; d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut v = 0.0;
                    for m in 0..d {
                        v += gamma[idx(j, k, m)] * gamma[idx(i, m, l)]
                            - gamma[idx(i, k, m)] * gamma[idx(j, m, l)]
                            - ct[idx(i, j, m)] * gamma[idx(m, k, l)];
                    }
                    r_ijk[l] = v;
                    riem2 += v * v;
                }
                // Ric(F_a, F_b) = sum_j <R(F_j, F_a) F_b, F_j>
                ricci[(j, k)] += r_ijk[i];
                if j > i && k == j {
                    sectional.push(r_ijk[i]);
                }
            }
        }
    }
    let scal = ricci.trace();
    let ric_norm_sq = ricci.iter().map(|x| x * x).sum();
    CurvatureTensors {
        ricci,
        scal,
        ric_norm_sq,
        riem_norm_sq: riem2,
        sectional,
    }
}

/// Heat invariants per unit volume: a0 = vol, a1 = vol scal / 6,
/// a2_0 = vol (5 scal^2 - 2 |Ric|^2 + 2 |R|^2) / 360,
/// a2_1 = a2_0 d - vol (2 scal^2 - 6 |Ric|^2 + |R|^2) / 12.
pub fn heat_invariants(metric: &LeftInvariantMetric) -> CurvatureReport {
    let t = koszul_connection_and_curvature(metric);
    let vol = metric.volume_normalization;
    let d = metric.algebra().dim() as f64;
    let a0 = vol;
    let a1 = vol * t.scal / 6.0;
    let a2_0 = vol * (5.0 * t.scal * t.scal - 2.0 * t.ric_norm_sq + 2.0 * t.riem_norm_sq) / 360.0;
    let a2_1 =
        a2_0 * d - vol * (2.0 * t.scal * t.scal - 6.0 * t.ric_norm_sq + t.riem_norm_sq) / 12.0;
    CurvatureReport {
        scal: t.scal,
        ric_norm_sq: t.ric_norm_sq,
        riem_norm_sq: t.riem_norm_sq,
        a0,
        a1,
        a2_0,
        a2_1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{metric_from_lambda, ricci, LambdaMap};
    use crate::lie::{MatrixFamily, MatrixLieAlgebra, TorusSubalgebra};
    use crate::linalg::CMat;
    use crate::maps::JMap;
    use std::sync::Arc;

    fn biinvariant_metric(fam: MatrixFamily, n: usize, r: usize) -> LeftInvariantMetric {
        let alg = Arc::new(MatrixLieAlgebra::from_summands(&[fam], r, 1.0).unwrap());
        let torus = TorusSubalgebra::central(alg.clone()).unwrap();
        let size = alg.matrix_size();
        let zero: Vec<CMat> = (0..r).map(|_| CMat::zeros(size, size)).collect();
        let j = JMap::new(alg, torus, zero).unwrap();
        metric_from_lambda(LambdaMap::from_jmap(&j).unwrap()).unwrap()
    }

    #[test]
    fn biinvariant_sectional_is_nonnegative() {
        let m = biinvariant_metric(MatrixFamily::SoN(5), 5, 2);
        let t = koszul_connection_and_curvature(&m);
        assert!(t.sectional.iter().all(|&k| k > -1e-12));
    }

    #[test]
    fn biinvariant_ricci_matches_killing_quarter() {
        // Ric = k(m)/4 on the matrix summand, zero on the abelian part
        let m = biinvariant_metric(MatrixFamily::SuN(3), 3, 2);
        let t = koszul_connection_and_curvature(&m);
        for i in 0..8 {
            assert!((t.ricci[(i, i)] - 1.5).abs() < 1e-10, "{}", t.ricci[(i, i)]);
        }
        for i in 8..10 {
            assert!(t.ricci[(i, i)].abs() < 1e-12);
        }
    }

    #[test]
    fn koszul_agrees_with_algebraic_ricci() {
        let j = crate::maps::family_so5(0.1).unwrap();
        let m = metric_from_lambda(LambdaMap::from_jmap(&j).unwrap()).unwrap();
        let t = koszul_connection_and_curvature(&m);
        let alg_ric = ricci(&m);
        assert!((&t.ricci - &alg_ric).amax() < 1e-8);
    }

    #[test]
    fn flat_abelian_heat_invariants_vanish() {
        // purely abelian layouts have no matrix summand; emulate with the
        // smallest matrix block carrying the zero bracket is not possible, so
        // check the abelian rows of a product layout instead: the sectional
        // curvatures involving only abelian directions vanish.
        let m = biinvariant_metric(MatrixFamily::SoN(3), 3, 3);
        let t = koszul_connection_and_curvature(&m);
        // directions 3,4,5 are abelian: Ric rows vanish
        for i in 3..6 {
            for k in 0..6 {
                assert!(t.ricci[(i, k)].abs() < 1e-12);
            }
        }
    }
}
