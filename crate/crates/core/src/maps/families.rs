//! The explicit built-in isospectral families and the embeddings that move
//! them into larger groups.

use std::sync::Arc;

use super::{is_isospectral_pair, JMap, DEFAULT_PAIR_TOL};
use crate::error::{Error, Result};
use crate::lie::{MatrixFamily, MatrixLieAlgebra, TorusSubalgebra};
use crate::linalg::{c, ci, CMat};

/// Named family kinds, matching the config-facing key strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    So5Explicit,
    Su3Explicit,
    So8Embedded,
    So9Embedded,
    Su6Embedded,
    FlowGenerated,
    Custom,
}

impl FamilyKind {
    pub fn key(&self) -> &'static str {
        match self {
            FamilyKind::So5Explicit => "so5",
            FamilyKind::Su3Explicit => "su3",
            FamilyKind::So8Embedded => "so8",
            FamilyKind::So9Embedded => "so9-embedded",
            FamilyKind::Su6Embedded => "su6-embedded",
            FamilyKind::FlowGenerated => "flow",
            FamilyKind::Custom => "custom",
        }
    }

    pub fn from_key(key: &str) -> Result<Self> {
        Ok(match key {
            "so5" => FamilyKind::So5Explicit,
            "su3" => FamilyKind::Su3Explicit,
            "so8" => FamilyKind::So8Embedded,
            "so9-embedded" => FamilyKind::So9Embedded,
            "su6-embedded" => FamilyKind::Su6Embedded,
            "flow" => FamilyKind::FlowGenerated,
            other => return Err(Error::Config(format!("unknown family {other:?}"))),
        })
    }
}

/// A parameterized curve t -> j(t) with a closed parameter interval.
pub struct IsospectralFamily {
    pub kind: FamilyKind,
    pub domain: (f64, f64),
    evaluator: Box<dyn Fn(f64) -> Result<JMap> + Send + Sync>,
}

impl IsospectralFamily {
    pub fn new(
        kind: FamilyKind,
        domain: (f64, f64),
        evaluator: Box<dyn Fn(f64) -> Result<JMap> + Send + Sync>,
    ) -> Self {
        IsospectralFamily {
            kind,
            domain,
            evaluator,
        }
    }

    pub fn eval(&self, t: f64) -> Result<JMap> {
        (self.evaluator)(t)
    }

    /// Built-in family by key string.
    pub fn builtin(key: &str) -> Result<Self> {
        let kind = FamilyKind::from_key(key)?;
        Ok(match kind {
            FamilyKind::So5Explicit => {
                IsospectralFamily::new(kind, so5_t_domain(), Box::new(family_so5))
            }
            FamilyKind::Su3Explicit => {
                IsospectralFamily::new(kind, su3_t_domain(), Box::new(family_su3))
            }
            FamilyKind::So8Embedded => {
                IsospectralFamily::new(kind, su3_t_domain(), Box::new(family_so8))
            }
            FamilyKind::So9Embedded => IsospectralFamily::new(
                kind,
                so5_t_domain(),
                Box::new(|t| embed_block(&family_so5(t)?, MatrixFamily::SoN(9), 9)),
            ),
            FamilyKind::Su6Embedded => IsospectralFamily::new(
                kind,
                su3_t_domain(),
                Box::new(|t| embed_block(&family_su3(t)?, MatrixFamily::SuN(6), 6)),
            ),
            FamilyKind::FlowGenerated | FamilyKind::Custom => {
                return Err(Error::Config(format!(
                    "family {key:?} is not evaluable by parameter; use flow_integrate"
                )))
            }
        })
    }

    /// Checks the defining invariant on an inclusive sample of the domain.
    pub fn verify(&self, samples: usize) -> Result<f64> {
        let (lo, hi) = self.domain;
        let mut worst: f64 = 0.0;
        let base = self.eval(lo)?;
        for i in 1..samples {
            let t = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            let jt = self.eval(t)?;
            let cert = is_isospectral_pair(&base, &jt, 9, DEFAULT_PAIR_TOL)?;
            if !cert.isospectral {
                return Err(Error::Domain(format!(
                    "family {} fails isospectrality at t={t} (charpoly residual {:.3e})",
                    self.kind.key(),
                    cert.max_charpoly_residual
                )));
            }
            worst = worst
                .max(cert.max_charpoly_residual)
                .max(cert.max_pab_residual);
        }
        Ok(worst)
    }
}

/// Parameter interval of the so(5) family.
pub fn so5_t_domain() -> (f64, f64) {
    (0.5 * (1.0 - 5f64.sqrt()), 0.5 * (3.0 - 5f64.sqrt()))
}

/// Parameter interval of the su(3) family.
pub fn su3_t_domain() -> (f64, f64) {
    (-1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt())
}

fn radicand_sqrt(value: f64, what: &str, t: f64) -> Result<f64> {
    // endpoints of the parameter interval zero these radicands exactly;
    // tolerate roundoff-scale negatives there
    if value < -1e-12 {
        return Err(Error::Domain(format!(
            "{what} has negative radicand {value:.3e} at t={t}"
        )));
    }
    Ok(value.max(0.0).sqrt())
}

/// The explicit 5x5 family: j_{Z_1}(t) with entries t, t-1, phi(t), psi(t)
/// and the fixed j_{Z_2}, housed in so(5) + R^2 with the central torus.
pub fn family_so5(t: f64) -> Result<JMap> {
    let (lo, hi) = so5_t_domain();
    if t < lo - 1e-12 || t > hi + 1e-12 {
        return Err(Error::Domain(format!(
            "t={t} outside the family interval [{lo}, {hi}]"
        )));
    }
    let phi = radicand_sqrt(
        (t.powi(4) - 3.0 * t * t + 1.0) / (1.0 - 2.0 * t),
        "phi(t)",
        t,
    )?;
    let psi = radicand_sqrt(
        (-t.powi(4) + 4.0 * t.powi(3) - 3.0 * t * t - 2.0 * t + 1.0) / (1.0 - 2.0 * t),
        "psi(t)",
        t,
    )?;
    let j1 = CMat::from_fn(5, 5, |r, cl| {
        c(match (r, cl) {
            (0, 2) => -t,
            (2, 0) => t,
            (1, 3) => t - 1.0,
            (3, 1) => 1.0 - t,
            (2, 4) => -phi,
            (4, 2) => phi,
            (3, 4) => -psi,
            (4, 3) => psi,
            _ => 0.0,
        })
    });
    let j2 = CMat::from_fn(5, 5, |r, cl| {
        c(match (r, cl) {
            (0, 1) => 1.0,
            (1, 0) => -1.0,
            (2, 3) => 1.0,
            (3, 2) => -1.0,
            _ => 0.0,
        })
    });
    let algebra = Arc::new(MatrixLieAlgebra::with_central_torus(
        MatrixFamily::SoN(5),
        2,
    )?);
    let torus = TorusSubalgebra::central(algebra.clone())?;
    JMap::new(algebra, torus, vec![j1, j2])
}

/// The explicit su(3) family: j_{Z_1} = diag(-i, 0, i) constant and
/// j_{Z_2}(t) with entries t and sqrt(1 - 2 t^2).
pub fn family_su3(t: f64) -> Result<JMap> {
    let (lo, hi) = su3_t_domain();
    if t < lo - 1e-12 || t > hi + 1e-12 {
        return Err(Error::Domain(format!(
            "t={t} outside the family interval [{lo}, {hi}]"
        )));
    }
    let f = radicand_sqrt(1.0 - 2.0 * t * t, "f(t)", t)?;
    let j1 = CMat::from_fn(3, 3, |r, cl| match (r, cl) {
        (0, 0) => ci(-1.0),
        (2, 2) => ci(1.0),
        _ => c(0.0),
    });
    let j2 = CMat::from_fn(3, 3, |r, cl| {
        c(match (r, cl) {
            (0, 1) => t,
            (1, 0) => -t,
            (0, 2) => f,
            (2, 0) => -f,
            (1, 2) => t,
            (2, 1) => -t,
            _ => 0.0,
        })
    });
    let algebra = Arc::new(MatrixLieAlgebra::with_central_torus(
        MatrixFamily::SuN(3),
        2,
    )?);
    let torus = TorusSubalgebra::central(algebra.clone())?;
    JMap::new(algebra, torus, vec![j1, j2])
}

/// Real 2m x 2m image of a skew-Hermitian m x m matrix under the
/// identification e_k -> e_k, i e_k -> e_{m+k}; a Lie-algebra homomorphism
/// with tr(phi(X) phi(Y)) = 2 Re tr(XY).
pub fn embed_su_in_so(x: &CMat) -> CMat {
    let m = x.nrows();
    let mut out = CMat::zeros(2 * m, 2 * m);
    for r in 0..m {
        for cl in 0..m {
            let z = x[(r, cl)];
            out[(r, cl)] = c(z.re);
            out[(m + r, m + cl)] = c(z.re);
            out[(r, m + cl)] = c(-z.im);
            out[(m + r, cl)] = c(z.im);
        }
    }
    out
}

/// The explicit so(8) data: images of the su(3) family under the real
/// embedding, torus spanned by the complex-structure direction (with the
/// 1/sqrt(3) factor) and the rotation of the last two coordinates. The
/// algebra carries scale 1/2 so the printed torus basis is orthonormal.
pub fn family_so8(t: f64) -> Result<JMap> {
    let hat = family_su3(t)?;
    let pad = |m: &CMat| -> CMat {
        let mut out = CMat::zeros(8, 8);
        out.view_mut((0, 0), (6, 6)).copy_from(m);
        out
    };
    let j1 = pad(&embed_su_in_so(hat.image(0)));
    let j2 = pad(&embed_su_in_so(hat.image(1)));
    let i_id = CMat::from_fn(3, 3, |r, cl| if r == cl { ci(1.0) } else { c(0.0) });
    let z1 = pad(&embed_su_in_so(&i_id)) / c(3f64.sqrt());
    let mut z2 = CMat::zeros(8, 8);
    z2[(6, 7)] = c(-1.0);
    z2[(7, 6)] = c(1.0);
    let algebra = Arc::new(MatrixLieAlgebra::standard_basis_scaled(
        MatrixFamily::SoN(8),
        8,
        0.5,
    )?);
    let zc1 = algebra.coords_from_matrix(&z1)?;
    let zc2 = algebra.coords_from_matrix(&z2)?;
    let torus = TorusSubalgebra::new(algebra.clone(), vec![zc1, zc2])?;
    JMap::new(algebra, torus, vec![j1, j2])
}

/// Places a rank-2 map with so(m) (resp. su(m)) target into the leading block
/// of so(outer_n >= m+4) (resp. su(outer_n >= m+3)) and re-houses the torus
/// as a maximal torus of the complementary so(4) (resp. su(3)) block.
pub fn embed_block(j: &JMap, outer_family: MatrixFamily, outer_n: usize) -> Result<JMap> {
    let inner = j
        .algebra()
        .summands()
        .first()
        .ok_or_else(|| Error::Config("embed_block needs a matrix summand".into()))?
        .family;
    let m = inner.matrix_size();
    match (inner, outer_family) {
        (MatrixFamily::SoN(_), MatrixFamily::SoN(_)) => {
            if outer_n < m + 4 {
                return Err(Error::Config(format!(
                    "so({m}) block embedding needs outer n >= {}, got {outer_n}",
                    m + 4
                )));
            }
        }
        (MatrixFamily::SuN(_), MatrixFamily::SuN(_)) => {
            if outer_n < m + 3 {
                return Err(Error::Config(format!(
                    "su({m}) block embedding needs outer n >= {}, got {outer_n}",
                    m + 3
                )));
            }
        }
        _ => {
            return Err(Error::Config(
                "embedding must preserve the matrix family".into(),
            ))
        }
    }
    let algebra = Arc::new(MatrixLieAlgebra::standard_basis(outer_family, outer_n)?);
    let pad = |mat: &CMat| -> CMat {
        let mut out = CMat::zeros(outer_n, outer_n);
        out.view_mut((0, 0), (m, m)).copy_from(mat);
        out
    };
    let images: Vec<CMat> = (0..j.rank()).map(|s| pad(j.image(s))).collect();
    let torus = match outer_family {
        MatrixFamily::SoN(_) => {
            // rotations in the (m,m+1) and (m+2,m+3) planes, normalized
            let norm = (2.0 * algebra.scale()).sqrt();
            let mut z1 = CMat::zeros(outer_n, outer_n);
            z1[(m, m + 1)] = c(1.0 / norm);
            z1[(m + 1, m)] = c(-1.0 / norm);
            let mut z2 = CMat::zeros(outer_n, outer_n);
            z2[(m + 2, m + 3)] = c(1.0 / norm);
            z2[(m + 3, m + 2)] = c(-1.0 / norm);
            let b1 = algebra.coords_from_matrix(&z1)?;
            let b2 = algebra.coords_from_matrix(&z2)?;
            TorusSubalgebra::new(algebra.clone(), vec![b1, b2])?
        }
        MatrixFamily::SuN(_) => {
            // maximal torus of the su(3) block on coordinates m..m+2
            let s = algebra.scale().sqrt();
            let mut z1 = CMat::zeros(outer_n, outer_n);
            z1[(m, m)] = ci(1.0 / (2f64.sqrt() * s));
            z1[(m + 1, m + 1)] = ci(-1.0 / (2f64.sqrt() * s));
            let mut z2 = CMat::zeros(outer_n, outer_n);
            let d = 6f64.sqrt() * s;
            z2[(m, m)] = ci(1.0 / d);
            z2[(m + 1, m + 1)] = ci(1.0 / d);
            z2[(m + 2, m + 2)] = ci(-2.0 / d);
            let b1 = algebra.coords_from_matrix(&z1)?;
            let b2 = algebra.coords_from_matrix(&z2)?;
            TorusSubalgebra::new(algebra.clone(), vec![b1, b2])?
        }
    };
    JMap::new(algebra, torus, images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fro2;

    #[test]
    fn so5_at_zero_has_six_unit_entries() {
        let j = family_so5(0.0).unwrap();
        let j1 = j.image(0);
        let nonzero: Vec<f64> = j1.iter().filter(|z| z.norm() > 0.0).map(|z| z.re).collect();
        assert_eq!(nonzero.len(), 6);
        assert!(nonzero.iter().all(|v| (v.abs() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn so5_norm4_closed_form() {
        for &t in &[0.0, 0.5 * (3.0 - 5f64.sqrt())] {
            let j = family_so5(t.min(0.38)).unwrap();
            let m = j.image(0) * j.image(0) + j.image(1) * j.image(1);
            let t_used = t.min(0.38);
            let expect = 4.0 * t_used * t_used - 4.0 * t_used + 26.0;
            assert!((fro2(&m) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn su3_norm4_closed_form() {
        for &t in &[0.0, 0.5] {
            let j = family_su3(t).unwrap();
            let m = j.image(0) * j.image(0) + j.image(1) * j.image(1);
            assert!((fro2(&m) - (8.0 - 4.0 * t * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_domain_is_rejected() {
        assert!(matches!(family_so5(0.6), Err(Error::Domain(_))));
        assert!(matches!(family_su3(0.8), Err(Error::Domain(_))));
        assert!(matches!(family_so8(0.8), Err(Error::Domain(_))));
    }

    #[test]
    fn embed_block_keeps_zero_map_zero() {
        let j = family_so5(0.0).unwrap();
        let zero: Vec<CMat> = (0..2).map(|_| CMat::zeros(5, 5)).collect();
        let jz = JMap::new(j.algebra().clone(), j.torus().clone(), zero).unwrap();
        let emb = embed_block(&jz, MatrixFamily::SoN(9), 9).unwrap();
        assert_eq!(fro2(emb.image(0)), 0.0);
        assert_eq!(fro2(emb.image(1)), 0.0);
    }

    #[test]
    fn so8_torus_commutes_with_images() {
        let j = family_so8(0.25).unwrap();
        assert!(j.placement_residual().unwrap() < 1e-12);
    }
}
