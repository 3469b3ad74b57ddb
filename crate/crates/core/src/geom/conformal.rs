//! Conformally rescaled metrics exp(2 tau_f) g_lambdabar on K x K x H with
//! the class-function profile tau(x) = eps tr(x) / m, and the localization
//! certificate for the maximum of their scalar curvature.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::curvature::koszul_connection_and_curvature;
use super::LeftInvariantMetric;
use crate::error::{Error, Result};
use crate::lie::MatrixFamily;
use crate::linalg::{exp_skew, RMat};

/// Scalar-curvature profile of the conformal metric on the doubled group.
#[derive(Debug, Clone)]
pub struct ConformalProfile {
    /// scal(g_lambdabar), constant on the group.
    pub alpha: f64,
    /// 2 (N - 1) mu for the Laplacian eigenvalue mu of tr on the factor.
    pub beta: f64,
    /// Delta_h tau = mu tau for the class function tau.
    pub mu: f64,
    /// alpha / beta <= m k(m) / (8 dim K), the monotonicity bound.
    pub bound_ok: bool,
    pub bound_rhs: f64,
    /// max tau = eps, attained exactly at the identity.
    pub tau_max: f64,
    eps: f64,
    n_total: usize,
    m: usize,
    scale: f64,
}

/// Sampled-maximum localization summary.
#[derive(Debug, Clone)]
pub struct MaxLocalization {
    pub scal_at_identity: f64,
    pub sampled_max: f64,
    /// Frobenius distance of the refined maximizer from the identity.
    pub refined_distance_to_identity: f64,
    pub refined_max: f64,
}

/// Builds the profile for the metric on k + k + h (h central, rank 2),
/// with the conformal factor living on the chosen factor (1 or 2).
///
/// The scale constant c^2 relating the inner product to -B is read off a
/// basis vector of the simple summand; mu = (1/c^2)(1/m)(1/k(m)) dim K.
pub fn conformal_scal_profile(
    metric: &LeftInvariantMetric,
    eps: f64,
    factor_index: usize,
) -> Result<ConformalProfile> {
    if !(0.0 < eps && eps < 0.125) {
        return Err(Error::Config(format!(
            "eps must lie in (0, 1/8), got {eps}"
        )));
    }
    if factor_index != 1 && factor_index != 2 {
        return Err(Error::Config(format!(
            "factor_index must be 1 or 2, got {factor_index}"
        )));
    }
    let alg = metric.algebra();
    let summands = alg.summands();
    if summands.len() != 2 || summands[0].family != summands[1].family {
        return Err(Error::Config(
            "conformal profile needs the doubled layout k + k + h".into(),
        ));
    }
    let fam = summands[0].family;
    let m = fam.matrix_size();
    match fam {
        MatrixFamily::SoN(n) if n >= 5 => {}
        MatrixFamily::SuN(n) if n >= 3 => {}
        _ => {
            return Err(Error::Config(format!(
                "conformal profile needs SO(m>=5) or SU(m>=3), got {fam:?}"
            )))
        }
    }
    let km = fam.killing_ratio();
    let dim_k = fam.dim() as f64;
    // c^2 = <X,X>_0 / (-B(X,X)) on the simple summand
    let e0 = alg.basis_vector(summands[0].basis_range.start);
    let ad0 = alg.ad(&e0);
    let minus_b = -(&ad0 * &ad0).trace();
    let c2 = 1.0 / minus_b;
    let mu = (1.0 / c2) * (1.0 / m as f64) * (1.0 / km) * dim_k;
    let n_total = alg.dim();
    let beta = 2.0 * (n_total as f64 - 1.0) * mu;
    let alpha = koszul_connection_and_curvature(metric).scal;
    let bound_rhs = m as f64 * km / (8.0 * dim_k);
    let _ = factor_index; // both factors carry the same profile by symmetry
    Ok(ConformalProfile {
        alpha,
        beta,
        mu,
        bound_ok: alpha / beta <= bound_rhs + 1e-12,
        bound_rhs,
        tau_max: eps,
        eps,
        n_total,
        m,
        scale: alg.scale(),
    })
}

impl ConformalProfile {
    /// tau at a group element x of the chosen factor.
    pub fn tau(&self, x: &RMat) -> f64 {
        self.eps * x.trace() / self.m as f64
    }

    /// || d tau_tilde ||^2 at x: the frame directions of the chosen factor
    /// contribute (eps tr(x E_i) / m)^2. With <E_i, E_j> = delta under the
    /// scale-s trace form, sum_i tr(x E_i)^2 = ||(x - x^T)/2||_F^2 / s.
    pub fn dtau_norm_sq(&self, x: &RMat) -> f64 {
        let skew = 0.5 * (x - x.transpose());
        let proj_sq: f64 = skew.iter().map(|v| v * v).sum();
        (self.eps / self.m as f64).powi(2) * proj_sq / self.scale
    }

    /// Pointwise conformal scalar curvature at a point whose chosen-factor
    /// coordinate is x; the other coordinates do not enter.
    pub fn scal_at(&self, x: &RMat) -> f64 {
        let t = self.tau(x);
        let w = self.dtau_norm_sq(x);
        let nf = self.n_total as f64;
        (self.alpha + self.beta * t - (nf - 1.0) * (nf - 2.0) * w) / (2.0 * t).exp()
    }

    /// Deterministic sampled maximization over the factor group, followed by
    /// a coordinate-wise hill climb from the best sample. The claim being
    /// certified is that the maximum sits at the identity slice.
    pub fn localize_max(&self, seed: u64, samples: usize) -> MaxLocalization {
        let m = self.m;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best_val = f64::NEG_INFINITY;
        let mut best = RMat::identity(m, m);
        for _ in 0..samples {
            let x = random_special_orthogonal(&mut rng, m);
            let v = self.scal_at(&x);
            if v > best_val {
                best_val = v;
                best = x;
            }
        }
        let scal_id = self.scal_at(&RMat::identity(m, m));
        // hill climb along one-parameter subgroups
        let mut cur = best.clone();
        let mut cur_val = best_val;
        let mut step = 0.5;
        let dirs: Vec<RMat> = {
            let mut out = Vec::new();
            for a in 0..m {
                for b in (a + 1)..m {
                    let mut s = RMat::zeros(m, m);
                    s[(a, b)] = 1.0;
                    s[(b, a)] = -1.0;
                    out.push(s);
                }
            }
            out
        };
        while step > 1e-9 {
            let mut improved = false;
            for dmat in &dirs {
                for sgn in [step, -step] {
                    let cand = &cur * exp_skew(&(dmat * sgn));
                    let v = self.scal_at(&cand);
                    if v > cur_val {
                        cur_val = v;
                        cur = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        MaxLocalization {
            scal_at_identity: scal_id,
            sampled_max: best_val,
            refined_distance_to_identity: (&cur - RMat::identity(m, m))
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt(),
            refined_max: cur_val,
        }
    }
}

/// Haar-ish random special orthogonal matrix: QR of a Gaussian sample with
/// sign-fixed diagonal, determinant corrected by a column swap.
pub fn random_special_orthogonal(rng: &mut impl Rng, m: usize) -> RMat {
    let g = RMat::from_fn(m, m, |_, _| {
        // Box-Muller keeps the dependency surface small
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for i in 0..m {
        if r[(i, i)] < 0.0 {
            for row in 0..m {
                q[(row, i)] = -q[(row, i)];
            }
        }
    }
    if q.determinant() < 0.0 {
        q.swap_columns(0, 1);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{barred_lambda, metric_from_lambda, LambdaMap};
    use crate::maps::family_so5;

    fn doubled_metric() -> LeftInvariantMetric {
        let la = LambdaMap::from_jmap(&family_so5(0.0).unwrap()).unwrap();
        let lb = LambdaMap::from_jmap(&family_so5(0.1).unwrap()).unwrap();
        metric_from_lambda(barred_lambda(&la, &lb).unwrap()).unwrap()
    }

    #[test]
    fn eps_range_is_enforced() {
        let m = doubled_metric();
        assert!(matches!(
            conformal_scal_profile(&m, 0.2, 1),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            conformal_scal_profile(&m, 0.0, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn so5_profile_constants() {
        let m = doubled_metric();
        let p = conformal_scal_profile(&m, 0.1, 1).unwrap();
        assert!((p.mu - 2.0).abs() < 1e-10, "mu = {}", p.mu);
        assert!((p.beta - 84.0).abs() < 1e-8);
        assert!((p.bound_rhs - 0.1875).abs() < 1e-15);
        assert!(p.bound_ok);
        // tau attains its max eps exactly at the identity
        let id = RMat::identity(5, 5);
        assert!((p.tau(&id) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn scal_at_identity_beats_random_points() {
        let m = doubled_metric();
        let p = conformal_scal_profile(&m, 0.1, 1).unwrap();
        let id_val = p.scal_at(&RMat::identity(5, 5));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = random_special_orthogonal(&mut rng, 5);
            assert!(p.scal_at(&x) < id_val + 1e-12);
        }
    }
}
