//! The S^{m-1} x T^r and S^2 x T^2 constructions: quadratic 1-forms from the
//! tensor space Sym^2(R^3)* (x) R^3, the projections P and P-perp, the
//! isomorphism Phi from traceless endomorphisms, pair certificates for maps
//! into the symmetric traceless matrices, and the conjugation checks tying
//! sphere forms to j-map witnesses.

mod clusters;
mod quad;
mod scal;

pub use clusters::{fibonacci_sphere, max_scal_preimage, ClusterDescriptor, PreimageReport};
pub use quad::{scal_moments, QuadratureRuleS2};
pub use scal::{
    linear_form_provider, quadratic_form_provider, s4_scal_closed, scal_range, scal_s2t2,
    scal_submersion_oracle, OneFormProvider, ScalRange,
};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::linalg::{charpoly_real_parts, CMat};

/// Element of Sym^2(R^3)* (x) R^3: components q[i][j][k] symmetric in (j,k),
/// read as a linear map Sym^2(R^3) -> R^3 with output index i. The canonical
/// inner product is the componentwise one.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor3 {
    q: [[[f64; 3]; 3]; 3],
}

impl SymTensor3 {
    pub fn new(q: [[[f64; 3]; 3]; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    if (q[i][j][k] - q[i][k][j]).abs() > 1e-12 {
                        return Err(Error::Domain(format!(
                            "components not symmetric in the last two slots at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(SymTensor3 { q })
    }

    pub fn zeros() -> Self {
        SymTensor3 {
            q: [[[0.0; 3]; 3]; 3],
        }
    }

    pub fn component(&self, i: usize, j: usize, k: usize) -> f64 {
        self.q[i][j][k]
    }

    pub fn set_symmetric(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.q[i][j][k] = v;
        self.q[i][k][j] = v;
    }

    /// Evaluation on the symmetric product: q(x . y) in R^3.
    pub fn eval(&self, x: &Vector3<f64>, y: &Vector3<f64>) -> Vector3<f64> {
        let mut out = Vector3::zeros();
        for i in 0..3 {
            let mut acc = 0.0;
            for j in 0..3 {
                for k in 0..3 {
                    acc += self.q[i][j][k] * x[j] * y[k];
                }
            }
            out[i] = acc;
        }
        out
    }

    pub fn inner(&self, other: &SymTensor3) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    acc += self.q[i][j][k] * other.q[i][j][k];
                }
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Action of A in O(3): (A . q)(x . y) = A q(A^-1 x . A^-1 y).
    pub fn rotate(&self, a: &Matrix3<f64>) -> SymTensor3 {
        let ainv = a.transpose();
        let mut out = [[[0.0; 3]; 3]; 3];
        #[allow(clippy::needless_range_loop)]
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut acc = 0.0;
                    for p in 0..3 {
                        for r in 0..3 {
                            for s in 0..3 {
                                acc += a[(i, p)] * self.q[p][r][s] * ainv[(r, j)] * ainv[(s, k)];
                            }
                        }
                    }
                    out[i][j][k] = acc;
                }
            }
        }
        SymTensor3 { q: out }
    }
}

impl std::ops::Add for &SymTensor3 {
    type Output = SymTensor3;
    fn add(self, other: &SymTensor3) -> SymTensor3 {
        let mut out = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out[i][j][k] = self.q[i][j][k] + other.q[i][j][k];
                }
            }
        }
        SymTensor3 { q: out }
    }
}

impl std::ops::Sub for &SymTensor3 {
    type Output = SymTensor3;
    fn sub(self, other: &SymTensor3) -> SymTensor3 {
        let mut out = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out[i][j][k] = self.q[i][j][k] - other.q[i][j][k];
                }
            }
        }
        SymTensor3 { q: out }
    }
}

/// Total symmetrization: the orthogonal projection onto the image of
/// Sym^3(R^3) (dimension 10).
pub fn projection_p(q: &SymTensor3) -> SymTensor3 {
    let mut out = [[[0.0; 3]; 3]; 3];
    #[allow(clippy::needless_range_loop)]
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j][k] = (q.q[i][j][k] + q.q[j][i][k] + q.q[k][i][j]) / 3.0;
            }
        }
    }
    SymTensor3 { q: out }
}

/// Complementary projection onto ker P.
pub fn projection_p_perp(q: &SymTensor3) -> SymTensor3 {
    q - &projection_p(q)
}

const LEVI_CIVITA: [(usize, usize, usize, f64); 6] = [
    (0, 1, 2, 1.0),
    (1, 2, 0, 1.0),
    (2, 0, 1, 1.0),
    (0, 2, 1, -1.0),
    (2, 1, 0, -1.0),
    (1, 0, 2, -1.0),
];

/// Phi(b): X . X -> bX x X for traceless b, polarized to
/// q(X . Y) = 1/2 (bX x Y + bY x X). An SO(3)-equivariant isomorphism from
/// the traceless endomorphisms onto ker P.
pub fn phi_map(b: &Matrix3<f64>) -> Result<SymTensor3> {
    let tr = b.trace();
    if tr.abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "phi_map needs tr(b) = 0, got {tr:.3e}"
        )));
    }
    let mut eps = [[[0.0; 3]; 3]; 3];
    for &(i, j, k, s) in &LEVI_CIVITA {
        eps[i][j][k] = s;
    }
    let mut out = [[[0.0; 3]; 3]; 3];
    #[allow(clippy::needless_range_loop)]
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let mut acc = 0.0;
                for l in 0..3 {
                    acc += 0.5 * (eps[i][l][k] * b[(l, j)] + eps[i][l][j] * b[(l, k)]);
                }
                out[i][j][k] = acc;
            }
        }
    }
    Ok(SymTensor3 { q: out })
}

/// A linear map c: R^2 -> S_0(R^3), the quadratic data of a metric on
/// S^2 x T^2.
#[derive(Debug, Clone)]
pub struct SphereQuadMap {
    pub c1: Matrix3<f64>,
    pub c2: Matrix3<f64>,
}

impl SphereQuadMap {
    pub fn new(c1: Matrix3<f64>, c2: Matrix3<f64>) -> Result<Self> {
        for (name, m) in [("c1", &c1), ("c2", &c2)] {
            if (m - m.transpose()).amax() > 1e-12 {
                return Err(Error::Domain(format!("{name} must be symmetric")));
            }
            if m.trace().abs() > 1e-12 {
                return Err(Error::Domain(format!("{name} must be traceless")));
            }
        }
        Ok(SphereQuadMap { c1, c2 })
    }

    pub fn component(&self, s: usize) -> &Matrix3<f64> {
        if s == 0 {
            &self.c1
        } else {
            &self.c2
        }
    }

    /// The explicit pair (c, c') used throughout: c_1 = c'_1 = diag(-1,0,1),
    /// c_2 the tridiagonal unit pattern, c'_2 the sqrt(2) corner pattern.
    pub fn explicit_pair() -> (SphereQuadMap, SphereQuadMap) {
        let a = Matrix3::from_diagonal(&Vector3::new(-1.0, 0.0, 1.0));
        let b = Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0);
        let s2 = 2f64.sqrt();
        let bp = Matrix3::new(0.0, 0.0, s2, 0.0, 0.0, 0.0, s2, 0.0, 0.0);
        (
            SphereQuadMap::new(a, b).unwrap(),
            SphereQuadMap::new(a, bp).unwrap(),
        )
    }
}

/// Certificate record of a pair of quadratic maps.
#[derive(Debug, Clone)]
pub struct CPairCheck {
    /// Charpoly equality of s c_1 + u c_2 against the primed pair on the grid.
    pub cond1: bool,
    pub max_charpoly_residual: f64,
    /// The three normal-form invariants (sum of squares, b23^2 - b12^2,
    /// b12 b13 b23) per side, when both sides are in the (a, b)-normal form.
    pub normal_form_invariants: Option<([f64; 3], [f64; 3], [f64; 3])>,
    /// (tr(c1^2 c2^2), tr(c1'^2 c2'^2)): the non-isometry discriminator.
    pub discriminator: (f64, f64),
}

fn charpoly3(m: &Matrix3<f64>) -> Vec<f64> {
    let cm = CMat::from_fn(3, 3, |r, cl| nalgebra::Complex::new(m[(r, cl)], 0.0));
    charpoly_real_parts(&cm).0
}

fn normal_form_b(c: &SphereQuadMap) -> Option<[f64; 3]> {
    let a_ref = Matrix3::from_diagonal(&Vector3::new(-1.0, 0.0, 1.0));
    if (c.c1 - a_ref).amax() > 1e-12 {
        return None;
    }
    let b = &c.c2;
    if (0..3).any(|i| b[(i, i)].abs() > 1e-12) {
        return None;
    }
    let (b12, b13, b23) = (b[(0, 1)], b[(0, 2)], b[(1, 2)]);
    Some([
        b12 * b12 + b13 * b13 + b23 * b23,
        b23 * b23 - b12 * b12,
        b12 * b13 * b23,
    ])
}

/// Runs the isospectrality certificate (charpoly grid), the normal-form
/// equations when applicable, and the trace discriminator for a c-pair.
pub fn check_c_pair(c: &SphereQuadMap, cp: &SphereQuadMap, grid: usize, tol: f64) -> CPairCheck {
    let mut max_cp: f64 = 0.0;
    for gi in 0..grid {
        for gj in 0..grid {
            let s = -1.0 + 2.0 * gi as f64 / (grid - 1) as f64;
            let u = -1.0 + 2.0 * gj as f64 / (grid - 1) as f64;
            let pa = charpoly3(&(c.c1 * s + c.c2 * u));
            let pb = charpoly3(&(cp.c1 * s + cp.c2 * u));
            for (x, y) in pa.iter().zip(pb.iter()) {
                max_cp = max_cp.max((x - y).abs());
            }
        }
    }
    let normal_form_invariants = match (normal_form_b(c), normal_form_b(cp)) {
        (Some(l), Some(r)) => Some((l, r, [l[0] - r[0], l[1] - r[1], l[2] - r[2]])),
        _ => None,
    };
    let d = (
        (c.c1 * c.c1 * c.c2 * c.c2).trace(),
        (cp.c1 * cp.c1 * cp.c2 * cp.c2).trace(),
    );
    CPairCheck {
        cond1: max_cp <= tol,
        max_charpoly_residual: max_cp,
        normal_form_invariants,
        discriminator: d,
    }
}

/// The non-isometry discriminator pair (tr(c1^2 c2^2), tr(c1'^2 c2'^2)).
pub fn trace_square_discriminator(c: &SphereQuadMap, cp: &SphereQuadMap) -> (f64, f64) {
    (
        (c.c1 * c.c1 * c.c2 * c.c2).trace(),
        (cp.c1 * cp.c1 * cp.c2 * cp.c2).trace(),
    )
}

/// Horizontal lift data at p: the coefficient vectors w_s(p) = c_s p x p and
/// the fiber components; the returned tangent vector of S^2 x T^2 is
/// (X, -<w_1, X>, -<w_2, X>).
#[derive(Debug, Clone)]
pub struct HorizontalVector {
    pub sphere_part: Vector3<f64>,
    pub fiber_part: [f64; 2],
    pub coefficient_fields: [Vector3<f64>; 2],
}

pub fn horizontal_vector(
    c: &SphereQuadMap,
    p: &Vector3<f64>,
    x: &Vector3<f64>,
) -> Result<HorizontalVector> {
    if (p.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(
            "base point must lie on the unit sphere".into(),
        ));
    }
    if p.dot(x).abs() > 1e-10 {
        return Err(Error::Domain("vector must be tangent to the sphere".into()));
    }
    let w1 = (c.c1 * p).cross(p);
    let w2 = (c.c2 * p).cross(p);
    Ok(HorizontalVector {
        sphere_part: *x,
        fiber_part: [-w1.dot(x), -w2.dot(x)],
        coefficient_fields: [w1, w2],
    })
}

/// g_lambda inner product on T(S^2 x T^2):
/// h(X, Y) + sum_s (lambda_s(X) + V_s)(lambda_s(Y) + W_s).
pub fn g_lambda_inner(
    c: &SphereQuadMap,
    p: &Vector3<f64>,
    xv: (&Vector3<f64>, [f64; 2]),
    yw: (&Vector3<f64>, [f64; 2]),
) -> f64 {
    let lam = |z: &Vector3<f64>, s: usize| (c.component(s) * p).cross(p).dot(z);
    let mut acc = xv.0.dot(yw.0);
    for s in 0..2 {
        acc += (lam(xv.0, s) + xv.1[s]) * (lam(yw.0, s) + yw.1[s]);
    }
    acc
}

/// Max residual over sampled (p, X) of
/// |lambda'_Z|_p(X) - lambda_Z|_{A^-1 p}(A^-1 X)| for sphere 1-forms built
/// from a j-pair with witness A_Z, per the linear construction
/// lambda_Z(X) = -1/2 <j_Z p, X>.
pub fn sphere_form_conjugation_check(
    j_z: &CMat,
    j_z_prime: &CMat,
    a_z: &CMat,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    let n = j_z.nrows();
    let conj = a_z * j_z * a_z.adjoint();
    let wres = (&conj - j_z_prime)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if wres > 1e-6 {
        return Err(Error::Domain(format!(
            "witness does not conjugate j_Z to j'_Z (residual {wres:.3e})"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let gauss = |rng: &mut rand_chacha::ChaCha8Rng| {
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let jr = |m: &CMat, v: &nalgebra::DVector<f64>| -> nalgebra::DVector<f64> {
        let mut out = nalgebra::DVector::zeros(n);
        for r in 0..n {
            let mut acc = 0.0;
            for cl in 0..n {
                acc += m[(r, cl)].re * v[cl];
            }
            out[r] = acc;
        }
        out
    };
    let a_real = nalgebra::DMatrix::<f64>::from_fn(n, n, |r, cl| a_z[(r, cl)].re);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut p = nalgebra::DVector::<f64>::from_fn(n, |_, _| gauss(&mut rng));
        p /= p.norm();
        let mut x = nalgebra::DVector::<f64>::from_fn(n, |_, _| gauss(&mut rng));
        x -= p.dot(&x) * &p;
        // lambda'_Z|_p(X) = -1/2 <j'_Z p, X>
        let lhs = -0.5 * jr(j_z_prime, &p).dot(&x);
        // lambda_Z|_{A^-1 p}(A^-1 X)
        let pa = a_real.transpose() * &p;
        let xa = a_real.transpose() * &x;
        let rhs = -0.5 * jr(j_z, &pa).dot(&xa);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}
