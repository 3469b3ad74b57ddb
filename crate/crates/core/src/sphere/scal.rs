//! Scalar curvature of the torus-bundle metrics over spheres: the closed
//! form on S^2 x T^2 and the finite-difference submersion formula
//! scal = scal_h - 1/4 ||d lambda||^2 that serves as its independent oracle.

use nalgebra::{DVector, Vector3};

use super::SphereQuadMap;
use crate::error::{Error, Result};
use crate::linalg::{CMat, RVec};

/// An h-valued 1-form on S^{m-1}, evaluated ambiently (the defining formulas
/// are polynomial in the base point, so evaluation slightly off the sphere is
/// the natural extension used by the finite differences).
pub trait OneFormProvider {
    fn ambient_dim(&self) -> usize;
    fn torus_rank(&self) -> usize;
    /// Coefficient vector: component s is lambda_{Z_s}|_v(x).
    fn eval(&self, v: &RVec, x: &RVec) -> RVec;
}

/// lambda_Z(X) = -1/2 <j_Z p, X>, the linear sphere form of a rank-r j-map.
pub struct LinearJForm {
    images: Vec<CMat>,
    n: usize,
}

pub fn linear_form_provider(images: Vec<CMat>) -> Result<LinearJForm> {
    let n = images
        .first()
        .ok_or_else(|| Error::Config("need at least one image".into()))?
        .nrows();
    Ok(LinearJForm { images, n })
}

impl OneFormProvider for LinearJForm {
    fn ambient_dim(&self) -> usize {
        self.n
    }

    fn torus_rank(&self) -> usize {
        self.images.len()
    }

    fn eval(&self, v: &RVec, x: &RVec) -> RVec {
        let mut out = RVec::zeros(self.images.len());
        for (s, j) in self.images.iter().enumerate() {
            let mut acc = 0.0;
            for r in 0..self.n {
                let mut jv = 0.0;
                for cl in 0..self.n {
                    jv += j[(r, cl)].re * v[cl];
                }
                acc += jv * x[r];
            }
            out[s] = -0.5 * acc;
        }
        out
    }
}

/// lambda_Z(X) = <c_Z p x p, X>, the quadratic form on S^2.
pub struct QuadraticCForm {
    c: SphereQuadMap,
}

pub fn quadratic_form_provider(c: SphereQuadMap) -> QuadraticCForm {
    QuadraticCForm { c }
}

impl OneFormProvider for QuadraticCForm {
    fn ambient_dim(&self) -> usize {
        3
    }

    fn torus_rank(&self) -> usize {
        2
    }

    fn eval(&self, v: &RVec, x: &RVec) -> RVec {
        let p = Vector3::new(v[0], v[1], v[2]);
        let xv = Vector3::new(x[0], x[1], x[2]);
        let mut out = RVec::zeros(2);
        for s in 0..2 {
            out[s] = (self.c.component(s) * p).cross(&p).dot(&xv);
        }
        out
    }
}

/// Closed-form scalar curvature of (S^2 x T^2, g_lambda) at base point p:
/// 2 - 9/2 <c_1 p, p>^2 - 9/2 <c_2 p, p>^2.
pub fn scal_s2t2(c: &SphereQuadMap, p: &Vector3<f64>) -> Result<f64> {
    if (p.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "base point must be a unit vector, |p| = {}",
            p.norm()
        )));
    }
    let v1 = (c.c1 * p).dot(p);
    let v2 = (c.c2 * p).dot(p);
    Ok(2.0 - 4.5 * v1 * v1 - 4.5 * v2 * v2)
}

/// Deterministic orthonormal tangent frame at p, Gram-Schmidt against the
/// coordinate axes with the fallback order rotating away from near-parallel
/// axes.
pub fn tangent_frame(p: &RVec) -> Vec<RVec> {
    let m = p.len();
    let mut frame: Vec<RVec> = Vec::with_capacity(m - 1);
    // axis order: all of them, most-orthogonal-to-p first on near-ties to
    // keep the pole behavior deterministic
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].abs().partial_cmp(&p[b].abs()).unwrap());
    for &axis in &order {
        if frame.len() == m - 1 {
            break;
        }
        let mut v = RVec::zeros(m);
        v[axis] = 1.0;
        v -= p.dot(&v) * p;
        for f in &frame {
            let proj = f.dot(&v);
            v -= proj * f;
        }
        let n = v.norm();
        if n > 1e-8 {
            frame.push(v / n);
        }
    }
    frame
}

/// Scalar curvature by the submersion formula with d lambda computed from
/// central finite differences of the 1-form coefficients in an orthonormal
/// tangent frame: scal = scal_h|_p - 1/4 sum_Z ||d lambda_Z|_p||^2, with the
/// tensor norm summing over ordered frame pairs.
pub fn scal_submersion_oracle(
    provider: &dyn OneFormProvider,
    base_metric_scal: f64,
    p: &RVec,
    step: f64,
) -> Result<f64> {
    if (p.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::Domain(
            "scal_submersion_oracle needs a unit base point".into(),
        ));
    }
    let frame = tangent_frame(p);
    let r = provider.torus_rank();
    let mut total = 0.0;
    for a in 0..frame.len() {
        for b in 0..frame.len() {
            if a == b {
                continue;
            }
            // d lambda(F_a, F_b) = F_a(lambda(F_b)) - F_b(lambda(F_a)) for
            // the constant ambient extensions of the frame fields
            let fa = &frame[a];
            let fb = &frame[b];
            let da = (provider.eval(&(p + step * fa), fb) - provider.eval(&(p - step * fa), fb))
                / (2.0 * step);
            let db = (provider.eval(&(p + step * fb), fa) - provider.eval(&(p - step * fb), fa))
                / (2.0 * step);
            let d = da - db;
            for s in 0..r {
                total += d[s] * d[s];
            }
        }
    }
    // ordered pairs visited both ways, matching the convention
    // ||omega||^2 = sum over all index tuples
    Ok(base_metric_scal - 0.25 * total)
}

/// Range certificate for scal on S^2: min and max over a Fibonacci sample,
/// polished by hill climbing on the sphere.
#[derive(Debug, Clone)]
pub struct ScalRange {
    pub min: f64,
    pub max: f64,
}

pub fn scal_range(c: &SphereQuadMap, samples: usize) -> ScalRange {
    let pts = super::clusters::fibonacci_sphere(samples);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut argmin = Vector3::zeros();
    let mut argmax = Vector3::zeros();
    for p in &pts {
        let v = scal_s2t2(c, p).unwrap();
        if v < min {
            min = v;
            argmin = *p;
        }
        if v > max {
            max = v;
            argmax = *p;
        }
    }
    let refine = |mut p: Vector3<f64>, sign: f64| -> f64 {
        let mut best = sign * scal_s2t2(c, &p).unwrap();
        let mut step = 0.05;
        while step > 1e-10 {
            let mut improved = false;
            let frame = {
                let pv = RVec::from_column_slice(p.as_slice());
                tangent_frame(&pv)
            };
            for f in &frame {
                for dir in [1.0, -1.0] {
                    let cand = {
                        let q = Vector3::new(
                            p[0] + dir * step * f[0],
                            p[1] + dir * step * f[1],
                            p[2] + dir * step * f[2],
                        );
                        q / q.norm()
                    };
                    let v = sign * scal_s2t2(c, &cand).unwrap();
                    if v > best {
                        best = v;
                        p = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        sign * best
    };
    ScalRange {
        min: refine(argmin, -1.0),
        max: refine(argmax, 1.0),
    }
}

/// Closed-form scal on S^{m-1} for the linear construction:
/// (m-1)(m-2) - 1/4 sum_s ||j_s||_F^2 + 1/2 p^T (-(sum_s j_s^2)) p.
pub fn s4_scal_closed(images: &[CMat], p: &DVector<f64>) -> f64 {
    let m = images[0].nrows();
    let base = ((m - 1) * (m - 2)) as f64;
    let mut fro = 0.0;
    let mut quad = 0.0;
    for j in images {
        fro += j.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let mut jp = DVector::<f64>::zeros(m);
        for r in 0..m {
            for cl in 0..m {
                jp[r] += j[(r, cl)].re * p[cl];
            }
        }
        quad += jp.norm_squared();
    }
    base - 0.25 * fro + 0.5 * quad
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    #[test]
    fn zero_c_gives_round_scal() {
        let c = SphereQuadMap::new(Matrix3::zeros(), Matrix3::zeros()).unwrap();
        let p = Vector3::new(0.0, 1.0, 0.0);
        assert_eq!(scal_s2t2(&c, &p).unwrap(), 2.0);
    }

    #[test]
    fn non_unit_point_is_rejected() {
        let (c, _) = SphereQuadMap::explicit_pair();
        assert!(scal_s2t2(&c, &Vector3::new(0.0, 2.0, 0.0)).is_err());
    }

    #[test]
    fn explicit_pair_values() {
        let (c, cp) = SphereQuadMap::explicit_pair();
        assert!((scal_s2t2(&cp, &Vector3::new(0.0, 1.0, 0.0)).unwrap() - 2.0).abs() < 1e-15);
        assert!((scal_s2t2(&c, &Vector3::new(1.0, 0.0, 0.0)).unwrap() + 2.5).abs() < 1e-15);
    }

    #[test]
    fn frame_is_orthonormal_even_near_poles() {
        for p in [
            RVec::from_column_slice(&[0.0, 0.0, 1.0]),
            RVec::from_column_slice(&[1.0, 0.0, 0.0]),
            RVec::from_column_slice(&[0.6, -0.64, 0.48]),
        ] {
            let p = &p / p.norm();
            let f = tangent_frame(&p);
            assert_eq!(f.len(), 2);
            for a in &f {
                assert!((a.norm() - 1.0).abs() < 1e-12);
                assert!(a.dot(&p).abs() < 1e-12);
            }
            assert!(f[0].dot(&f[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn round_s4_scal_is_twelve() {
        let images = vec![CMat::zeros(5, 5), CMat::zeros(5, 5)];
        let provider = linear_form_provider(images).unwrap();
        let mut p = RVec::zeros(5);
        p[2] = 1.0;
        let v = scal_submersion_oracle(&provider, 12.0, &p, 1e-5).unwrap();
        assert!((v - 12.0).abs() < 1e-12);
    }
}
