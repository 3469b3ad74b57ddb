//! Quadrature on S^2: product Gauss-Legendre in cos(theta) with a uniform
//! trapezoid in azimuth. Odd-degree azimuthal modes integrate to zero
//! exactly, so the rule is exact for all spherical polynomials up to the
//! declared degree.

use nalgebra::Vector3;

use super::SphereQuadMap;
use crate::error::{Error, Result};
use crate::sphere::scal::scal_s2t2;

#[derive(Debug, Clone)]
pub struct QuadratureRuleS2 {
    pub nodes: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // evaluate P_n and P_n' by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

impl QuadratureRuleS2 {
    /// Smallest product rule exact for spherical polynomials of the given
    /// total degree.
    pub fn with_exactness(degree: usize) -> Self {
        let n_theta = degree / 2 + 1; // 2 n - 1 >= degree
        let n_phi = degree + 1;
        let (zs, ws) = gauss_legendre(n_theta);
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (z, w) in zs.iter().zip(ws.iter()) {
            let st = (1.0 - z * z).max(0.0).sqrt();
            for a in 0..n_phi {
                let phi = std::f64::consts::TAU * a as f64 / n_phi as f64;
                nodes.push(Vector3::new(st * phi.cos(), st * phi.sin(), *z));
                weights.push(w * std::f64::consts::TAU / n_phi as f64);
            }
        }
        QuadratureRuleS2 {
            nodes,
            weights,
            exactness_degree: degree,
        }
    }

    pub fn integrate(&self, f: impl Fn(&Vector3<f64>) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(p, w)| w * f(p))
            .sum()
    }

    /// Largest violation of the exactness contract on the monomial basis
    /// x^a y^b z^c up to the declared degree, against the closed form
    /// 4 pi (a-1)!!(b-1)!!(c-1)!! / (a+b+c+1)!! for even exponents.
    pub fn monomial_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let deg = self.exactness_degree;
        for a in 0..=deg {
            for b in 0..=(deg - a) {
                for cpow in 0..=(deg - a - b) {
                    let got = self.integrate(|p| {
                        p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(cpow as i32)
                    });
                    let want = if a % 2 == 0 && b % 2 == 0 && cpow % 2 == 0 {
                        let df = |k: usize| -> f64 {
                            let mut v = 1.0;
                            let mut x = k as i64 - 1;
                            while x > 1 {
                                v *= x as f64;
                                x -= 2;
                            }
                            v
                        };
                        4.0 * std::f64::consts::PI * df(a) * df(b) * df(cpow) / {
                            let mut v = 1.0;
                            let mut x = (a + b + cpow + 1) as i64;
                            while x > 1 {
                                v *= x as f64;
                                x -= 2;
                            }
                            v
                        }
                    } else {
                        0.0
                    };
                    worst = worst.max((got - want).abs());
                }
            }
        }
        worst
    }

    /// Largest |integral| of the real spherical harmonics Y_l^m for
    /// 1 <= l <= l_max <= exactness degree; an exact rule annihilates them.
    pub fn harmonic_residual(&self, l_max: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for l in 1..=l_max.min(self.exactness_degree) {
            for m in 0..=l {
                for kind in [0, 1] {
                    if m == 0 && kind == 1 {
                        continue;
                    }
                    let norm = {
                        // sqrt((l-m)!/(l+m)!) keeps the values O(1)
                        let mut ratio = 1.0f64;
                        for k in (l - m + 1)..=(l + m) {
                            ratio /= k as f64;
                        }
                        ((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI) * ratio).sqrt()
                    };
                    let got = self.integrate(|p| {
                        let z = p[2];
                        let phi = p[1].atan2(p[0]);
                        let plm = norm * associated_legendre(l, m, z);
                        let ang = if kind == 0 {
                            (m as f64 * phi).cos()
                        } else {
                            (m as f64 * phi).sin()
                        };
                        plm * ang
                    });
                    worst = worst.max(got.abs());
                }
            }
        }
        worst
    }
}

/// Unnormalized associated Legendre P_l^m(x) by the standard upward
/// recurrences; adequate for the moderate degrees used in exactness checks.
fn associated_legendre(l: usize, m: usize, x: f64) -> f64 {
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2.0 * m as f64 + 1.0) * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        pll = (x * (2.0 * ll as f64 - 1.0) * pmmp1 - (ll as f64 + m as f64 - 1.0) * pmm)
            / (ll as f64 - m as f64);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

/// Integrals of scal^k over S^2 for k = 1..k_max (torus volume factored
/// out). scal is degree 4 in the base point, so the rule must be exact to
/// degree 4 k_max at least; the constructor contract asks for 4 k_max + 2.
pub fn scal_moments(c: &SphereQuadMap, k_max: usize, rule: &QuadratureRuleS2) -> Result<Vec<f64>> {
    if rule.exactness_degree < 4 * k_max + 2 {
        return Err(Error::Config(format!(
            "rule exactness {} below required {} for k_max = {k_max}",
            rule.exactness_degree,
            4 * k_max + 2
        )));
    }
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        out.push(rule.integrate(|p| scal_s2t2(c, p).unwrap().powi(k as i32)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    #[test]
    fn weights_sum_to_sphere_area() {
        let rule = QuadratureRuleS2::with_exactness(26);
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-10);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn monomials_integrate_exactly() {
        let rule = QuadratureRuleS2::with_exactness(10);
        assert!(rule.monomial_residual() < 1e-12);
    }

    #[test]
    fn harmonics_annihilated() {
        let rule = QuadratureRuleS2::with_exactness(26);
        assert!(rule.harmonic_residual(26) < 1e-10);
    }

    #[test]
    fn constant_scal_moments() {
        let c = SphereQuadMap::new(Matrix3::zeros(), Matrix3::zeros()).unwrap();
        let rule = QuadratureRuleS2::with_exactness(26);
        let moments = scal_moments(&c, 6, &rule).unwrap();
        for (k, m) in moments.iter().enumerate() {
            let want = 2f64.powi(k as i32 + 1) * 4.0 * std::f64::consts::PI;
            assert!(
                (m - want).abs() < 1e-9 * want.abs(),
                "k={} {m} vs {want}",
                k + 1
            );
        }
    }

    #[test]
    fn insufficient_exactness_is_config_error() {
        let c = SphereQuadMap::new(Matrix3::zeros(), Matrix3::zeros()).unwrap();
        let rule = QuadratureRuleS2::with_exactness(10);
        assert!(scal_moments(&c, 6, &rule).is_err());
    }
}
