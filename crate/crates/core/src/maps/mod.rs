//! Isospectral linear maps j: h -> g and their certificates: characteristic
//! polynomial grids, the p_{a,b} trace invariants, conjugator witnesses, the
//! explicit built-in families, and the isospectral flow.

mod families;
mod flow;
mod witness;

pub use families::{
    embed_block, embed_su_in_so, family_so5, family_so8, family_su3, so5_t_domain, su3_t_domain,
    FamilyKind, IsospectralFamily,
};
pub use flow::{
    dq_along_y, flow_field_y, flow_integrate, flow_reference_point, flow_sample_jmap, FlowOptions,
    FlowResult,
};
pub use witness::{conjugator_witness, ConjugacyWitness};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lie::{centralizer_split, MatrixLieAlgebra, TorusSubalgebra};
use crate::linalg::{c, charpoly_real_parts, fro2, hermitian_eigenvalues, CMat, RVec};

/// A linear map j: h -> g given by the images of the torus basis.
#[derive(Debug, Clone)]
pub struct JMap {
    algebra: Arc<MatrixLieAlgebra>,
    torus: TorusSubalgebra,
    /// Images j_{Z_s} as ambient matrices.
    images: Vec<CMat>,
    /// The same images in basis coordinates.
    image_coords: Vec<RVec>,
}

impl JMap {
    pub fn new(
        algebra: Arc<MatrixLieAlgebra>,
        torus: TorusSubalgebra,
        images: Vec<CMat>,
    ) -> Result<Self> {
        let image_coords = images
            .iter()
            .map(|m| algebra.coords_from_matrix(m))
            .collect::<Result<Vec<_>>>()?;
        Ok(JMap {
            algebra,
            torus,
            images,
            image_coords,
        })
    }

    pub fn algebra(&self) -> &Arc<MatrixLieAlgebra> {
        &self.algebra
    }

    pub fn torus(&self) -> &TorusSubalgebra {
        &self.torus
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, s: usize) -> &CMat {
        &self.images[s]
    }

    pub fn image_coords(&self, s: usize) -> &RVec {
        &self.image_coords[s]
    }

    /// j_Z for Z = sum_s z_s Z_s.
    pub fn image_at(&self, z: &[f64]) -> CMat {
        let n = self.algebra.matrix_size();
        let mut out = CMat::zeros(n, n);
        for (s, m) in self.images.iter().enumerate() {
            if z[s] != 0.0 {
                out += m * c(z[s]);
            }
        }
        out
    }

    /// Largest residual of the centralizer placement invariant: every
    /// image must lie in z(h) and be orthogonal to h.
    pub fn placement_residual(&self) -> Result<f64> {
        let split = centralizer_split(&self.algebra, &self.torus)?;
        let mut res: f64 = 0.0;
        for coords in &self.image_coords {
            res = res.max(split.residual_outside_zh(coords));
            for z in self.torus.basis() {
                res = res.max(self.algebra.inner(coords, z).abs());
                res = res.max(self.algebra.bracket(coords, z).norm());
            }
        }
        Ok(res)
    }
}

/// charpoly coefficients of an ambient matrix, highest degree first, real
/// parts (imaginary residual is negligible for skew inputs).
pub fn charpoly_coeffs(x: &CMat) -> Vec<f64> {
    charpoly_real_parts(x).0
}

/// p_{a,b}(j) = sum over all words with a copies of j_1 and b copies of j_2
/// of the trace of the product. Complex-valued: odd-length words of
/// skew-Hermitian matrices have imaginary traces.
pub fn p_ab(j: &JMap, a: usize, b: usize) -> Result<nalgebra::Complex<f64>> {
    p_ab_mats(
        j.image(0),
        j.image(1),
        a,
        b,
        j.algebra.matrix_size(),
        j.rank(),
    )
}

pub(crate) fn p_ab_mats(
    j1: &CMat,
    j2: &CMat,
    a: usize,
    b: usize,
    cap: usize,
    rank: usize,
) -> Result<nalgebra::Complex<f64>> {
    if rank != 2 {
        return Err(Error::Config(format!(
            "p_ab needs torus rank 2, got {rank}"
        )));
    }
    let len = a + b;
    if len == 0 {
        return Err(Error::Config("p_ab needs a+b >= 1".into()));
    }
    if len > cap {
        return Err(Error::Config(format!(
            "word length {len} exceeds cap {cap} (Cayley-Hamilton makes longer words dependent)"
        )));
    }
    let n = j1.nrows();
    let mut total = nalgebra::Complex::new(0.0, 0.0);
    // iterate bitmasks of length a+b with popcount a marking positions of j1
    for mask in 0u32..(1u32 << len) {
        if mask.count_ones() as usize != a {
            continue;
        }
        let mut prod = CMat::identity(n, n);
        for pos in 0..len {
            if mask >> pos & 1 == 1 {
                prod = prod * j1;
            } else {
                prod = prod * j2;
            }
        }
        total += prod.trace();
    }
    Ok(total)
}

/// Result of an isospectrality certificate between two rank-2 maps.
#[derive(Debug, Clone)]
pub struct PairCertificate {
    pub isospectral: bool,
    /// Largest charpoly-coefficient deviation over the (s,u) grid.
    pub max_charpoly_residual: f64,
    /// Largest |p_ab(j) - p_ab(j')| over word lengths <= cap.
    pub max_pab_residual: f64,
}

pub const DEFAULT_CHARPOLY_GRID: usize = 17;
pub const DEFAULT_PAIR_TOL: f64 = 1e-9;

/// Certifies j ~ j' by charpoly equality of s*j_1 + u*j_2 on an inclusive
/// lattice over [-1,1]^2 together with full p_ab equality up to the word cap.
pub fn is_isospectral_pair(j: &JMap, jp: &JMap, grid: usize, tol: f64) -> Result<PairCertificate> {
    if j.rank() != jp.rank() {
        return Err(Error::Config("torus ranks differ".into()));
    }
    if j.algebra.matrix_size() != jp.algebra.matrix_size() {
        return Err(Error::Config("ambient sizes differ".into()));
    }
    let mut max_cp: f64 = 0.0;
    for gi in 0..grid {
        for gj in 0..grid {
            let s = -1.0 + 2.0 * gi as f64 / (grid - 1) as f64;
            let u = -1.0 + 2.0 * gj as f64 / (grid - 1) as f64;
            let ca = charpoly_coeffs(&j.image_at(&[s, u]));
            let cb = charpoly_coeffs(&jp.image_at(&[s, u]));
            for (x, y) in ca.iter().zip(cb.iter()) {
                max_cp = max_cp.max((x - y).abs());
            }
        }
    }
    let cap = j.algebra.matrix_size();
    let mut max_p: f64 = 0.0;
    let mut p_scale: f64 = 1.0;
    if j.rank() == 2 {
        for a in 0..=cap {
            for b in 0..=(cap - a) {
                if a + b == 0 {
                    continue;
                }
                let pa = p_ab(j, a, b)?;
                let pb = p_ab(jp, a, b)?;
                max_p = max_p.max((pa - pb).norm());
                p_scale = p_scale.max(pa.norm());
            }
        }
    }
    // long trace words reach O(100); compare them at tol relative to the
    // largest word value
    let pab_tol = tol * p_scale;
    Ok(PairCertificate {
        isospectral: max_cp <= tol && max_p <= pab_tol,
        max_charpoly_residual: max_cp,
        max_pab_residual: max_p,
    })
}

/// The three non-isometry certificates of a rank-2 map.
#[derive(Debug, Clone)]
pub struct Discriminators {
    /// q = tr(j_1^2 j_2^2)
    pub q: f64,
    /// ||j_1^2 + j_2^2||^2 = tr((j_1^2 + j_2^2)^2)
    pub norm4: f64,
    /// Eigenvalues of j_1^2 + j_2^2, ascending.
    pub sum_sq_eigs: Vec<f64>,
}

pub fn discriminators(j: &JMap) -> Result<Discriminators> {
    if j.rank() != 2 {
        return Err(Error::Config("discriminators need torus rank 2".into()));
    }
    let j1 = j.image(0);
    let j2 = j.image(1);
    let m = j1 * j1 + j2 * j2; // Hermitian (negative semidefinite)
    let q = (j1 * j1 * j2 * j2).trace().re;
    let norm4 = fro2(&m);
    let eigs = hermitian_eigenvalues(&m);
    Ok(Discriminators {
        q,
        norm4,
        sum_sq_eigs: eigs,
    })
}
