//! Concrete compact matrix Lie algebras with an orthonormal basis under the
//! scaled trace form, plus the adjoint representation, the bi-invariant Ricci
//! endomorphism, and centralizer decompositions.
//!
//! An algebra is a direct sum of matrix summands (so(n) or su(n), embedded
//! block-diagonally in one ambient matrix) and an optional trailing abelian
//! summand R^r carrying the Euclidean inner product. Elements are handled as
//! coordinate vectors in the orthonormal basis; the matrix summand part can
//! always be materialized as an ambient matrix.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{c, ci, CMat, RMat, RVec};

/// Simple matrix families handled by the workbench.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFamily {
    SoN(usize),
    SuN(usize),
}

impl MatrixFamily {
    pub fn matrix_size(self) -> usize {
        match self {
            MatrixFamily::SoN(n) | MatrixFamily::SuN(n) => n,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            MatrixFamily::SoN(n) => n * (n - 1) / 2,
            MatrixFamily::SuN(n) => n * n - 1,
        }
    }

    /// Ratio k(m) with tr(ad_X ad_Y) = k(m) tr(XY) in the defining
    /// representation: n-2 on so(n), 2n on su(n).
    pub fn killing_ratio(self) -> f64 {
        match self {
            MatrixFamily::SoN(n) => n as f64 - 2.0,
            MatrixFamily::SuN(n) => 2.0 * n as f64,
        }
    }
}

/// One matrix summand placed at a diagonal offset of the ambient matrix.
#[derive(Debug, Clone)]
pub struct Summand {
    pub family: MatrixFamily,
    pub offset: usize,
    /// Basis index range inside the algebra's coordinate space.
    pub basis_range: std::ops::Range<usize>,
}

/// A compact Lie algebra with orthonormal basis under
/// `<X,Y> = scale * (-tr(XY))` on the matrix part and the Euclidean product
/// on the abelian part.
#[derive(Debug, Clone)]
pub struct MatrixLieAlgebra {
    summands: Vec<Summand>,
    /// Ambient matrix size (0 when the algebra is purely abelian).
    matrix_size: usize,
    abelian_dim: usize,
    dim: usize,
    scale: f64,
    /// Basis matrices of the matrix directions, embedded in the ambient size.
    basis_mats: Vec<CMat>,
    /// ad matrices of the basis elements: ad_tables[i][k][j] = c^k_{ij}.
    ad_tables: Vec<RMat>,
}

impl MatrixLieAlgebra {
    /// Standard orthonormalized basis of so(n) or su(n), scale 1.
    pub fn standard_basis(family: MatrixFamily, n: usize) -> Result<Self> {
        Self::standard_basis_scaled(family, n, 1.0)
    }

    pub fn standard_basis_scaled(family: MatrixFamily, n: usize, scale: f64) -> Result<Self> {
        let fam = match family {
            MatrixFamily::SoN(_) => MatrixFamily::SoN(n),
            MatrixFamily::SuN(_) => MatrixFamily::SuN(n),
        };
        Self::from_summands(&[fam], 0, scale)
    }

    /// Direct sum of matrix summands (block diagonal) plus an abelian R^r.
    pub fn from_summands(
        families: &[MatrixFamily],
        abelian_dim: usize,
        scale: f64,
    ) -> Result<Self> {
        if scale <= 0.0 {
            return Err(Error::Config(format!(
                "inner product scale must be positive, got {scale}"
            )));
        }
        for f in families {
            if f.matrix_size() < 2 {
                return Err(Error::Config(format!(
                    "matrix summand needs n >= 2, got {:?}",
                    f
                )));
            }
        }
        let matrix_size: usize = families.iter().map(|f| f.matrix_size()).sum();
        let mut basis_mats = Vec::new();
        let mut summands = Vec::new();
        let mut offset = 0usize;
        for &fam in families {
            let n = fam.matrix_size();
            let start = basis_mats.len();
            let norm = (2.0 * scale).sqrt();
            match fam {
                MatrixFamily::SoN(_) => {
                    for a in 0..n {
                        for b in (a + 1)..n {
                            let mut m = CMat::zeros(matrix_size, matrix_size);
                            m[(offset + a, offset + b)] = c(1.0 / norm);
                            m[(offset + b, offset + a)] = c(-1.0 / norm);
                            basis_mats.push(m);
                        }
                    }
                }
                MatrixFamily::SuN(_) => {
                    for a in 0..n {
                        for b in (a + 1)..n {
                            let mut m = CMat::zeros(matrix_size, matrix_size);
                            m[(offset + a, offset + b)] = c(1.0 / norm);
                            m[(offset + b, offset + a)] = c(-1.0 / norm);
                            basis_mats.push(m);
                        }
                    }
                    for a in 0..n {
                        for b in (a + 1)..n {
                            let mut m = CMat::zeros(matrix_size, matrix_size);
                            m[(offset + a, offset + b)] = ci(1.0 / norm);
                            m[(offset + b, offset + a)] = ci(1.0 / norm);
                            basis_mats.push(m);
                        }
                    }
                    // traceless diagonals i*diag(1,..,1,-k,0,..)/sqrt(k(k+1))
                    for k in 1..n {
                        let mut m = CMat::zeros(matrix_size, matrix_size);
                        let denom = ((k * (k + 1)) as f64).sqrt() * scale.sqrt();
                        for a in 0..k {
                            m[(offset + a, offset + a)] = ci(1.0 / denom);
                        }
                        m[(offset + k, offset + k)] = ci(-(k as f64) / denom);
                        basis_mats.push(m);
                    }
                }
            }
            summands.push(Summand {
                family: fam,
                offset,
                basis_range: start..basis_mats.len(),
            });
            offset += n;
        }
        let dim = basis_mats.len() + abelian_dim;
        let mut alg = MatrixLieAlgebra {
            summands,
            matrix_size,
            abelian_dim,
            dim,
            scale,
            basis_mats,
            ad_tables: Vec::new(),
        };
        alg.build_ad_tables()?;
        Ok(alg)
    }

    /// so(n) or su(n) plus a central torus R^r, the product layout.
    pub fn with_central_torus(family: MatrixFamily, r: usize) -> Result<Self> {
        Self::from_summands(&[family], r, 1.0)
    }

    fn build_ad_tables(&mut self) -> Result<()> {
        let d = self.dim;
        let dm = self.basis_mats.len();
        let mut tables = vec![RMat::zeros(d, d); d];
        for i in 0..dm {
            for j in 0..dm {
                let br = &self.basis_mats[i] * &self.basis_mats[j]
                    - &self.basis_mats[j] * &self.basis_mats[i];
                let coords = self.coords_from_matrix_unchecked(&br);
                // closure: the bracket must reconstruct from the basis
                let rec = self.matrix_from_coords(&coords);
                let residual = (&br - &rec).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if residual > 1e-12 {
                    return Err(Error::Domain(format!(
                        "bracket of basis elements {i},{j} leaves the span (residual {residual:.3e})"
                    )));
                }
                for k in 0..d {
                    tables[i][(k, j)] = coords[k];
                }
            }
        }
        self.ad_tables = tables;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix_dim(&self) -> usize {
        self.basis_mats.len()
    }

    pub fn abelian_dim(&self) -> usize {
        self.abelian_dim
    }

    pub fn matrix_size(&self) -> usize {
        self.matrix_size
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn basis_matrix(&self, i: usize) -> &CMat {
        &self.basis_mats[i]
    }

    /// Scaled trace form on ambient matrices: scale * (-tr(XY)), real for
    /// skew-symmetric / skew-Hermitian arguments.
    pub fn inner_matrices(&self, x: &CMat, y: &CMat) -> f64 {
        // tr(XY) = sum_ij X[i,j] Y[j,i], no product needed
        let n = x.nrows();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = x[(i, j)];
                let b = y[(j, i)];
                acc += a.re * b.re - a.im * b.im;
            }
        }
        -self.scale * acc
    }

    /// Inner product of coordinate vectors (basis orthonormal).
    pub fn inner(&self, x: &RVec, y: &RVec) -> f64 {
        x.dot(y)
    }

    /// Coordinates of the matrix part of an element; abelian coords zero.
    fn coords_from_matrix_unchecked(&self, m: &CMat) -> RVec {
        let mut v = RVec::zeros(self.dim);
        for (i, e) in self.basis_mats.iter().enumerate() {
            v[i] = self.inner_matrices(m, e);
        }
        v
    }

    /// Coordinates of a matrix in the algebra; errors when the matrix is not
    /// in the span of the basis.
    pub fn coords_from_matrix(&self, m: &CMat) -> Result<RVec> {
        if m.nrows() != self.matrix_size || m.ncols() != self.matrix_size {
            return Err(Error::Domain(format!(
                "element size {}x{} does not match ambient size {}",
                m.nrows(),
                m.ncols(),
                self.matrix_size
            )));
        }
        let v = self.coords_from_matrix_unchecked(m);
        let rec = self.matrix_from_coords(&v);
        let residual = (m - &rec).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = 1e-10 * (1.0 + m.iter().map(|z| z.norm()).fold(0.0, f64::max));
        if residual > tol {
            return Err(Error::Domain(format!(
                "element not in the span of the basis (residual {residual:.3e})"
            )));
        }
        Ok(v)
    }

    /// Ambient matrix of the matrix-summand part of a coordinate vector.
    pub fn matrix_from_coords(&self, v: &RVec) -> CMat {
        let mut m = CMat::zeros(self.matrix_size, self.matrix_size);
        for (i, e) in self.basis_mats.iter().enumerate() {
            if v[i] != 0.0 {
                m += e * c(v[i]);
            }
        }
        m
    }

    /// Bracket in coordinates; abelian directions are central.
    pub fn bracket(&self, x: &RVec, y: &RVec) -> RVec {
        let mut out = RVec::zeros(self.dim);
        for i in 0..self.matrix_dim() {
            if x[i] != 0.0 {
                out += x[i] * (&self.ad_tables[i] * y);
            }
        }
        out
    }

    /// Matrix of ad_X = [X, .] in the orthonormal basis.
    pub fn ad(&self, x: &RVec) -> RMat {
        let mut out = RMat::zeros(self.dim, self.dim);
        for i in 0..self.matrix_dim() {
            if x[i] != 0.0 {
                out += x[i] * &self.ad_tables[i];
            }
        }
        out
    }

    /// ad of an ambient matrix element (projected; errors off the span).
    pub fn ad_matrix(&self, x: &CMat) -> Result<RMat> {
        Ok(self.ad(&self.coords_from_matrix(x)?))
    }

    /// Bi-invariant Ricci endomorphism Ric0 = -1/4 sum_i ad_{E_i}^2 as a
    /// symmetric matrix on the orthonormal basis; zero on abelian summands.
    pub fn ricci_biinvariant(&self) -> RMat {
        let d = self.dim;
        let mut out = RMat::zeros(d, d);
        for t in &self.ad_tables {
            out -= 0.25 * (t * t);
        }
        out
    }

    /// Unit coordinate vector for basis direction i.
    pub fn basis_vector(&self, i: usize) -> RVec {
        let mut v = RVec::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    /// Gram matrix of the basis under the declared inner product. Identity by
    /// construction; exposed for validation.
    pub fn gram(&self) -> RMat {
        let dm = self.matrix_dim();
        let mut g = RMat::identity(self.dim, self.dim);
        for i in 0..dm {
            for j in 0..dm {
                g[(i, j)] = self.inner_matrices(&self.basis_mats[i], &self.basis_mats[j]);
            }
        }
        g
    }
}

/// An abelian subalgebra h with an orthonormal basis, either the central
/// abelian summand (product layouts) or explicit commuting matrices inside
/// the matrix summand (embedded layouts).
#[derive(Debug, Clone)]
pub struct TorusSubalgebra {
    parent: Arc<MatrixLieAlgebra>,
    basis: Vec<RVec>,
}

impl TorusSubalgebra {
    pub fn new(parent: Arc<MatrixLieAlgebra>, basis: Vec<RVec>) -> Result<Self> {
        for (i, zi) in basis.iter().enumerate() {
            for (j, zj) in basis.iter().enumerate() {
                let br = parent.bracket(zi, zj).norm();
                if br > 1e-10 {
                    return Err(Error::Domain(format!(
                        "torus basis does not commute: |[Z_{i}, Z_{j}]| = {br:.3e}"
                    )));
                }
                let g = parent.inner(zi, zj) - if i == j { 1.0 } else { 0.0 };
                if g.abs() > 1e-10 {
                    return Err(Error::Domain(format!(
                        "torus basis not orthonormal: <Z_{i}, Z_{j}> off by {g:.3e}"
                    )));
                }
            }
        }
        Ok(TorusSubalgebra { parent, basis })
    }

    /// The trailing abelian directions of a product-layout algebra.
    pub fn central(parent: Arc<MatrixLieAlgebra>) -> Result<Self> {
        let r = parent.abelian_dim();
        if r == 0 {
            return Err(Error::Config("algebra has no abelian summand".into()));
        }
        let dm = parent.matrix_dim();
        let basis = (0..r).map(|s| parent.basis_vector(dm + s)).collect();
        Self::new(parent, basis)
    }

    pub fn parent(&self) -> &Arc<MatrixLieAlgebra> {
        &self.parent
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RVec] {
        &self.basis
    }

    /// True when h is the central abelian summand.
    pub fn is_central(&self) -> bool {
        let dm = self.parent.matrix_dim();
        self.basis
            .iter()
            .all(|z| (0..dm).all(|i| z[i].abs() < 1e-14))
    }

    /// Metric dual Z_mu of an integer character mu in the lattice spanned by
    /// the orthonormal basis.
    pub fn character_vector(&self, mu: &[i64]) -> RVec {
        let mut v = RVec::zeros(self.parent.dim());
        for (s, z) in self.basis.iter().enumerate() {
            v += mu[s] as f64 * z;
        }
        v
    }
}

/// Orthogonal split g = z(h) + u into the centralizer of h and its
/// complement.
#[derive(Debug, Clone)]
pub struct CentralizerSplit {
    /// Orthonormal basis of z(h), as columns.
    pub zh: RMat,
    /// Orthonormal basis of u = z(h)^perp, as columns.
    pub u: RMat,
    /// Singular values of the stacked ad_{Z_i} map, descending.
    pub singular_values: Vec<f64>,
}

/// Relative singular-value cutoff for the kernel decision.
pub const CENTRALIZER_RANK_CUTOFF: f64 = 1e-9;

/// z(h) as the kernel of the stacked maps ad_{Z_1}, .., ad_{Z_r}; u is the
/// orthogonal complement. The rank decision uses a fixed relative cutoff and
/// reports an error when a singular value falls inside the ambiguity window
/// around it.
pub fn centralizer_split(
    algebra: &MatrixLieAlgebra,
    torus: &TorusSubalgebra,
) -> Result<CentralizerSplit> {
    let d = algebra.dim();
    let r = torus.rank();
    let mut stacked = RMat::zeros(r * d, d);
    for (s, z) in torus.basis().iter().enumerate() {
        let adz = algebra.ad(z);
        stacked.view_mut((s * d, 0), (d, d)).copy_from(&adz);
    }
    let svd = stacked.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd with v requested");
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let smax = sv.first().cloned().unwrap_or(0.0);
    if smax == 0.0 {
        // h is central: everything commutes
        return Ok(CentralizerSplit {
            zh: RMat::identity(d, d),
            u: RMat::zeros(d, 0),
            singular_values: sv,
        });
    }
    let cutoff = CENTRALIZER_RANK_CUTOFF * smax;
    // ambiguity window: anything within a factor 30 of the cutoff
    for &s in &sv {
        if s > cutoff / 30.0 && s < cutoff * 30.0 {
            return Err(Error::AmbiguousRank {
                context: "centralizer kernel".into(),
                singular_values: sv,
            });
        }
    }
    let mut zh_cols = Vec::new();
    let mut u_cols = Vec::new();
    // rows of v_t are right singular vectors; nalgebra orders singular values
    // descending and pads the kernel implicitly, so classify per row and then
    // append any missing kernel directions via the nullspace of stacked.
    let k = svd.singular_values.len();
    for i in 0..k {
        let row = v_t.row(i).transpose();
        if svd.singular_values[i] > cutoff {
            u_cols.push(row);
        } else {
            zh_cols.push(row);
        }
    }
    // v_t from a thin SVD has d rows here (stacked is (r d) x d with r d >= d)
    let zh = RMat::from_columns(&zh_cols);
    let u = if u_cols.is_empty() {
        RMat::zeros(d, 0)
    } else {
        RMat::from_columns(&u_cols)
    };
    Ok(CentralizerSplit {
        zh,
        u,
        singular_values: sv,
    })
}

impl CentralizerSplit {
    /// Largest residual of commutation [zh, Z_i] and orthogonality zh _|_ u.
    pub fn validate(&self, algebra: &MatrixLieAlgebra, torus: &TorusSubalgebra) -> f64 {
        let mut res: f64 = 0.0;
        for col in 0..self.zh.ncols() {
            let x = RVec::from(self.zh.column(col));
            for z in torus.basis() {
                res = res.max(algebra.bracket(&x, z).norm());
            }
        }
        let cross = self.zh.transpose() * &self.u;
        res.max(cross.amax())
    }

    /// Projection residual of a coordinate vector onto z(h) \cap h^perp.
    pub fn residual_outside_zh(&self, x: &RVec) -> f64 {
        let proj = &self.zh * (self.zh.transpose() * x);
        (x - proj).norm()
    }
}
