//! Dense linear-algebra helpers shared across the workbench: characteristic
//! polynomials, canonical forms of skew matrices, and small utilities on
//! complex matrices.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

pub fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn ci(im: f64) -> C64 {
    Complex::new(0.0, im)
}

/// Frobenius norm squared.
pub fn fro2(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn fro2_real(m: &RMat) -> f64 {
    m.iter().map(|x| x * x).sum()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Coefficients of det(lambda*Id - X), highest degree first, by
/// Faddeev-LeVerrier. Exact-arithmetic recursion in traces of powers; stable
/// for the small well-scaled matrices handled here.
pub fn charpoly_complex(x: &CMat) -> Vec<C64> {
    let n = x.nrows();
    assert_eq!(n, x.ncols(), "charpoly needs a square matrix");
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(c(1.0));
    let mut mk = CMat::identity(n, n);
    for k in 1..=n {
        mk = x * mk;
        let ck = -mk.trace() / c(k as f64);
        coeffs.push(ck);
        for d in 0..n {
            mk[(d, d)] += ck;
        }
    }
    coeffs
}

/// Real parts of the characteristic polynomial coefficients together with the
/// largest imaginary residual (zero up to roundoff for skew-symmetric and
/// skew-Hermitian inputs).
pub fn charpoly_real_parts(x: &CMat) -> (Vec<f64>, f64) {
    let cs = charpoly_complex(x);
    let imag = cs.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    (cs.iter().map(|z| z.re).collect(), imag)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    let se = h.clone().symmetric_eigen();
    let mut ev: Vec<f64> = se.eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// exp(S) for real skew-symmetric S, via the Hermitian eigendecomposition of
/// iS. The result is orthogonal to roundoff.
pub fn exp_skew(s: &RMat) -> RMat {
    let n = s.nrows();
    let h = CMat::from_fn(n, n, |r, col| ci(s[(r, col)]));
    let se = h.symmetric_eigen();
    // iS = U diag(theta) U^*  =>  exp(S) = U diag(exp(-i theta)) U^*
    let mut d = CMat::zeros(n, n);
    for k in 0..n {
        let th = se.eigenvalues[k];
        d[(k, k)] = Complex::new(th.cos(), -th.sin());
    }
    let e = &se.eigenvectors * d * se.eigenvectors.adjoint();
    RMat::from_fn(n, n, |r, col| e[(r, col)].re)
}

/// Orthogonal Q with Q^T X Q block-diagonal: 2x2 blocks [[0, -a], [a, 0]]
/// with a > 0 sorted descending, kernel columns last. X must be real
/// skew-symmetric. Degenerate rotation speeds are paired deterministically
/// inside the eigenspace of -X^2; the caller sees any imprecision in the
/// witness residual.
pub fn skew_canonical_basis(x: &RMat) -> Result<RMat> {
    let n = x.nrows();
    let skew_res = (x + x.transpose()).amax();
    if skew_res > 1e-10 {
        return Err(Error::Domain(format!(
            "skew_canonical_basis: input not skew-symmetric (residual {skew_res:.3e})"
        )));
    }
    let m = -(x * x); // symmetric PSD, eigenvalues a^2 with even multiplicity
    let se = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap());

    let scale = se.eigenvalues.amax().max(1.0);
    let zero_tol = 1e-12 * scale;
    let cluster_tol = 1e-8 * scale;

    let mut q = RMat::zeros(n, n);
    let mut col = 0usize;
    let mut i = 0usize;
    while i < n {
        let lam = se.eigenvalues[order[i]];
        let mut j = i;
        while j < n && (se.eigenvalues[order[j]] - lam).abs() <= cluster_tol {
            j += 1;
        }
        let group: Vec<usize> = order[i..j].to_vec();
        i = j;
        if lam <= zero_tol {
            for &gi in &group {
                q.set_column(col, &se.eigenvectors.column(gi));
                col += 1;
            }
            continue;
        }
        let a = lam.sqrt();
        // pair (v, Xv/a) repeatedly, deflating the eigenspace
        let group_start = col;
        let mut span: Vec<RVec> = group
            .iter()
            .map(|&gi| RVec::from(se.eigenvectors.column(gi)))
            .collect();
        span.reverse(); // pop() walks the group in eigensolver order
        while let Some(mut v) = span.pop() {
            for placed in group_start..col {
                let u = RVec::from(q.column(placed));
                let proj = v.dot(&u);
                v -= proj * u;
            }
            let nv = v.norm();
            if nv < 1e-8 {
                continue; // already covered by a previous pair
            }
            v /= nv;
            let w = (x * &v) / a;
            q.set_column(col, &v);
            q.set_column(col + 1, &w);
            col += 2;
        }
    }
    if col != n {
        return Err(Error::Domain(format!(
            "skew_canonical_basis: pairing produced {col} of {n} columns"
        )));
    }
    Ok(q)
}

/// Unitary U with U^* X U diagonal, eigenvalues of the skew-Hermitian X
/// sorted by imaginary part descending.
pub fn skew_hermitian_diagonalizer(x: &CMat) -> Result<CMat> {
    let herm_res = max_abs(&(x + x.adjoint()));
    if herm_res > 1e-10 {
        return Err(Error::Domain(format!(
            "skew_hermitian_diagonalizer: input not skew-Hermitian (residual {herm_res:.3e})"
        )));
    }
    let n = x.nrows();
    let h = CMat::from_fn(n, n, |r, col| ci(1.0) * x[(r, col)]); // iX Hermitian
    let se = h.symmetric_eigen();
    // eigenvalue of X is -i*theta; sort by Im = -theta descending
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let mut u = CMat::zeros(n, n);
    for (kcol, &idx) in order.iter().enumerate() {
        u.set_column(kcol, &se.eigenvectors.column(idx));
    }
    Ok(u)
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij != c(0.0) {
                for p in 0..br {
                    for q in 0..bc {
                        out[(i * br + p, j * bc + q)] = aij * b[(p, q)];
                    }
                }
            }
        }
    }
    out
}

/// Derivative of the k-fold tensor power representation:
/// sum over positions of Id x .. x X x .. x Id. For k = 0 this is the zero
/// map on a one-dimensional space.
pub fn tensor_power_generator(x: &CMat, k: usize) -> CMat {
    let n = x.nrows();
    if k == 0 {
        return CMat::zeros(1, 1);
    }
    let dim = n.pow(k as u32);
    let mut out = CMat::zeros(dim, dim);
    for pos in 0..k {
        let mut m = CMat::identity(1, 1);
        for q in 0..k {
            if q == pos {
                m = kron(&m, x);
            } else {
                m = kron(&m, &CMat::identity(n, n));
            }
        }
        out += m;
    }
    out
}
