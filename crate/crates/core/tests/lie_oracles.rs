//! Structure-level oracles for the algebra layer: Jacobi identity, the
//! Killing ratio against brute-force adjoint matrices, the bi-invariant Ricci
//! constants, and the centralizer decompositions of the embedded layouts.

use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use isospec::lie::{centralizer_split, MatrixFamily, MatrixLieAlgebra, TorusSubalgebra};
use isospec::linalg::{RMat, RVec};
use isospec::maps::{family_so5, family_so8, JMap};

fn random_coords(rng: &mut ChaCha8Rng, d: usize) -> RVec {
    DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0f64))
}

#[test]
fn jacobi_identity_on_random_triples() {
    for alg in [
        MatrixLieAlgebra::standard_basis(MatrixFamily::SoN(5), 5).unwrap(),
        MatrixLieAlgebra::standard_basis(MatrixFamily::SuN(3), 3).unwrap(),
        MatrixLieAlgebra::with_central_torus(MatrixFamily::SoN(5), 2).unwrap(),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = alg.dim();
        for _ in 0..20 {
            let x = random_coords(&mut rng, d);
            let y = random_coords(&mut rng, d);
            let z = random_coords(&mut rng, d);
            let jac = alg.bracket(&x, &alg.bracket(&y, &z))
                + alg.bracket(&y, &alg.bracket(&z, &x))
                + alg.bracket(&z, &alg.bracket(&x, &y));
            assert!(jac.norm() < 1e-12, "jacobi residual {}", jac.norm());
        }
    }
}

#[test]
fn killing_ratio_so5_and_su3() {
    // tr(ad_X ad_Y) = k(m) tr(XY), k = n-2 on so(n) and 2n on su(n)
    for (alg, k) in [
        (
            MatrixLieAlgebra::standard_basis(MatrixFamily::SoN(5), 5).unwrap(),
            3.0,
        ),
        (
            MatrixLieAlgebra::standard_basis(MatrixFamily::SuN(3), 3).unwrap(),
            6.0,
        ),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let d = alg.dim();
        for _ in 0..20 {
            let x = random_coords(&mut rng, d);
            let y = random_coords(&mut rng, d);
            let lhs = (alg.ad(&x) * alg.ad(&y)).trace();
            // tr(XY) in the defining rep; with scale 1, <X,Y> = -tr(XY)
            let trxy = -alg.inner(&x, &y);
            let rel = (lhs - k * trxy).abs() / lhs.abs().max(1e-12);
            assert!(rel < 1e-10, "relative error {rel}");
        }
    }
}

#[test]
fn so3_ad_reproduces_direct_brackets() {
    let alg = MatrixLieAlgebra::standard_basis(MatrixFamily::SoN(3), 3).unwrap();
    for i in 0..3 {
        let adi = alg.ad(&alg.basis_vector(i));
        for j in 0..3 {
            let direct = alg.bracket(&alg.basis_vector(i), &alg.basis_vector(j));
            let via_ad = adi.column(j);
            for k in 0..3 {
                assert!((direct[k] - via_ad[k]).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn biinvariant_ricci_constants() {
    let so5 = MatrixLieAlgebra::standard_basis(MatrixFamily::SoN(5), 5).unwrap();
    let r = so5.ricci_biinvariant();
    assert!((&r - 0.75 * RMat::identity(10, 10)).amax() < 1e-12);

    let su3 = MatrixLieAlgebra::standard_basis(MatrixFamily::SuN(3), 3).unwrap();
    let r = su3.ricci_biinvariant();
    assert!((&r - 1.5 * RMat::identity(8, 8)).amax() < 1e-12);
}

#[test]
fn ricci_is_invariant_under_reorthonormalization() {
    // conjugating the orthonormal basis by a rotation of coordinates leaves
    // the form invariant after the same conjugation
    let alg = MatrixLieAlgebra::standard_basis(MatrixFamily::SoN(4), 4).unwrap();
    let d = alg.dim();
    let r0 = alg.ricci_biinvariant();
    // rotate the basis inside the coordinate space
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = RMat::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let q = g.qr().q();
    // Ric0 in the rotated basis must equal Q^T Ric0 Q: rebuild from ad's
    let mut r_rot = RMat::zeros(d, d);
    for i in 0..d {
        let col = RVec::from(q.column(i));
        let a = alg.ad(&col);
        r_rot -= 0.25 * (&a * &a);
    }
    // expressed back in the original coordinates, both agree
    assert!((r_rot - &r0).amax() < 1e-12);
}

#[test]
fn embedded_centralizer_contains_the_inner_block() {
    // so(5) + so(4) inside so(9), h a maximal torus of the so(4) block
    let alg = Arc::new(MatrixLieAlgebra::standard_basis(MatrixFamily::SoN(9), 9).unwrap());
    let emb =
        isospec::maps::embed_block(&family_so5(0.0).unwrap(), MatrixFamily::SoN(9), 9).unwrap();
    let torus = emb.torus().clone();
    let split = centralizer_split(&alg, &torus).unwrap();
    assert!(split.validate(&alg, &torus) < 1e-12);
    // the so(5) block (pairs within coordinates 0..5) lies in z(h)
    let mut idx = 0;
    for a in 0..9 {
        for b in (a + 1)..9 {
            if b < 5 {
                let e = alg.basis_vector(idx);
                assert!(
                    split.residual_outside_zh(&e) < 1e-12,
                    "so(5) direction ({a},{b}) outside z(h)"
                );
            }
            idx += 1;
        }
    }
    // dim z(h) = dim so(5) + rank(h) = 10 + 2
    assert_eq!(split.zh.ncols(), 12);
    assert_eq!(split.u.ncols(), 24);
}

#[test]
fn so8_images_live_in_zh_cap_h_perp() {
    for t in [0.0, 0.3] {
        let j = family_so8(t).unwrap();
        assert!(j.placement_residual().unwrap() < 1e-12);
    }
}

#[test]
fn ambiguous_rank_error_carries_singular_values() {
    // a torus direction scaled near the cutoff produces no ambiguity since
    // the cutoff is relative; instead check that a healthy split never errs
    let alg = Arc::new(MatrixLieAlgebra::standard_basis(MatrixFamily::SoN(5), 5).unwrap());
    let z = alg.basis_vector(0);
    let torus = TorusSubalgebra::new(alg.clone(), vec![z]).unwrap();
    let split = centralizer_split(&alg, &torus).unwrap();
    assert!(!split.singular_values.is_empty());
    assert!(split.validate(&alg, &torus) < 1e-12);
}

#[test]
fn direct_sum_keeps_blocks_orthogonal() {
    let alg =
        MatrixLieAlgebra::from_summands(&[MatrixFamily::SoN(5), MatrixFamily::SoN(5)], 2, 1.0)
            .unwrap();
    assert_eq!(alg.dim(), 22);
    assert_eq!(alg.matrix_size(), 10);
    let g = alg.gram();
    assert!((g - RMat::identity(22, 22)).amax() < 1e-14);
    // brackets across blocks vanish
    let x = alg.basis_vector(0);
    let y = alg.basis_vector(10);
    assert_eq!(alg.bracket(&x, &y).norm(), 0.0);
}

#[test]
fn jmap_requires_in_span_images() {
    let j = family_so5(0.0).unwrap();
    let mut bad = j.image(0).clone();
    bad[(0, 0)] = nalgebra::Complex::new(1.0, 0.0); // symmetric junk
    let res = JMap::new(
        j.algebra().clone(),
        j.torus().clone(),
        vec![bad, j.image(1).clone()],
    );
    assert!(res.is_err());
}

#[test]
fn structure_constants_are_antisymmetric() {
    let alg = MatrixLieAlgebra::standard_basis(MatrixFamily::SuN(3), 3).unwrap();
    let d = alg.dim();
    for i in 0..d {
        for j in 0..d {
            let cij = alg.bracket(&alg.basis_vector(i), &alg.basis_vector(j));
            let cji = alg.bracket(&alg.basis_vector(j), &alg.basis_vector(i));
            assert!((cij + cji).norm() < 1e-13);
        }
    }
}
