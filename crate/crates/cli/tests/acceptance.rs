//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line with the measured quantity. Criteria marked by their
//! number; tolerances are pinned here, not configurable.

use std::time::Instant;

use nalgebra::{DVector, Vector3};

use isospec::geom::{
    ad_square_trace_identity, barred_lambda, conformal_scal_profile, heat_invariants,
    koszul_connection_and_curvature, metric_from_lambda, ricci_norm_diff_rhs, LambdaMap,
};
use isospec::lie::{MatrixFamily, MatrixLieAlgebra};
use isospec::linalg::{c, ci, CMat};
use isospec::maps::{
    charpoly_coeffs, discriminators, dq_along_y, family_so5, family_so8, family_su3,
    flow_integrate, flow_reference_point, so5_t_domain, su3_t_domain, FlowOptions,
};
use isospec::spectra::{block_laplacian, character_shift_identity, spectrum_report, RepBlock};
use isospec::sphere::{
    fibonacci_sphere, max_scal_preimage, quadratic_form_provider, scal_moments, scal_range,
    scal_s2t2, scal_submersion_oracle, QuadratureRuleS2, SphereQuadMap,
};

fn verdict(criterion: u32, ok: bool, detail: &str) -> bool {
    println!(
        "criterion {criterion:02} [{}] {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn t_grid(domain: (f64, f64), n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| domain.0 + (domain.1 - domain.0) * i as f64 / (n - 1) as f64)
        .collect()
}

#[test]
fn criterion_01_so5_charpoly_certificate() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for t in t_grid(so5_t_domain(), 11) {
        let j = family_so5(t).unwrap();
        for gi in 0..17 {
            for gj in 0..17 {
                let s = -1.0 + 2.0 * gi as f64 / 16.0;
                let u = -1.0 + 2.0 * gj as f64 / 16.0;
                let cp = charpoly_coeffs(&j.image_at(&[s, u]));
                let want = [
                    1.0,
                    0.0,
                    3.0 * s * s + 2.0 * u * u,
                    0.0,
                    (s * s + u * u) * (s * s + u * u),
                    0.0,
                ];
                for (a, b) in cp.iter().zip(want.iter()) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst < 1e-9 && elapsed < 5.0;
    assert!(
        verdict(
            1,
            ok,
            &format!("so(5) charpoly grid residual {worst:.3e}, {elapsed:.2} s")
        ),
        "residual {worst:.3e} elapsed {elapsed:.2}"
    );
}

#[test]
fn criterion_02_norm4_closed_forms() {
    let mut worst: f64 = 0.0;
    for t in t_grid(so5_t_domain(), 11) {
        let d = discriminators(&family_so5(t).unwrap()).unwrap();
        worst = worst.max((d.norm4 - (4.0 * t * t - 4.0 * t + 26.0)).abs());
    }
    for t in t_grid(su3_t_domain(), 11) {
        let d = discriminators(&family_su3(t).unwrap()).unwrap();
        worst = worst.max((d.norm4 - (8.0 - 4.0 * t * t)).abs());
    }
    let ok = worst < 1e-9;
    assert!(verdict(2, ok, &format!("norm4 residual {worst:.3e}")));
}

#[test]
fn criterion_03_dq_240() {
    let (j1, j2) = flow_reference_point();
    let v = dq_along_y(&j1, &j2, 5);
    let err = (v - c(240.0)).norm();
    let ok = err < 1e-9;
    assert!(verdict(
        3,
        ok,
        &format!("dq.Y = {} (error {err:.3e})", v.re)
    ));
}

#[test]
fn criterion_04_ad_square_trace_identity_bruteforce() {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    let start = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for fam in [
        MatrixFamily::SoN(5),
        MatrixFamily::SoN(8),
        MatrixFamily::SuN(3),
        MatrixFamily::SuN(6),
    ] {
        let n = fam.matrix_size();
        let alg = MatrixLieAlgebra::standard_basis(fam, n).unwrap();
        for _ in 0..20 {
            let (x, y) = match fam {
                MatrixFamily::SoN(_) => {
                    let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                        let mut m = CMat::zeros(n, n);
                        for a in 0..n {
                            for b in (a + 1)..n {
                                let v = rng.gen_range(-1.0..1.0);
                                m[(a, b)] = c(v);
                                m[(b, a)] = c(-v);
                            }
                        }
                        m
                    };
                    (mk(&mut rng), mk(&mut rng))
                }
                MatrixFamily::SuN(_) => {
                    let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                        let mut m = CMat::zeros(n, n);
                        for a in 0..n {
                            for b in (a + 1)..n {
                                let re = rng.gen_range(-1.0..1.0);
                                let im = rng.gen_range(-1.0..1.0);
                                m[(a, b)] = nalgebra::Complex::new(re, im);
                                m[(b, a)] = nalgebra::Complex::new(-re, im);
                            }
                        }
                        let mut tot = 0.0;
                        for a in 0..n - 1 {
                            let v = rng.gen_range(-1.0..1.0);
                            m[(a, a)] = ci(v);
                            tot += v;
                        }
                        m[(n - 1, n - 1)] = ci(-tot);
                        m
                    };
                    (mk(&mut rng), mk(&mut rng))
                }
            };
            let ax = alg.ad_matrix(&x).unwrap();
            let ay = alg.ad_matrix(&y).unwrap();
            let brute = (&ax * &ax * &ay * &ay).trace();
            let closed = ad_square_trace_identity(fam, &x, &y).unwrap();
            worst = worst.max((brute - closed).abs() / brute.abs().max(1e-12));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst < 1e-10 && elapsed < 10.0;
    assert!(
        verdict(
            4,
            ok,
            &format!("trace identity relative error {worst:.3e}, {elapsed:.2} s")
        ),
        "worst {worst:.3e} elapsed {elapsed:.2}"
    );
}

#[test]
fn criterion_05_ricci_norm_identity() {
    let lm0 = LambdaMap::from_jmap(&family_so5(0.0).unwrap()).unwrap();
    let kos0 = koszul_connection_and_curvature(&metric_from_lambda(lm0.clone()).unwrap());
    let mut worst_gap: f64 = 0.0;
    let mut min_diff = f64::INFINITY;
    for t in [0.1, 0.3] {
        let lm = LambdaMap::from_jmap(&family_so5(t).unwrap()).unwrap();
        let kos = koszul_connection_and_curvature(&metric_from_lambda(lm.clone()).unwrap());
        let lhs = kos0.ric_norm_sq - kos.ric_norm_sq;
        let rhs = ricci_norm_diff_rhs(&lm0, &lm);
        worst_gap = worst_gap.max((lhs - rhs).abs());
        min_diff = min_diff.min(lhs.abs());
    }
    let ok = worst_gap < 1e-8 && min_diff > 1e-4;
    assert!(verdict(
        5,
        ok,
        &format!("identity gap {worst_gap:.3e}, smallest |difference| {min_diff:.3e}")
    ));
}

#[test]
fn criterion_06_heat_invariants() {
    let reports: Vec<_> = [0.0, 0.1, 0.3]
        .iter()
        .map(|&t| {
            heat_invariants(
                &metric_from_lambda(LambdaMap::from_jmap(&family_so5(t).unwrap()).unwrap())
                    .unwrap(),
            )
        })
        .collect();
    let mut scal_dev: f64 = 0.0;
    let mut a20_dev: f64 = 0.0;
    let mut a21_dev: f64 = 0.0;
    for r in &reports[1..] {
        scal_dev = scal_dev.max((r.scal - reports[0].scal).abs());
        a20_dev = a20_dev.max((r.a2_0 - reports[0].a2_0).abs());
        a21_dev = a21_dev.max((r.a2_1 - reports[0].a2_1).abs());
    }
    let ok = scal_dev < 1e-8 && a20_dev < 1e-8 && a21_dev > 1e-6;
    assert!(verdict(
        6,
        ok,
        &format!("scal dev {scal_dev:.3e}, a2_0 dev {a20_dev:.3e}, a2_1 variation {a21_dev:.3e}")
    ));
}

#[test]
fn criterion_07_block_spectra() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut largest_dim = 0usize;
    // product layout so(5) + R^2
    let mus: [[i64; 2]; 5] = [[0, 0], [1, 0], [0, 1], [1, 1], [2, 1]];
    for k in [1usize, 2] {
        for mu in mus {
            let block = RepBlock::product(k, mu.to_vec(), 5).unwrap();
            largest_dim = largest_dim.max(block.dim);
            let mut base: Option<Vec<f64>> = None;
            for t in [0.0, 0.1, 0.3] {
                let lm = LambdaMap::from_jmap(&family_so5(t).unwrap()).unwrap();
                let rep = spectrum_report(&block, &block_laplacian(&lm, &block)).unwrap();
                match &base {
                    None => base = Some(rep.eigenvalues),
                    Some(b) => {
                        for (x, y) in b.iter().zip(rep.eigenvalues.iter()) {
                            worst = worst.max((x - y).abs());
                        }
                    }
                }
            }
        }
    }
    // embedded so(8) layout
    for k in [1usize, 2] {
        let block = RepBlock::embedded(k, 8).unwrap();
        largest_dim = largest_dim.max(block.dim);
        let mut base: Option<Vec<f64>> = None;
        for t in [0.0, 0.3] {
            let lm = LambdaMap::from_jmap(&family_so8(t).unwrap()).unwrap();
            let rep = spectrum_report(&block, &block_laplacian(&lm, &block)).unwrap();
            match &base {
                None => base = Some(rep.eigenvalues),
                Some(b) => {
                    for (x, y) in b.iter().zip(rep.eigenvalues.iter()) {
                        worst = worst.max((x - y).abs());
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst < 1e-8 && largest_dim <= 64 && elapsed < 60.0;
    assert!(
        verdict(
            7,
            ok,
            &format!(
                "max spectral deviation {worst:.3e}, largest block {largest_dim}, {elapsed:.2} s"
            )
        ),
        "worst {worst:.3e}"
    );
}

#[test]
fn criterion_08_character_shift_identity() {
    let mut worst: f64 = 0.0;
    let mus: [[i64; 2]; 5] = [[0, 0], [1, 0], [0, 1], [1, 1], [2, 1]];
    for t in [0.0, 0.1, 0.3] {
        let lm = LambdaMap::from_jmap(&family_so5(t).unwrap()).unwrap();
        for k in [1usize, 2] {
            for mu in mus {
                let block = RepBlock::product(k, mu.to_vec(), 5).unwrap();
                worst = worst.max(character_shift_identity(&lm, &block).unwrap());
            }
        }
    }
    let ok = worst < 1e-10;
    assert!(verdict(
        8,
        ok,
        &format!("operator identity residual {worst:.3e}")
    ));
}

#[test]
fn criterion_09_sphere_closed_form_vs_oracle() {
    let (cmap, cpmap) = SphereQuadMap::explicit_pair();
    let mut worst: f64 = 0.0;
    for m in [&cmap, &cpmap] {
        let provider = quadratic_form_provider(m.clone());
        for p in fibonacci_sphere(100) {
            let pv = DVector::from_column_slice(p.as_slice());
            let fd = scal_submersion_oracle(&provider, 2.0, &pv, 1e-5).unwrap();
            worst = worst.max((fd - scal_s2t2(m, &p).unwrap()).abs());
        }
    }
    // c = 0 gives exactly 2
    let zero = SphereQuadMap::new(nalgebra::Matrix3::zeros(), nalgebra::Matrix3::zeros()).unwrap();
    let exact = (scal_s2t2(&zero, &Vector3::new(0.0, 0.0, 1.0)).unwrap() - 2.0).abs();
    let ok = worst < 1e-6 && exact == 0.0;
    assert!(verdict(
        9,
        ok,
        &format!("oracle gap {worst:.3e}, round-sphere exactness {exact:.1e}")
    ));
}

#[test]
fn criterion_10_preimage_dimensions() {
    let (cmap, cpmap) = SphereQuadMap::explicit_pair();
    let rep_c = max_scal_preimage(&cmap, 1e-3, 1e-6);
    let rep_cp = max_scal_preimage(&cpmap, 1e-3, 1e-6);
    let dims_c: Vec<usize> = rep_c.clusters.iter().map(|cl| cl.est_dim).collect();
    let dims_cp: Vec<usize> = rep_cp.clusters.iter().map(|cl| cl.est_dim).collect();
    // printed sets: circle + two isolated points vs two isolated points
    let mut ok = dims_c.iter().filter(|&&d| d == 1).count() == 1
        && dims_c.iter().filter(|&&d| d == 0).count() == 2
        && dims_cp.len() == 2
        && dims_cp.iter().all(|&d| d == 0);
    for cl in &rep_c.clusters {
        if cl.est_dim == 0 {
            let want = Vector3::new(1.0, 0.0, 1.0) / 2f64.sqrt();
            let d = (cl.centroid_direction - want)
                .norm()
                .min((cl.centroid_direction + want).norm());
            ok &= d < 1e-3;
        }
    }
    for cl in &rep_cp.clusters {
        let want = Vector3::new(0.0, 1.0, 0.0);
        let d = (cl.centroid_direction - want)
            .norm()
            .min((cl.centroid_direction + want).norm());
        ok &= d < 1e-3;
    }
    assert!(verdict(
        10,
        ok,
        &format!("cluster dims c: {dims_c:?}, c': {dims_cp:?}")
    ));
}

#[test]
fn criterion_11_moments_and_ranges() {
    let (cmap, cpmap) = SphereQuadMap::explicit_pair();
    let rule = QuadratureRuleS2::with_exactness(26);
    let ma = scal_moments(&cmap, 6, &rule).unwrap();
    let mb = scal_moments(&cpmap, 6, &rule).unwrap();
    let mut worst_rel: f64 = 0.0;
    for (a, b) in ma.iter().zip(mb.iter()) {
        worst_rel = worst_rel.max((a - b).abs() / a.abs().max(1e-300));
    }
    let ra = scal_range(&cmap, 400_000);
    let rb = scal_range(&cpmap, 400_000);
    let range_gap = (ra.min - rb.min).abs().max((ra.max - rb.max).abs());
    let ok = worst_rel < 1e-9 && range_gap < 1e-6;
    assert!(verdict(
        11,
        ok,
        &format!("moment relative gap {worst_rel:.3e}, range gap {range_gap:.3e}")
    ));
}

#[test]
fn criterion_12_flow_certificate() {
    // stated configuration: exponent-5 field, T = 0.2, dt = 1e-3, from the
    // dq = 240 point; drift budget 1e-6, q movement above 1e-3
    let (j1, j2) = flow_reference_point();
    let opts = FlowOptions {
        exponent: 5,
        drift_budget: None,
        word_cap: Some(3),
    };
    let res = flow_integrate(&j1, &j2, 0.2, 1e-3, &opts).unwrap();
    let ok = res.max_pab_drift < 1e-6 && res.q_change > 1e-3;
    let detail = format!(
        "p_ab drift {:.3e} (budget 1e-6), q change {:.3e}",
        res.max_pab_drift, res.q_change
    );
    if !ok {
        // the stated step size under-resolves the exponent-5 field; a tenth
        // of it conserves the invariants, reported here for the record
        let fine = flow_integrate(&j1, &j2, 0.2, 1e-4, &opts).unwrap();
        println!(
            "criterion 12 [note] dt=1e-4 reference run: drift {:.3e}, q change {:.3e}",
            fine.max_pab_drift, fine.q_change
        );
    }
    assert!(verdict(12, ok, &detail), "{detail}");
}

#[test]
fn criterion_13_schur_block() {
    let j = family_so5(0.0).unwrap();
    let zero: Vec<CMat> = (0..2).map(|_| CMat::zeros(5, 5)).collect();
    let jz = isospec::maps::JMap::new(j.algebra().clone(), j.torus().clone(), zero).unwrap();
    let lm = LambdaMap::from_jmap(&jz).unwrap();
    let block = RepBlock::product(1, vec![0, 0], 5).unwrap();
    let op = block_laplacian(&lm, &block);
    let scalar = op[(0, 0)];
    let mut off: f64 = 0.0;
    for r in 0..5 {
        for cl in 0..5 {
            let want = if r == cl { scalar } else { c(0.0) };
            off = off.max((op[(r, cl)] - want).norm());
        }
    }
    let ok = off < 1e-10;
    assert!(verdict(
        13,
        ok,
        &format!(
            "Casimir scalar {}, off-scalar residual {off:.3e}",
            scalar.re
        )
    ));
}

#[test]
fn criterion_14_conformal_localization() {
    let la = LambdaMap::from_jmap(&family_so5(0.0).unwrap()).unwrap();
    let lb = LambdaMap::from_jmap(&family_so5(0.1).unwrap()).unwrap();
    let metric = metric_from_lambda(barred_lambda(&la, &lb).unwrap()).unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    for factor in [1usize, 2] {
        let profile = conformal_scal_profile(&metric, 0.1, factor).unwrap();
        ok &= profile.bound_ok;
        let loc = profile.localize_max(2024, 10_000);
        ok &= loc.refined_distance_to_identity < 1e-3;
        ok &= loc.sampled_max <= loc.scal_at_identity + 1e-12;
        details.push(format!(
            "factor {factor}: alpha/beta {:.4} <= {:.4}, |x*-Id| {:.2e}",
            profile.alpha / profile.beta,
            profile.bound_rhs,
            loc.refined_distance_to_identity
        ));
    }
    assert!(verdict(14, ok, &details.join("; ")));
}

#[test]
fn criterion_15_determinism() {
    use isospec_cli::config::ExperimentConfig;
    use isospec_cli::run::run;
    let configs = [
        r#"{"schema": 1, "command": "verify-family", "family": "so5", "t_values": [0.0, 0.1, 0.3], "seed": 11}"#,
        r#"{"schema": 1, "command": "heat", "family": "so5", "t_values": [0.0, 0.1, 0.3], "seed": 11}"#,
        r#"{"schema": 1, "command": "spectra", "family": "su3", "t_values": [0.0, 0.2], "blocks": [[1, [1, 0]]], "seed": 11}"#,
        r#"{"schema": 1, "command": "conformal", "family": "so5", "t_values": [0.0, 0.1], "seed": 11, "conformal": {"eps": 0.1, "factor_index": 1, "samples": 500}}"#,
        r#"{"schema": 1, "command": "sphere", "seed": 11, "sphere": {"resolution": 0.01, "band": 1e-6, "k_max": 6, "exactness": 26}}"#,
    ];
    let mut ok = true;
    for raw in configs {
        let cfg = ExperimentConfig::parse(raw).unwrap();
        let a = run(&cfg, raw, 1).unwrap();
        let b = run(&cfg, raw, 2).unwrap();
        let ja = a.report.to_json();
        let jb = b.report.to_json();
        ok &= ja == jb;
        for ((na, ca), (nb, cb)) in a.artifacts.files.iter().zip(b.artifacts.files.iter()) {
            ok &= na == nb && ca == cb;
        }
    }
    assert!(verdict(
        15,
        ok,
        &format!("{} pipelines re-run byte-identically", configs.len())
    ));
}
