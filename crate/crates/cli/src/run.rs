//! Pipeline dispatch: each command wires the core modules into a RunReport
//! plus optional CSV side files, deterministically for a given (config, seed).

use std::path::{Path, PathBuf};

use nalgebra::DVector;
use sha2::{Digest, Sha256};

use isospec::geom::{
    barred_lambda, conformal_scal_profile, heat_invariants, koszul_connection_and_curvature,
    metric_from_lambda, ricci, ricci_norm_diff_rhs, verify_conjugacy_condition, LambdaMap,
};
use isospec::maps::{
    conjugator_witness, discriminators, flow_integrate, flow_reference_point, is_isospectral_pair,
    FlowOptions, IsospectralFamily,
};
use isospec::spectra::{
    block_laplacian, character_shift_identity, spectrum_report, BlockLayout, RepBlock,
};
use isospec::sphere::{
    check_c_pair, max_scal_preimage, quadratic_form_provider, scal_moments, scal_range, scal_s2t2,
    scal_submersion_oracle, QuadratureRuleS2, SphereQuadMap,
};
use isospec::{Error, Result};

use crate::config::{Command, ExperimentConfig};
use crate::report::{csv_table, fmt_f64, CheckRecord, RunReport, Value};

/// Side files produced by a run, with deterministic contents.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
}

pub struct RunOutcome {
    pub report: RunReport,
    pub artifacts: Artifacts,
}

pub fn config_hash(raw: &str) -> String {
    let mut h = Sha256::new();
    h.update(raw.as_bytes());
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn family_lambda(key: &str, t: f64) -> Result<LambdaMap> {
    let fam = IsospectralFamily::builtin(key)?;
    LambdaMap::from_jmap(&fam.eval(t)?)
}

fn default_ts(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.t_values.is_empty() {
        vec![0.0, 0.1, 0.3]
    } else {
        cfg.t_values.clone()
    }
}

fn family_key(cfg: &ExperimentConfig) -> Result<String> {
    cfg.family
        .clone()
        .ok_or_else(|| Error::Config("this command needs a family".into()))
}

/// Executes the configured pipeline. Deterministic given (config, seed).
pub fn run(cfg: &ExperimentConfig, raw_config: &str, jobs: usize) -> Result<RunOutcome> {
    let mut checks = Vec::new();
    let mut payload = Vec::new();
    let mut artifacts = Artifacts::default();
    match cfg.command {
        Command::VerifyFamily => {
            let key = family_key(cfg)?;
            let fam = IsospectralFamily::builtin(&key)?;
            let ts = default_ts(cfg);
            let tol = cfg.tolerance("charpoly", 1e-9);
            let base = fam.eval(ts[0])?;
            for &t in &ts[1..] {
                let jt = fam.eval(t)?;
                let cert = is_isospectral_pair(&base, &jt, 17, tol)?;
                checks.push(CheckRecord::max(
                    format!("charpoly-grid t={t}"),
                    cert.max_charpoly_residual,
                    tol,
                ));
                checks.push(CheckRecord::max(
                    format!("p-ab t={t}"),
                    cert.max_pab_residual,
                    tol.max(1e-9),
                ));
            }
            let mut curve = Vec::new();
            for &t in &ts {
                let d = discriminators(&fam.eval(t)?)?;
                curve.push(Value::Map(vec![
                    ("t".into(), Value::Num(t)),
                    ("q".into(), Value::Num(d.q)),
                    ("norm4".into(), Value::Num(d.norm4)),
                ]));
            }
            payload.push(("discriminators".into(), Value::List(curve)));
        }
        Command::Witness => {
            let key = family_key(cfg)?;
            let fam = IsospectralFamily::builtin(&key)?;
            let ts = default_ts(cfg);
            let tol = cfg.tolerance("witness", 1e-8);
            let base = fam.eval(ts[0])?;
            for &t in &ts[1..] {
                let jt = fam.eval(t)?;
                for s in 0..base.rank() {
                    let w = conjugator_witness(base.image(s), jt.image(s))?;
                    checks.push(CheckRecord::max(
                        format!("witness Z{} t={t}", s + 1),
                        w.residual,
                        tol,
                    ));
                    checks.push(CheckRecord::max(
                        format!("witness-unitarity Z{} t={t}", s + 1),
                        w.unitary_residual,
                        1e-12,
                    ));
                }
            }
        }
        Command::Curvature => {
            let key = family_key(cfg)?;
            let ts = default_ts(cfg);
            let tol17 = cfg.tolerance("ricci-cross-check", 1e-8);
            let tol11 = cfg.tolerance("ricci-norm-identity", 1e-8);
            let mut records = Vec::new();
            let mut tensors = Vec::new();
            for &t in &ts {
                let lm = family_lambda(&key, t)?;
                let metric = metric_from_lambda(lm.clone())?;
                let kos = koszul_connection_and_curvature(&metric);
                let alg_ric = ricci(&metric);
                checks.push(CheckRecord::max(
                    format!("koszul-vs-algebraic t={t}"),
                    (&kos.ricci - &alg_ric).amax(),
                    tol17,
                ));
                records.push(Value::Map(vec![
                    ("family".into(), Value::Str(key.clone())),
                    ("t".into(), Value::Num(t)),
                    ("scal".into(), Value::Num(kos.scal)),
                    ("ric_norm_sq".into(), Value::Num(kos.ric_norm_sq)),
                    ("riem_norm_sq".into(), Value::Num(kos.riem_norm_sq)),
                ]));
                tensors.push((t, lm, kos));
            }
            let conj_tol = cfg.tolerance("conjugacy", 1e-9);
            for (t, lm, kos) in tensors.iter().skip(1) {
                let (t0, lm0, kos0) = &tensors[0];
                let rep = verify_conjugacy_condition(lm0, lm, 7, conj_tol)?;
                checks.push(CheckRecord::flag(
                    format!("conjugacy ({t0},{t})"),
                    rep.passes,
                    rep.max_charpoly_residual,
                ));
                let lhs = kos0.ric_norm_sq - kos.ric_norm_sq;
                let rhs = ricci_norm_diff_rhs(lm0, lm);
                checks.push(CheckRecord::max(
                    format!("ricci-norm-identity ({t0},{t})"),
                    (lhs - rhs).abs(),
                    tol11,
                ));
            }
            payload.push(("records".into(), Value::List(records)));
        }
        Command::Heat => {
            let key = family_key(cfg)?;
            let ts = default_ts(cfg);
            let const_tol = cfg.tolerance("heat-constancy", 1e-8);
            let vary_floor = cfg.tolerance("a21-variation", 1e-6);
            let mut reports = Vec::new();
            let mut records = Vec::new();
            for &t in &ts {
                let metric = metric_from_lambda(family_lambda(&key, t)?)?;
                let hr = heat_invariants(&metric);
                records.push(Value::Map(vec![
                    ("family".into(), Value::Str(key.clone())),
                    ("t".into(), Value::Num(t)),
                    ("scal".into(), Value::Num(hr.scal)),
                    ("ric_norm_sq".into(), Value::Num(hr.ric_norm_sq)),
                    ("riem_norm_sq".into(), Value::Num(hr.riem_norm_sq)),
                    ("a0".into(), Value::Num(hr.a0)),
                    ("a1".into(), Value::Num(hr.a1)),
                    ("a2_0".into(), Value::Num(hr.a2_0)),
                    ("a2_1".into(), Value::Num(hr.a2_1)),
                ]));
                reports.push((t, hr));
            }
            let base = &reports[0].1;
            let mut max_scal_dev: f64 = 0.0;
            let mut max_a20_dev: f64 = 0.0;
            let mut max_a21_dev: f64 = 0.0;
            for (_, hr) in &reports[1..] {
                max_scal_dev = max_scal_dev.max((hr.scal - base.scal).abs());
                max_a20_dev = max_a20_dev.max((hr.a2_0 - base.a2_0).abs());
                max_a21_dev = max_a21_dev.max((hr.a2_1 - base.a2_1).abs());
            }
            checks.push(CheckRecord::max("scal-constancy", max_scal_dev, const_tol));
            checks.push(CheckRecord::max("a2_0-constancy", max_a20_dev, const_tol));
            checks.push(CheckRecord::min("a2_1-variation", max_a21_dev, vary_floor));
            payload.push(("records".into(), Value::List(records)));
        }
        Command::Flow => {
            let section = cfg
                .flow
                .clone()
                .ok_or_else(|| Error::Config("flow command needs the flow section".into()))?;
            let (j1, j2) = flow_reference_point();
            let opts = FlowOptions {
                exponent: section.exponent,
                drift_budget: None,
                word_cap: section.word_cap,
            };
            let res = flow_integrate(&j1, &j2, section.total_time, section.dt, &opts)?;
            let drift_tol = cfg.tolerance("flow-drift", 1e-6);
            let q_floor = cfg.tolerance("flow-q-change", 1e-3);
            checks.push(CheckRecord::max("p-ab-drift", res.max_pab_drift, drift_tol));
            checks.push(CheckRecord::min("q-change", res.q_change, q_floor));
            payload.push((
                "flow".into(),
                Value::Map(vec![
                    ("total_time".into(), Value::Num(section.total_time)),
                    ("dt".into(), Value::Num(section.dt)),
                    ("exponent".into(), Value::Int(section.exponent as i64)),
                    ("steps".into(), Value::Int((res.samples.len() - 1) as i64)),
                ]),
            ));
        }
        Command::Sphere => {
            let section = cfg.sphere.clone().unwrap_or_default();
            let (c, cp) = SphereQuadMap::explicit_pair();
            let chk = check_c_pair(&c, &cp, 17, cfg.tolerance("cond1", 1e-9));
            checks.push(CheckRecord::max(
                "cond1-charpoly-grid",
                chk.max_charpoly_residual,
                cfg.tolerance("cond1", 1e-9),
            ));
            if let Some((_, _, resid)) = chk.normal_form_invariants {
                for (i, r) in resid.iter().enumerate() {
                    checks.push(CheckRecord::max(
                        format!("normal-form-invariant-{}", i + 1),
                        r.abs(),
                        1e-12,
                    ));
                }
            }
            checks.push(CheckRecord::min(
                "discriminator-separation",
                (chk.discriminator.0 - chk.discriminator.1).abs(),
                cfg.tolerance("discriminator", 1.0),
            ));
            let rule = QuadratureRuleS2::with_exactness(section.exactness);
            let ma = scal_moments(&c, section.k_max, &rule)?;
            let mb = scal_moments(&cp, section.k_max, &rule)?;
            let mut worst_rel: f64 = 0.0;
            for (a, b) in ma.iter().zip(mb.iter()) {
                worst_rel = worst_rel.max((a - b).abs() / a.abs().max(1e-300));
            }
            checks.push(CheckRecord::max(
                "moment-agreement",
                worst_rel,
                cfg.tolerance("moments", 1e-9),
            ));
            let ra = scal_range(&c, 200_000);
            let rb = scal_range(&cp, 200_000);
            checks.push(CheckRecord::max(
                "range-agreement",
                (ra.min - rb.min).abs().max((ra.max - rb.max).abs()),
                cfg.tolerance("range", 1e-6),
            ));
            // oracle cross-check on a short deterministic sample
            let prov = quadratic_form_provider(c.clone());
            let pts = isospec::sphere::fibonacci_sphere(100);
            let mut worst_fd: f64 = 0.0;
            for p in &pts {
                let pv = DVector::from_column_slice(p.as_slice());
                let fd = scal_submersion_oracle(&prov, 2.0, &pv, 1e-5)?;
                worst_fd = worst_fd.max((fd - scal_s2t2(&c, p)?).abs());
            }
            checks.push(CheckRecord::max(
                "closed-form-vs-oracle",
                worst_fd,
                cfg.tolerance("oracle", 1e-6),
            ));
            let rep_c = max_scal_preimage(&c, section.resolution, section.band);
            let rep_cp = max_scal_preimage(&cp, section.resolution, section.band);
            let dims_c: Vec<usize> = rep_c.clusters.iter().map(|cl| cl.est_dim).collect();
            let dims_cp: Vec<usize> = rep_cp.clusters.iter().map(|cl| cl.est_dim).collect();
            checks.push(CheckRecord::flag(
                "preimage-dims-c",
                dims_c.contains(&1) && dims_c.iter().filter(|&&d| d == 0).count() == 2,
                dims_c.len() as f64,
            ));
            checks.push(CheckRecord::flag(
                "preimage-dims-cprime",
                dims_cp.iter().all(|&d| d == 0) && dims_cp.len() == 2,
                dims_cp.len() as f64,
            ));
            for (name, rep) in [
                ("sphere_samples_c.csv", &rep_c),
                ("sphere_samples_cprime.csv", &rep_cp),
            ] {
                let rows: Vec<Vec<String>> = rep
                    .members
                    .iter()
                    .map(|(p, v, cid)| {
                        vec![
                            fmt_f64(p[0]),
                            fmt_f64(p[1]),
                            fmt_f64(p[2]),
                            fmt_f64(*v),
                            cid.to_string(),
                        ]
                    })
                    .collect();
                artifacts.files.push((
                    name.to_string(),
                    csv_table(&["px", "py", "pz", "scal", "cluster_id"], &rows),
                ));
            }
            let moment_table = Value::List(
                ma.iter()
                    .zip(mb.iter())
                    .enumerate()
                    .map(|(i, (a, b))| {
                        Value::Map(vec![
                            ("k".into(), Value::Int(i as i64 + 1)),
                            ("c".into(), Value::Num(*a)),
                            ("c_prime".into(), Value::Num(*b)),
                        ])
                    })
                    .collect(),
            );
            payload.push(("moments".into(), moment_table));
        }
        Command::Spectra => {
            let key = family_key(cfg)?;
            let fam = IsospectralFamily::builtin(&key)?;
            let ts = default_ts(cfg);
            let tol = cfg.tolerance("spectra", 1e-8);
            let probe = fam.eval(ts[0])?;
            let embedded = !probe.torus().is_central();
            let n = probe.algebra().matrix_size();
            let blocks: Vec<RepBlock> = if cfg.blocks.is_empty() {
                if embedded {
                    vec![RepBlock::embedded(1, n)?, RepBlock::embedded(2, n)?]
                } else {
                    [1usize, 2]
                        .iter()
                        .flat_map(|&k| {
                            [[0i64, 0], [1, 0], [0, 1], [1, 1], [2, 1]]
                                .iter()
                                .map(move |mu| RepBlock::product(k, mu.to_vec(), n))
                                .collect::<Vec<_>>()
                        })
                        .collect::<Result<Vec<_>>>()?
                }
            } else {
                cfg.blocks
                    .iter()
                    .map(|(k, mu)| {
                        if embedded {
                            RepBlock::embedded(*k, n)
                        } else {
                            RepBlock::product(*k, mu.clone(), n)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            let lambdas: Vec<(f64, LambdaMap)> = ts
                .iter()
                .map(|&t| Ok((t, LambdaMap::from_jmap(&fam.eval(t)?)?)))
                .collect::<Result<Vec<_>>>()?;
            // blocks are independent; dispatch across jobs with the results
            // re-assembled in block order
            let spectra = compute_block_spectra(&blocks, &lambdas, jobs)?;
            let mut rows = Vec::new();
            let mut summary = Vec::new();
            for (block, per_t) in blocks.iter().zip(spectra.iter()) {
                let base = &per_t[0].1;
                let mut dev: f64 = 0.0;
                for (_, rep) in per_t.iter().skip(1) {
                    for (a, b) in base.eigenvalues.iter().zip(rep.eigenvalues.iter()) {
                        dev = dev.max((a - b).abs());
                    }
                }
                checks.push(CheckRecord::max(
                    format!("spectra-{}", block.key()),
                    dev,
                    tol,
                ));
                summary.push(Value::Map(vec![
                    ("block_key".into(), Value::Str(block.key())),
                    ("max_deviation".into(), Value::Num(dev)),
                ]));
                for (t, rep) in per_t {
                    for (idx, ev) in rep.eigenvalues.iter().enumerate() {
                        rows.push(vec![
                            block.key(),
                            fmt_f64(*t),
                            idx.to_string(),
                            fmt_f64(*ev),
                        ]);
                    }
                }
                if block.layout == BlockLayout::Product {
                    for (t, lm) in &lambdas {
                        let res = character_shift_identity(lm, block)?;
                        checks.push(CheckRecord::max(
                            format!("character-shift-{} t={t}", block.key()),
                            res,
                            cfg.tolerance("character-shift", 1e-10),
                        ));
                    }
                }
            }
            artifacts.files.push((
                "spectra.csv".to_string(),
                csv_table(&["block_key", "t", "eigen_index", "eigenvalue"], &rows),
            ));
            payload.push(("block_summary".into(), Value::List(summary)));
        }
        Command::Conformal => {
            let section = cfg
                .conformal
                .clone()
                .ok_or_else(|| Error::Config("conformal command needs its section".into()))?;
            let key = family_key(cfg)?;
            let ts = default_ts(cfg);
            if ts.len() < 2 {
                return Err(Error::Config("conformal needs two t values".into()));
            }
            let la = family_lambda(&key, ts[0])?;
            let lb = family_lambda(&key, ts[1])?;
            let bar = barred_lambda(&la, &lb)?;
            let metric = metric_from_lambda(bar)?;
            let profile = conformal_scal_profile(&metric, section.eps, section.factor_index)?;
            checks.push(CheckRecord::flag(
                "alpha-beta-bound",
                profile.bound_ok,
                profile.alpha / profile.beta,
            ));
            let loc = profile.localize_max(cfg.seed, section.samples);
            checks.push(CheckRecord::max(
                "max-localization-distance",
                loc.refined_distance_to_identity,
                cfg.tolerance("localization", 1e-3),
            ));
            checks.push(CheckRecord::max(
                "sampled-max-below-identity",
                loc.sampled_max - loc.scal_at_identity,
                1e-12,
            ));
            payload.push((
                "profile".into(),
                Value::Map(vec![
                    ("alpha".into(), Value::Num(profile.alpha)),
                    ("beta".into(), Value::Num(profile.beta)),
                    ("mu".into(), Value::Num(profile.mu)),
                    ("bound_rhs".into(), Value::Num(profile.bound_rhs)),
                    ("tau_max".into(), Value::Num(profile.tau_max)),
                    ("scal_at_identity".into(), Value::Num(loc.scal_at_identity)),
                    ("sampled_max".into(), Value::Num(loc.sampled_max)),
                    (
                        "refined_distance_to_identity".into(),
                        Value::Num(loc.refined_distance_to_identity),
                    ),
                ]),
            ));
        }
    }
    let report = RunReport {
        command: cfg.command.key().to_string(),
        family: cfg.family.clone(),
        seed: cfg.seed,
        config_sha256: config_hash(raw_config),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        checks,
        payload,
    };
    Ok(RunOutcome { report, artifacts })
}

type BlockSpectra = Vec<Vec<(f64, isospec::spectra::SpectrumReport)>>;

fn compute_block_spectra(
    blocks: &[RepBlock],
    lambdas: &[(f64, LambdaMap)],
    jobs: usize,
) -> Result<BlockSpectra> {
    let work = |block: &RepBlock| -> Result<Vec<(f64, isospec::spectra::SpectrumReport)>> {
        lambdas
            .iter()
            .map(|(t, lm)| Ok((*t, spectrum_report(block, &block_laplacian(lm, block))?)))
            .collect()
    };
    if jobs <= 1 || blocks.len() <= 1 {
        return blocks.iter().map(work).collect();
    }
    let results: Vec<Result<Vec<(f64, isospec::spectra::SpectrumReport)>>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = blocks
                .chunks(blocks.len().div_ceil(jobs))
                .map(|chunk| scope.spawn(move || chunk.iter().map(work).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("spectra worker panicked"))
                .collect()
        });
    results.into_iter().collect()
}

/// Writes the report and artifacts under the output directory; returns the
/// written file paths.
pub fn write_outputs(outcome: &RunOutcome, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut written = Vec::new();
    let report_path = out_dir.join("report.json");
    std::fs::write(&report_path, outcome.report.to_json())
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", report_path.display())))?;
    written.push(report_path);
    for (name, contents) in &outcome.artifacts.files {
        let p = out_dir.join(name);
        std::fs::write(&p, contents)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display())))?;
        written.push(p);
    }
    Ok(written)
}
