//! The isospectral flow j' = Y(j) with Y(j) = ([j_1^e, j_2], 0) for an odd
//! exponent e, integrated by fixed-step classical RK4 with drift monitoring.
//! Drift is reported, never corrected.

use std::sync::Arc;

use nalgebra::Complex;

use super::{p_ab_mats, JMap};
use crate::error::{Error, Result};
use crate::lie::{MatrixFamily, MatrixLieAlgebra, TorusSubalgebra};
use crate::linalg::{c, ci, CMat};

#[derive(Debug, Clone)]
pub struct FlowOptions {
    /// Odd exponent in Y(j) = ([j_1^e, j_2], 0); the trace-word argument
    /// annihilating every p_ab holds for any odd exponent.
    pub exponent: u32,
    /// Abort threshold for the max p_ab drift; None disables rejection.
    pub drift_budget: Option<f64>,
    /// Word-length cap for the monitored p_ab (defaults to the matrix size).
    pub word_cap: Option<usize>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            exponent: 5,
            drift_budget: None,
            word_cap: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    /// Sampled trajectory (t_i, j_1(t_i), j_2(t_i)).
    pub samples: Vec<(f64, CMat, CMat)>,
    /// Max |p_ab(t) - p_ab(0)| over the trajectory, word length <= cap.
    pub max_pab_drift: f64,
    /// |q(T) - q(0)| for q = tr(j_1^2 j_2^2).
    pub q_change: f64,
}

fn matrix_power(x: &CMat, e: u32) -> CMat {
    let mut out = CMat::identity(x.nrows(), x.ncols());
    for _ in 0..e {
        out = out * x;
    }
    out
}

/// Y(j) = ([j_1^e, j_2], 0): the tangent to the isospectral set at j.
pub fn flow_field_y(j1: &CMat, j2: &CMat, exponent: u32) -> CMat {
    let p = matrix_power(j1, exponent);
    &p * j2 - j2 * &p
}

fn q_of(j1: &CMat, j2: &CMat) -> f64 {
    (j1 * j1 * j2 * j2).trace().re
}

/// The su(3) seed where dq|_j Y equals 240: j_1 = diag(i, 2i, -3i) and the
/// printed real skew j_2.
pub fn flow_reference_point() -> (CMat, CMat) {
    let j1 = CMat::from_fn(3, 3, |r, cl| {
        if r == cl {
            ci([1.0, 2.0, -3.0][r])
        } else {
            c(0.0)
        }
    });
    let j2 = CMat::from_row_slice(
        3,
        3,
        &[
            c(0.0),
            c(1.0),
            c(1.0),
            c(-1.0),
            c(0.0),
            c(1.0),
            c(-1.0),
            c(-1.0),
            c(0.0),
        ],
    );
    (j1, j2)
}

/// Directional derivative dq|_j Y = tr(j_1^e j_2 j_1 j_2^2 - j_1 j_2 j_1^e j_2^2).
pub fn dq_along_y(j1: &CMat, j2: &CMat, exponent: u32) -> Complex<f64> {
    let p = matrix_power(j1, exponent);
    (&p * j2 * j1 * j2 * j2 - j1 * j2 * &p * j2 * j2).trace()
}

/// Fixed-step RK4 on j_1 with j_2 frozen; p_ab drift is measured against the
/// seed after every step. With a drift budget set, the first violating step
/// aborts the run and the error carries the measured drift.
pub fn flow_integrate(
    j1_seed: &CMat,
    j2_seed: &CMat,
    total_time: f64,
    dt: f64,
    options: &FlowOptions,
) -> Result<FlowResult> {
    if dt <= 0.0 {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    if options.exponent.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "flow exponent must be odd, got {}",
            options.exponent
        )));
    }
    let n = j1_seed.nrows();
    let cap = options.word_cap.unwrap_or(n);
    let words: Vec<(usize, usize)> = (0..=cap)
        .flat_map(|a| (0..=cap - a).map(move |b| (a, b)))
        .filter(|&(a, b)| a + b >= 1 && a + b <= cap)
        .collect();
    let reference: Vec<Complex<f64>> = words
        .iter()
        .map(|&(a, b)| p_ab_mats(j1_seed, j2_seed, a, b, cap, 2))
        .collect::<Result<Vec<_>>>()?;
    let q0 = q_of(j1_seed, j2_seed);
    let steps = (total_time / dt).round() as usize;
    let e = options.exponent;

    let mut j1 = j1_seed.clone();
    let j2 = j2_seed.clone();
    let mut samples = vec![(0.0, j1.clone(), j2.clone())];
    let mut max_drift: f64 = 0.0;
    for step in 0..steps {
        let k1 = flow_field_y(&j1, &j2, e);
        let k2 = flow_field_y(&(&j1 + &k1 * c(0.5 * dt)), &j2, e);
        let k3 = flow_field_y(&(&j1 + &k2 * c(0.5 * dt)), &j2, e);
        let k4 = flow_field_y(&(&j1 + &k3 * c(dt)), &j2, e);
        j1 += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(dt / 6.0);
        let mut drift: f64 = 0.0;
        for (w, r) in words.iter().zip(reference.iter()) {
            let p = p_ab_mats(&j1, &j2, w.0, w.1, cap, 2)?;
            drift = drift.max((p - r).norm());
        }
        max_drift = max_drift.max(drift);
        if let Some(budget) = options.drift_budget {
            if drift > budget {
                return Err(Error::DriftExceeded {
                    drift,
                    budget,
                    step,
                });
            }
        }
        samples.push(((step + 1) as f64 * dt, j1.clone(), j2.clone()));
    }
    let q_change = (q_of(&j1, &j2) - q0).abs();
    Ok(FlowResult {
        samples,
        max_pab_drift: max_drift,
        q_change,
    })
}

/// Houses a flow sample as a JMap over su(n) + R^2 so the downstream
/// certificates apply unchanged.
pub fn flow_sample_jmap(j1: &CMat, j2: &CMat) -> Result<JMap> {
    let n = j1.nrows();
    let algebra = Arc::new(MatrixLieAlgebra::with_central_torus(
        MatrixFamily::SuN(n),
        2,
    )?);
    let torus = TorusSubalgebra::central(algebra.clone())?;
    JMap::new(algebra, torus, vec![j1.clone(), j2.clone()])
}
