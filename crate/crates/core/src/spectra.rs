//! Finite-dimensional Laplacian blocks: the metric Laplacian restricted to
//! matrix coefficients of tensor powers of the defining representation,
//! twisted by torus characters in the product layouts. Sorted block spectra
//! certify isospectrality; the operator identity
//! Delta_lambda = Delta_0 + 4 pi i Y_mu(lambda) + 4 pi^2 ||Y_mu(lambda)||^2
//! is checked directly on product blocks.

use crate::error::{Error, Result};
use crate::geom::LambdaMap;
use crate::linalg::{c, ci, hermitian_eigenvalues, max_abs, tensor_power_generator, CMat};

pub const TENSOR_POWER_CAP: usize = 3;
pub const MULTIPLICITY_CLUSTER_TOL: f64 = 1e-7;

/// How the torus sits relative to the matrix summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockLayout {
    /// G = K x T^r with h the central abelian summand; blocks carry a
    /// character mu of the torus.
    Product,
    /// H sits inside the matrix group; blocks are indexed by the tensor
    /// power alone and the characters refine internally.
    Embedded,
}

/// One Peter-Weyl style block: the k-fold tensor power of the defining
/// representation, twisted by the torus character mu in product layouts.
#[derive(Debug, Clone)]
pub struct RepBlock {
    pub layout: BlockLayout,
    pub tensor_power: usize,
    pub mu: Vec<i64>,
    pub dim: usize,
}

impl RepBlock {
    pub fn product(tensor_power: usize, mu: Vec<i64>, matrix_size: usize) -> Result<Self> {
        if tensor_power > TENSOR_POWER_CAP {
            return Err(Error::Config(format!(
                "tensor power {tensor_power} exceeds cap {TENSOR_POWER_CAP}"
            )));
        }
        let dim = if tensor_power == 0 {
            1
        } else {
            matrix_size.pow(tensor_power as u32)
        };
        Ok(RepBlock {
            layout: BlockLayout::Product,
            tensor_power,
            mu,
            dim,
        })
    }

    pub fn embedded(tensor_power: usize, matrix_size: usize) -> Result<Self> {
        if tensor_power > TENSOR_POWER_CAP {
            return Err(Error::Config(format!(
                "tensor power {tensor_power} exceeds cap {TENSOR_POWER_CAP}"
            )));
        }
        let dim = if tensor_power == 0 {
            1
        } else {
            matrix_size.pow(tensor_power as u32)
        };
        Ok(RepBlock {
            layout: BlockLayout::Embedded,
            tensor_power,
            mu: Vec::new(),
            dim,
        })
    }

    /// Stable string key for reports: "k<power>" or "k<power>:mu(<..>)".
    pub fn key(&self) -> String {
        if self.mu.is_empty() {
            format!("k{}", self.tensor_power)
        } else {
            let mus: Vec<String> = self.mu.iter().map(|m| m.to_string()).collect();
            format!("k{}:mu({})", self.tensor_power, mus.join(","))
        }
    }
}

/// Generator of the block representation for an algebra element given in
/// basis coordinates: dPi(E) = dpi(pr_k E) + 2 pi i mu(pr_h E) Id in product
/// layouts, the plain tensor-power generator in embedded ones.
pub fn block_generator(
    lambda: &LambdaMap,
    block: &RepBlock,
    coords: &nalgebra::DVector<f64>,
) -> CMat {
    let alg = lambda.algebra();
    let k = block.tensor_power;
    let matrix_part = alg.matrix_from_coords(coords);
    let mut out = tensor_power_generator(&matrix_part, k);
    if block.layout == BlockLayout::Product {
        // character contribution: mu(pr_h E) with mu = sum mu_s Z_s^*
        let mut mu_val = 0.0;
        for (s, z) in lambda.torus().basis().iter().enumerate() {
            mu_val += block.mu[s] as f64 * alg.inner(z, coords);
        }
        let dim = out.nrows();
        for dcol in 0..dim {
            out[(dcol, dcol)] += ci(std::f64::consts::TAU * mu_val);
        }
    }
    out
}

/// The block operator -sum_i dPi(Etilde_i)^2; Hermitian positive
/// semidefinite.
pub fn block_laplacian(lambda: &LambdaMap, block: &RepBlock) -> CMat {
    let alg = lambda.algebra();
    let d = alg.dim();
    let frame = {
        let endo = lambda.endo();
        nalgebra::DMatrix::<f64>::identity(d, d) - endo
    };
    let mut h = CMat::zeros(block.dim, block.dim);
    for i in 0..d {
        let col = nalgebra::DVector::from(frame.column(i));
        let g = block_generator(lambda, block, &col);
        h -= &g * &g;
    }
    h
}

/// Sorted eigenvalues with multiplicities clustered at the fixed tolerance.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub block_key: String,
    pub eigenvalues: Vec<f64>,
    /// (representative eigenvalue, multiplicity) clusters.
    pub multiplicities: Vec<(f64, usize)>,
}

pub fn spectrum_report(block: &RepBlock, operator: &CMat) -> Result<SpectrumReport> {
    let herm = max_abs(&(operator - operator.adjoint()));
    if herm > 1e-10 {
        return Err(Error::Domain(format!(
            "block operator is not Hermitian (residual {herm:.3e})"
        )));
    }
    let eigenvalues = hermitian_eigenvalues(operator);
    if let Some(&lo) = eigenvalues.first() {
        if lo < -1e-10 {
            return Err(Error::Domain(format!(
                "block operator not positive semidefinite (min eigenvalue {lo:.3e})"
            )));
        }
    }
    let mut multiplicities: Vec<(f64, usize)> = Vec::new();
    for &ev in &eigenvalues {
        match multiplicities.last_mut() {
            Some((rep, count)) if (ev - *rep).abs() <= MULTIPLICITY_CLUSTER_TOL => *count += 1,
            _ => multiplicities.push((ev, 1)),
        }
    }
    Ok(SpectrumReport {
        block_key: block.key(),
        eigenvalues,
        multiplicities,
    })
}

/// Per-block outcome of a family certificate.
#[derive(Debug, Clone)]
pub struct BlockDeviation {
    pub block_key: String,
    pub max_deviation: f64,
    pub spectra: Vec<(f64, SpectrumReport)>,
}

#[derive(Debug, Clone)]
pub struct FamilySpectraReport {
    pub blocks: Vec<BlockDeviation>,
    pub max_deviation: f64,
}

/// Sorted block eigenvalues for every listed t, compared pairwise within
/// each block. The lambda builder maps t to the deformation.
pub fn spectra_equal_along_family(
    lambda_at: impl Fn(f64) -> Result<LambdaMap>,
    blocks: &[RepBlock],
    t_samples: &[f64],
    tol: f64,
) -> Result<FamilySpectraReport> {
    let mut out = Vec::with_capacity(blocks.len());
    let mut worst: f64 = 0.0;
    let lambdas: Vec<(f64, LambdaMap)> = t_samples
        .iter()
        .map(|&t| Ok((t, lambda_at(t)?)))
        .collect::<Result<Vec<_>>>()?;
    for block in blocks {
        let mut spectra = Vec::with_capacity(lambdas.len());
        for (t, lm) in &lambdas {
            let op = block_laplacian(lm, block);
            spectra.push((*t, spectrum_report(block, &op)?));
        }
        let mut dev: f64 = 0.0;
        let base = &spectra[0].1.eigenvalues;
        for (_, rep) in spectra.iter().skip(1) {
            for (a, b) in base.iter().zip(rep.eigenvalues.iter()) {
                dev = dev.max((a - b).abs());
            }
        }
        if dev > tol {
            return Err(Error::Domain(format!(
                "block {} spectra deviate by {dev:.3e} (tolerance {tol:.1e})",
                block.key()
            )));
        }
        worst = worst.max(dev);
        out.push(BlockDeviation {
            block_key: block.key(),
            max_deviation: dev,
            spectra,
        });
    }
    Ok(FamilySpectraReport {
        blocks: out,
        max_deviation: worst,
    })
}

/// Frobenius residual of the product-layout operator identity
/// Delta_lambda - (Delta_0 + 4 pi i dPi(Y_mu) + 4 pi^2 ||Y_mu||^2 Id) on the
/// block, with Y_mu(lambda) = j_{Z_mu}.
pub fn character_shift_identity(lambda: &LambdaMap, block: &RepBlock) -> Result<f64> {
    if block.layout != BlockLayout::Product || !lambda.torus().is_central() {
        return Err(Error::Config(
            "character-shift identity needs the product layout with a central torus".into(),
        ));
    }
    let alg = lambda.algebra();
    let lap = block_laplacian(lambda, block);
    // lambda = 0 reference on the same block
    let zero = {
        let d = alg.dim();
        let r = lambda.rank();
        let m = nalgebra::DMatrix::<f64>::zeros(d, r);
        lambda_with_matrix(lambda, m)?
    };
    let lap0 = block_laplacian(&zero, block);
    let mu_f: Vec<f64> = block.mu.iter().map(|&m| m as f64).collect();
    let y_mu = lambda.j_at(&mu_f);
    let y_norm_sq = alg.inner(&y_mu, &y_mu);
    let dpi_y = tensor_power_generator(&alg.matrix_from_coords(&y_mu), block.tensor_power);
    let mut rhs = lap0 + dpi_y * ci(2.0 * std::f64::consts::TAU);
    let shift = c(4.0 * std::f64::consts::PI * std::f64::consts::PI * y_norm_sq);
    for dcol in 0..block.dim {
        rhs[(dcol, dcol)] += shift;
    }
    Ok(max_abs(&(lap - rhs)))
}

fn lambda_with_matrix(reference: &LambdaMap, matrix: nalgebra::DMatrix<f64>) -> Result<LambdaMap> {
    use crate::maps::JMap;
    let alg = reference.algebra().clone();
    let images = (0..matrix.ncols())
        .map(|s| {
            let col = nalgebra::DVector::from(matrix.column(s));
            alg.matrix_from_coords(&col)
        })
        .collect();
    let j = JMap::new(alg, reference.torus().clone(), images)?;
    LambdaMap::from_jmap(&j)
}

/// ||Y_mu(lambda)||, the character-direction norm entering the block shift.
pub fn y_mu_norm(lambda: &LambdaMap, mu: &[i64]) -> f64 {
    let mu_f: Vec<f64> = mu.iter().map(|&m| m as f64).collect();
    let y = lambda.j_at(&mu_f);
    lambda.algebra().inner(&y, &y).sqrt()
}
