//! Max-scal preimage on S^2: lattice sampling, projected-gradient refinement
//! onto the preimage set, and decomposition into connected clusters with an
//! estimated dimension per cluster.

use std::collections::HashMap;

use nalgebra::{Matrix3, Vector3};

use super::scal::scal_s2t2;
use super::SphereQuadMap;

/// Deterministic Fibonacci lattice with roughly uniform spacing
/// sqrt(4 pi / n).
pub fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let th = golden * i as f64;
            Vector3::new(r * th.cos(), r * th.sin(), z)
        })
        .collect()
}

/// One connected component of the refined preimage witnesses.
#[derive(Debug, Clone)]
pub struct ClusterDescriptor {
    pub representative: Vector3<f64>,
    pub centroid_direction: Vector3<f64>,
    pub n_points: usize,
    /// Largest distance between a member and the centroid direction.
    pub radius: f64,
    /// Extent witnessed via the farthest member from the centroid.
    pub diameter: f64,
    /// Estimated dimension: 0 for pointlike clusters, else local-PCA rank.
    pub est_dim: usize,
}

#[derive(Debug, Clone)]
pub struct PreimageReport {
    pub max_scal: f64,
    pub band: f64,
    pub sample_count: usize,
    /// Lattice points whose refinement reached the band.
    pub witness_count: usize,
    pub clusters: Vec<ClusterDescriptor>,
    /// Refined witnesses with scal values and cluster ids, for CSV emission.
    pub members: Vec<(Vector3<f64>, f64, usize)>,
}

/// Diameter below which a cluster is reported as zero-dimensional; the
/// extended features of interest here are great-circle sized.
const POINTLIKE_DIAMETER: f64 = 0.05;
/// Relative singular-value cutoff for the local-PCA rank.
const PCA_CUTOFF: f64 = 0.1;
/// Local PCA neighborhood radius: small enough that the curvature sagitta of
/// a one-dimensional feature stays below the cutoff.
const PCA_NEIGHBORHOOD: f64 = 0.08;

fn tangential_gradient(c: &SphereQuadMap, p: &Vector3<f64>) -> Vector3<f64> {
    // scal = 2 - 4.5 (g1^2 + g2^2), grad(g^2) = 4 g c p ambiently
    let mut g = Vector3::zeros();
    for s in 0..2 {
        let cs = c.component(s);
        let v = (cs * p).dot(p);
        g += -4.5 * 4.0 * v * (cs * p);
    }
    g - p * g.dot(p)
}

/// Projected gradient ascent of scal from a starting point; returns the
/// refined point and its value.
fn ascend(c: &SphereQuadMap, start: Vector3<f64>) -> (Vector3<f64>, f64) {
    let mut p = start;
    let mut val = scal_s2t2(c, &p).unwrap();
    let mut step = 0.05;
    for _ in 0..400 {
        let g = tangential_gradient(c, &p);
        let gn = g.norm();
        if gn < 1e-13 {
            break;
        }
        let cand = {
            let q = p + g * (step / gn.max(1.0));
            q / q.norm()
        };
        let cv = scal_s2t2(c, &cand).unwrap();
        if cv > val {
            p = cand;
            val = cv;
        } else {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    (p, val)
}

/// Samples scal over a Fibonacci lattice with spacing ~ resolution, refines
/// every sample within a loose band of the maximum by projected gradient
/// ascent, keeps the refined witnesses that reach `band` of the maximum,
/// links witnesses within three lattice spacings, and estimates a dimension
/// per cluster.
pub fn max_scal_preimage(c: &SphereQuadMap, resolution: f64, band: f64) -> PreimageReport {
    let n = (4.0 * std::f64::consts::PI / (resolution * resolution)).ceil() as usize;
    let pts = fibonacci_sphere(n);
    let mut max_scal = f64::NEG_INFINITY;
    let vals: Vec<f64> = pts
        .iter()
        .map(|p| {
            let v = scal_s2t2(c, p).unwrap();
            if v > max_scal {
                max_scal = v;
            }
            v
        })
        .collect();
    // loose band wide enough that every preimage component attracts samples
    let loose = (band * 1e3).clamp(1e-4, 1e-2);
    let mut witnesses: Vec<(Vector3<f64>, f64)> = Vec::new();
    let mut refined_max = max_scal;
    for i in 0..n {
        if vals[i] >= max_scal - loose {
            let (p, v) = ascend(c, pts[i]);
            refined_max = refined_max.max(v);
            witnesses.push((p, v));
        }
    }
    let keep: Vec<(Vector3<f64>, f64)> = witnesses
        .into_iter()
        .filter(|(_, v)| *v >= refined_max - band)
        .collect();

    // spatial hash for neighbor links
    let link = 3.0 * resolution;
    let cell = link;
    let key = |p: &Vector3<f64>| -> (i64, i64, i64) {
        (
            (p[0] / cell).floor() as i64,
            (p[1] / cell).floor() as i64,
            (p[2] / cell).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, (p, _)) in keep.iter().enumerate() {
        grid.entry(key(p)).or_default().push(i);
    }
    let mut parent: Vec<usize> = (0..keep.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, (p, _)) in keep.iter().enumerate() {
        let (kx, ky, kz) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(cands) = grid.get(&(kx + dx, ky + dy, kz + dz)) {
                        for &other in cands {
                            if other <= i {
                                continue;
                            }
                            if (keep[other].0 - p).norm() <= link {
                                let ra = find(&mut parent, i);
                                let rb = find(&mut parent, other);
                                if ra != rb {
                                    parent[ra] = rb;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..keep.len() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }

    let mut clusters = Vec::new();
    let mut members = Vec::new();
    let mut group_list: Vec<Vec<usize>> = groups.into_values().collect();
    group_list.sort_by_key(|g| (usize::MAX - g.len(), g.iter().min().cloned()));
    for (cid, locals) in group_list.iter().enumerate() {
        let mut centroid = Vector3::zeros();
        for &l in locals {
            centroid += keep[l].0;
        }
        let centroid_dir = if centroid.norm() > 1e-9 {
            centroid / centroid.norm()
        } else {
            keep[locals[0]].0
        };
        let mut radius: f64 = 0.0;
        let mut far_a = centroid_dir;
        for &l in locals {
            let d = (keep[l].0 - centroid_dir).norm();
            if d > radius {
                radius = d;
                far_a = keep[l].0;
            }
        }
        let mut diameter: f64 = 0.0;
        for &l in locals {
            diameter = diameter.max((keep[l].0 - far_a).norm());
        }
        let est_dim = if diameter <= POINTLIKE_DIAMETER {
            0
        } else {
            local_pca_rank(locals.iter().map(|&l| keep[l].0), &far_a)
        };
        let rep = locals
            .iter()
            .cloned()
            .max_by(|&a, &b| keep[a].1.partial_cmp(&keep[b].1).unwrap())
            .unwrap();
        clusters.push(ClusterDescriptor {
            representative: keep[rep].0,
            centroid_direction: centroid_dir,
            n_points: locals.len(),
            radius,
            diameter,
            est_dim,
        });
        for &l in locals {
            members.push((keep[l].0, keep[l].1, cid));
        }
    }
    PreimageReport {
        max_scal: refined_max,
        band,
        sample_count: n,
        witness_count: keep.len(),
        clusters,
        members,
    }
}

/// PCA rank of the cluster points inside a small neighborhood of an anchor,
/// with singular values counted above the relative cutoff.
fn local_pca_rank(points: impl Iterator<Item = Vector3<f64>>, anchor: &Vector3<f64>) -> usize {
    let local: Vec<Vector3<f64>> = points
        .filter(|p| (p - anchor).norm() <= PCA_NEIGHBORHOOD)
        .collect();
    if local.len() < 3 {
        return 0;
    }
    let mut mean = Vector3::zeros();
    for p in &local {
        mean += p;
    }
    mean /= local.len() as f64;
    let mut cov = Matrix3::zeros();
    for p in &local {
        let d = p - mean;
        cov += d * d.transpose();
    }
    cov /= local.len() as f64;
    let mut eigs: Vec<f64> = cov.symmetric_eigen().eigenvalues.iter().cloned().collect();
    eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let svals: Vec<f64> = eigs.iter().map(|&e| e.max(0.0).sqrt()).collect();
    if svals[0] <= 0.0 {
        return 0;
    }
    svals.iter().filter(|&&s| s > PCA_CUTOFF * svals[0]).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_points_are_unit() {
        for p in fibonacci_sphere(1000) {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_c_preimage_is_whole_sphere() {
        let c = SphereQuadMap::new(Matrix3::zeros(), Matrix3::zeros()).unwrap();
        let rep = max_scal_preimage(&c, 0.05, 1e-6);
        assert_eq!(rep.witness_count, rep.sample_count);
        assert_eq!(rep.clusters.len(), 1);
        assert_eq!(rep.clusters[0].est_dim, 2);
    }
}
