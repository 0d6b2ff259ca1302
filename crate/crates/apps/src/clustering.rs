//! Convex and truncated (SCAD-like) fusion clustering
//! `1/2 sum ||x_i - u_i||^2 + lambda sum_{i<j} rho(x_i - x_j)`.

use rand::Rng;
use rand_distr::StandardNormal;
use rsplit::prox::BlockProxKind;
use rsplit::{LinearOperator, LsSolvePolicy, Matrix, QuadraticRegularizer, RelaxedProblem, SeparableNonsmooth, Vector};

use crate::{seeded, AppError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fusion {
    /// `rho = ||.||_2`
    Convex,
    /// `rho(d) = ||d||` below `kappa`, zero from `kappa` on.
    Scad { kappa: f64 },
}

impl Fusion {
    fn kind(self) -> BlockProxKind {
        match self {
            Fusion::Convex => BlockProxKind::GroupL2,
            Fusion::Scad { kappa } => BlockProxKind::ScadTruncated { kappa },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedClusters {
    /// One point per row.
    pub points: Matrix,
    pub labels: Vec<usize>,
    pub centers: Matrix,
    /// Largest distance from a point to its planted center.
    pub radius: f64,
}

impl PlantedClusters {
    /// Half the smallest distance between two planted centers.
    pub fn packing_radius(&self) -> f64 {
        let k = self.centers.nrows();
        let mut best = f64::INFINITY;
        for i in 0..k {
            for j in i + 1..k {
                best = best.min((self.centers.row(i) - self.centers.row(j)).norm());
            }
        }
        0.5 * best
    }
}

/// `clusters` centers on a circle with neighbouring centers `separation`
/// apart, each with `per_cluster` Gaussian points of standard deviation
/// `spread`. Only the first two coordinates carry the centers.
pub fn planted_clusters(clusters: usize, per_cluster: usize, dim: usize, separation: f64, spread: f64, seed: u64) -> Result<PlantedClusters> {
    if clusters == 0 || per_cluster == 0 || dim < 2 {
        return Err(AppError::Invalid("need clusters, points and dim >= 2".into()));
    }
    let mut r = seeded(seed);
    // chord between neighbours on the circle equals `separation`
    let radius_c = if clusters == 1 { 0.0 } else { separation / (2.0 * (std::f64::consts::PI / clusters as f64).sin()) };
    let centers = Matrix::from_fn(clusters, dim, |c, a| {
        let t = 2.0 * std::f64::consts::PI * c as f64 / clusters as f64;
        match a {
            0 => radius_c * t.cos(),
            1 => radius_c * t.sin(),
            _ => 0.0,
        }
    });
    let m = clusters * per_cluster;
    let mut points = Matrix::zeros(m, dim);
    let mut labels = Vec::with_capacity(m);
    let mut radius: f64 = 0.0;
    for c in 0..clusters {
        for p in 0..per_cluster {
            let i = c * per_cluster + p;
            let mut d2 = 0.0;
            for a in 0..dim {
                let e: f64 = spread * r.sample::<f64, _>(StandardNormal);
                points[(i, a)] = centers[(c, a)] + e;
                d2 += e * e;
            }
            radius = radius.max(d2.sqrt());
            labels.push(c);
        }
    }
    Ok(PlantedClusters { points, labels, centers, radius })
}

pub fn flatten_points(points: &Matrix) -> Vector {
    Vector::from_iterator(points.len(), points.row_iter().flat_map(|r| r.iter().copied().collect::<Vec<_>>()))
}

pub fn unflatten_points(x: &Vector, dim: usize) -> Matrix {
    Matrix::from_row_slice(x.len() / dim, dim, x.as_slice())
}

/// `A = D` (all pairs `i < j`), `h = lambda sum rho(w_ij)`, `g = Tracking(U)`.
/// The `x` step uses the closed form for `I + D^T D / nu`.
pub fn clustering_setup(points: &Matrix, lambda: f64, nu: f64, fusion: Fusion) -> Result<RelaxedProblem> {
    let (m, d) = points.shape();
    if m < 2 || d == 0 {
        return Err(AppError::Invalid("clustering needs at least two points".into()));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(AppError::Invalid(format!("lambda {lambda}")));
    }
    let op = LinearOperator::pairwise_difference(m, d)?;
    let h = SeparableNonsmooth::blocks(m * (m - 1) / 2, d, fusion.kind(), lambda)?;
    Ok(RelaxedProblem::new(h, op, QuadraticRegularizer::Tracking(flatten_points(points)), nu, LsSolvePolicy::default())?)
}

/// Starting split variable `w0 = D U`.
pub fn initial_w(p: &RelaxedProblem) -> Result<Vector> {
    let u = p.g().reference().ok_or_else(|| AppError::Invalid("problem has no tracking reference".into()))?;
    Ok(p.op().apply(u)?)
}

/// Connected components of the graph with an edge `(i, j)` whenever
/// `||w_ij|| <= tol`. Labels are numbered by first appearance.
pub fn clusters_from_w(w: &Vector, points: usize, dim: usize, tol: f64) -> Result<Vec<usize>> {
    if !(tol > 0.0) {
        return Err(AppError::Invalid(format!("tolerance {tol}")));
    }
    if points == 0 || dim == 0 || w.len() != points * (points - 1) / 2 * dim {
        return Err(AppError::Invalid(format!("w has length {} for {points} points of dim {dim}", w.len())));
    }
    let mut parent: Vec<usize> = (0..points).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut row = 0;
    for i in 0..points {
        for j in (i + 1)..points {
            if w.rows(row, dim).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
            row += dim;
        }
    }
    let mut names = vec![usize::MAX; points];
    let mut next = 0;
    let mut labels = Vec::with_capacity(points);
    for i in 0..points {
        let root = find(&mut parent, i);
        if names[root] == usize::MAX {
            names[root] = next;
            next += 1;
        }
        labels.push(names[root]);
    }
    Ok(labels)
}

/// Relabels by first appearance so partitions compare with `==`.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

/// Boolean co-membership matrix (1 where two points share a label).
pub fn adjacency(labels: &[usize]) -> Matrix {
    let m = labels.len();
    Matrix::from_fn(m, m, |i, j| f64::from(u8::from(labels[i] == labels[j])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rsplit::solvers::rs_pgd;
    use rsplit::SolveOptions;

    #[test]
    fn zero_lambda_returns_data() {
        let pc = planted_clusters(2, 3, 2, 5.0, 0.5, 1).unwrap();
        let p = clustering_setup(&pc.points, 0.0, 1.0, Fusion::Convex).unwrap();
        let w0 = initial_w(&p).unwrap();
        let res = rs_pgd(&p, &w0, &SolveOptions::default().with_max_iter(5)).unwrap();
        assert!((res.x - flatten_points(&pc.points)).amax() < 1e-12);
    }

    #[test]
    fn identical_points_stay_put() {
        let pts = Matrix::from_fn(4, 2, |_, a| a as f64 + 1.0);
        let p = clustering_setup(&pts, 0.7, 1.0, Fusion::Convex).unwrap();
        let w0 = initial_w(&p).unwrap();
        assert_eq!(w0.amax(), 0.0);
        let res = rs_pgd(&p, &w0, &SolveOptions::default().with_max_iter(5)).unwrap();
        assert_eq!(res.w.amax(), 0.0);
        assert!((res.x - flatten_points(&pts)).amax() < 1e-12);
    }

    #[test]
    fn components_extremes() {
        let w = Vector::zeros(6 * 2);
        assert_eq!(clusters_from_w(&w, 4, 2, 1e-3).unwrap(), vec![0, 0, 0, 0]);
        let w = Vector::from_element(6 * 2, 5.0);
        assert_eq!(clusters_from_w(&w, 4, 2, 1e-3).unwrap(), vec![0, 1, 2, 3]);
        assert!(clusters_from_w(&w, 5, 2, 1e-3).is_err());
    }

    #[test]
    fn components_chain_through_transitivity() {
        // pairs (0,1) (0,2) (1,2): only (0,1) and (1,2) fused
        let w = Vector::from_vec(vec![0.0, 1.0, 0.0]);
        assert_eq!(clusters_from_w(&w, 3, 1, 1e-3).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn flatten_roundtrip_and_labels() {
        let pc = planted_clusters(3, 4, 3, 10.0, 1.0, 2).unwrap();
        assert_eq!(unflatten_points(&flatten_points(&pc.points), 3), pc.points);
        assert_eq!(canonical_labels(&[5, 5, 2, 9, 2]), vec![0, 0, 1, 2, 1]);
        assert_eq!(adjacency(&[0, 1, 0])[(0, 2)], 1.0);
    }
}
