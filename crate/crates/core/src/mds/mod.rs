//! Nonmetric multidimensional scaling of correlation-derived dissimilarities.
//!
//! Each start alternates a monotone regression of the embedded distances on
//! the dissimilarity order with a Guttman (majorization) update of the
//! coordinates. Before every update the configuration is rescaled to the
//! optimal size for the current disparities, which makes Kruskal's stress-1
//! non-increasing from one accepted iteration to the next. An update that
//! would raise the stress is rejected and ends the start.

mod isotonic;

pub use isotonic::{monotone_regression, monotone_regression_weighted};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_indices, Schedule};
use crate::factors::CorrelationMatrix;
use crate::linalg::{symmetric_eigen, Matrix};
use crate::rng::XorShift64Star;

/// `d = 1 − r` with an exact zero diagonal.
pub fn dissimilarity_from_correlation(corr: &CorrelationMatrix) -> Matrix {
    let n = corr.len();
    Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 - corr.values[(i, j)] })
}

/// Kruskal stress-1: `sqrt(Σ (d − d̂)² / Σ d²)` over the same pair list.
pub fn kruskal_stress1(distances: &[f64], disparities: &[f64]) -> Result<f64> {
    assert_eq!(distances.len(), disparities.len());
    let denom: f64 = distances.iter().map(|d| d * d).sum();
    if denom == 0.0 {
        return Err(Error::UndefinedStress);
    }
    let num: f64 = distances.iter().zip(disparities).map(|(d, h)| (d - h) * (d - h)).sum();
    Ok((num / denom).sqrt())
}

/// Euclidean distances for all pairs `i < j`, row-major.
pub fn pairwise_distances(coords: &Matrix) -> Vec<f64> {
    let n = coords.rows();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d2: f64 = coords.row(i).iter().zip(coords.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            out.push(d2.sqrt());
        }
    }
    out
}

/// Pairs sorted by dissimilarity, with runs of equal dissimilarities marked.
struct PairOrder {
    /// Indices into the row-major `i < j` pair list, ascending dissimilarity.
    order: Vec<usize>,
    /// `(start, end)` ranges of `order` that share one dissimilarity value.
    ties: Vec<(usize, usize)>,
}

impl PairOrder {
    fn new(dissim: &Matrix) -> Self {
        let n = dissim.rows();
        let values: Vec<f64> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| dissim[(i, j)]).collect();
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let mut ties = Vec::new();
        let mut start = 0;
        for k in 1..=order.len() {
            if k == order.len() || values[order[k]] != values[order[start]] {
                ties.push((start, k));
                start = k;
            }
        }
        Self { order, ties }
    }

    /// Monotone fit of `distances` on the dissimilarity order. Tied
    /// dissimilarities carry no order constraint (primary approach): within
    /// each tie run the pairs are taken in order of their current distance.
    fn disparities(&self, distances: &[f64]) -> Vec<f64> {
        let mut seq = self.order.clone();
        for &(s, e) in &self.ties {
            if e - s > 1 {
                seq[s..e].sort_by(|&a, &b| distances[a].total_cmp(&distances[b]).then(a.cmp(&b)));
            }
        }
        let mut fitted: Vec<f64> = seq.iter().map(|&p| distances[p]).collect();
        isotonic::fit_in_place(&mut fitted, None);
        let mut out = vec![0.0; distances.len()];
        for (&p, f) in seq.iter().zip(fitted) {
            out[p] = f;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdsOptions {
    pub dims: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub schedule: Schedule,
}

impl Default for MdsOptions {
    fn default() -> Self {
        Self { dims: 2, seed: 42, restarts: 8, max_iter: 500, tol: 1e-7, schedule: Schedule::default() }
    }
}

/// Result of one stress-minimization start.
#[derive(Debug, Clone)]
pub struct StartResult {
    pub coords: Matrix,
    pub stress: f64,
    /// Stress of every accepted iterate, starting with the initial
    /// configuration. Non-increasing.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MapLayout {
    pub labels: Vec<String>,
    /// One row per label, `dims` columns, centered and canonically oriented.
    #[serde(serialize_with = "serialize_rows")]
    pub coords: Matrix,
    pub stress: f64,
    pub seed: u64,
    pub restarts: usize,
    /// Index of the start that produced the layout (0 = classical scaling).
    pub best_start: usize,
    #[serde(skip)]
    pub history: Vec<f64>,
}

fn serialize_rows<S: serde::Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.rows()))?;
    for i in 0..m.rows() {
        seq.serialize_element(m.row(i))?;
    }
    seq.end()
}

fn validate(dissim: &Matrix) -> Result<()> {
    let n = dissim.rows();
    if !dissim.is_square() {
        return Err(Error::Contract("dissimilarity matrix must be square".into()));
    }
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    if !dissim.is_symmetric(1e-12) {
        return Err(Error::Contract("dissimilarity matrix is not symmetric".into()));
    }
    if (0..n).any(|i| dissim[(i, i)] != 0.0) {
        return Err(Error::Contract("dissimilarity matrix has a non-zero diagonal".into()));
    }
    if dissim.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Contract("dissimilarity matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Torgerson's classical scaling: top eigenvectors of the double-centered
/// squared dissimilarities, scaled by the root eigenvalues.
pub fn classical_scaling(dissim: &Matrix, dims: usize) -> Result<Matrix> {
    let n = dissim.rows();
    let sq = Matrix::from_fn(n, n, |i, j| dissim[(i, j)] * dissim[(i, j)]);
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).iter().sum::<f64>() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = Matrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    let eig = symmetric_eigen(&b, 1e-9)?;
    Ok(Matrix::from_fn(n, dims, |i, k| if k < n { eig.vectors[(i, k)] * eig.values[k].max(0.0).sqrt() } else { 0.0 }))
}

fn center(coords: &mut Matrix) {
    let n = coords.rows() as f64;
    for k in 0..coords.cols() {
        let mean = coords.col(k).iter().sum::<f64>() / n;
        for i in 0..coords.rows() {
            coords[(i, k)] -= mean;
        }
    }
}

/// Centers the configuration, rotates it onto its principal axes (largest
/// spread first) and flips each axis so the first point with a non-zero
/// coordinate on it is positive.
pub fn canonicalize(coords: &Matrix) -> Matrix {
    let mut x = coords.clone();
    center(&mut x);
    let dims = x.cols();
    let scatter = x.transpose().matmul(&x);
    let mut x = match symmetric_eigen(&scatter, 1e-6 * scatter.trace().abs().max(1.0)) {
        Ok(eig) => x.matmul(&eig.vectors),
        Err(_) => x,
    };
    center(&mut x);
    for k in 0..dims {
        let scale = x.col(k).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let pivot = (0..x.rows()).map(|i| x[(i, k)]).find(|v| v.abs() > 1e-9 * scale.max(f64::MIN_POSITIVE));
        if pivot.is_some_and(|v| v < 0.0) {
            for i in 0..x.rows() {
                x[(i, k)] = -x[(i, k)];
            }
        }
    }
    // avoid printing -0
    for i in 0..x.rows() {
        for k in 0..dims {
            if x[(i, k)] == 0.0 {
                x[(i, k)] = 0.0;
            }
        }
    }
    x
}

struct Evaluation {
    distances: Vec<f64>,
    disparities: Vec<f64>,
    stress: f64,
}

fn evaluate(order: &PairOrder, coords: &Matrix) -> Result<Evaluation> {
    let distances = pairwise_distances(coords);
    let disparities = order.disparities(&distances);
    let stress = kruskal_stress1(&distances, &disparities)?;
    Ok(Evaluation { distances, disparities, stress })
}

fn guttman_update(coords: &Matrix, distances: &[f64], targets: &[f64]) -> Matrix {
    let n = coords.rows();
    let mut b = Matrix::zeros(n, n);
    let mut p = 0;
    for i in 0..n {
        for j in i + 1..n {
            let v = if distances[p] > 0.0 { -targets[p] / distances[p] } else { 0.0 };
            b[(i, j)] = v;
            b[(j, i)] = v;
            b[(i, i)] -= v;
            b[(j, j)] -= v;
            p += 1;
        }
    }
    let mut next = b.matmul(coords);
    let inv_n = 1.0 / n as f64;
    for v in 0..next.rows() {
        for x in next.row_mut(v) {
            *x *= inv_n;
        }
    }
    next
}

fn minimize(order: &PairOrder, init: Matrix, max_iter: usize, tol: f64) -> Result<StartResult> {
    let mut coords = init;
    center(&mut coords);
    let mut current = evaluate(order, &coords)?;
    let mut history = vec![current.stress];
    let n_pairs = current.distances.len() as f64;

    for _ in 0..max_iter {
        let fit_norm = current.disparities.iter().map(|v| v * v).sum::<f64>().sqrt();
        if current.stress == 0.0 || fit_norm == 0.0 {
            break;
        }
        // rescale so the configuration sits at the optimal size for the
        // normalized disparities (Σ d̂² = number of pairs)
        let dist_sq: f64 = current.distances.iter().map(|d| d * d).sum();
        let scale = n_pairs.sqrt() * fit_norm / dist_sq;
        let norm = n_pairs.sqrt() / fit_norm;
        let targets: Vec<f64> = current.disparities.iter().map(|v| v * norm).collect();
        let scaled_dist: Vec<f64> = current.distances.iter().map(|d| d * scale).collect();
        let mut scaled = coords.clone();
        for i in 0..scaled.rows() {
            for x in scaled.row_mut(i) {
                *x *= scale;
            }
        }
        let candidate = guttman_update(&scaled, &scaled_dist, &targets);
        let next = match evaluate(order, &candidate) {
            Ok(e) => e,
            Err(_) => break,
        };
        if next.stress > current.stress {
            break;
        }
        let gain = current.stress - next.stress;
        coords = candidate;
        current = next;
        history.push(current.stress);
        if gain < tol {
            break;
        }
    }
    Ok(StartResult { coords, stress: current.stress, history })
}

fn initial_configuration(dissim: &Matrix, dims: usize, seed: u64, start: usize) -> Result<Matrix> {
    let n = dissim.rows();
    if start == 0 {
        let classical = classical_scaling(dissim, dims)?;
        if pairwise_distances(&classical).iter().any(|&d| d > 1e-12) {
            return Ok(classical);
        }
    }
    let mut rng = XorShift64Star::new(seed.wrapping_add(start as u64));
    Ok(Matrix::from_fn(n, dims, |_, _| rng.normal()))
}

/// One start from a given configuration.
pub fn minimize_stress(dissim: &Matrix, init: Matrix, max_iter: usize, tol: f64) -> Result<StartResult> {
    validate(dissim)?;
    if init.rows() != dissim.rows() {
        return Err(Error::Contract("initial configuration has the wrong number of points".into()));
    }
    minimize(&PairOrder::new(dissim), init, max_iter, tol)
}

/// Nonmetric MDS with one classical-scaling start and `restarts − 1` random
/// starts seeded `seed + start`. The lowest-stress start wins; ties go to
/// the lower start index, so the result is independent of scheduling.
pub fn nonmetric_mds(dissim: &Matrix, labels: &[String], opts: &MdsOptions) -> Result<MapLayout> {
    validate(dissim)?;
    if labels.len() != dissim.rows() {
        return Err(Error::Contract(format!("{} labels for {} points", labels.len(), dissim.rows())));
    }
    if opts.dims == 0 || opts.restarts == 0 {
        return Err(Error::Parameter("dims and restarts must be at least 1".into()));
    }
    let order = PairOrder::new(dissim);
    let starts = map_indices(opts.restarts, opts.schedule, |s| {
        initial_configuration(dissim, opts.dims, opts.seed, s)
            .and_then(|init| minimize(&order, init, opts.max_iter, opts.tol))
    });
    let mut best: Option<(usize, StartResult)> = None;
    let mut first_err = None;
    for (idx, start) in starts.into_iter().enumerate() {
        match start {
            Ok(r) => {
                if best.as_ref().is_none_or(|(_, b)| r.stress < b.stress) {
                    best = Some((idx, r));
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let (best_start, result) = match best {
        Some(b) => b,
        None => return Err(first_err.unwrap_or(Error::UndefinedStress)),
    };
    Ok(MapLayout {
        labels: labels.to_vec(),
        coords: canonicalize(&result.coords),
        stress: result.stress,
        seed: opts.seed,
        restarts: opts.restarts,
        best_start,
        history: result.history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("P{i}")).collect()
    }

    fn distance_matrix(points: &[[f64; 2]]) -> Matrix {
        let n = points.len();
        Matrix::from_fn(n, n, |i, j| {
            ((points[i][0] - points[j][0]).powi(2) + (points[i][1] - points[j][1]).powi(2)).sqrt()
        })
    }

    #[test]
    fn dissimilarity_transform() {
        let corr = CorrelationMatrix::new(
            labels(3),
            Matrix::from_rows(&[[1.0, 1.0, -1.0], [1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]]),
        )
        .unwrap();
        let d = dissimilarity_from_correlation(&corr);
        assert_eq!(d.to_rows(), vec![vec![0.0, 0.0, 2.0], vec![0.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]]);
    }

    #[test]
    fn stress_formula() {
        assert_eq!(kruskal_stress1(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(kruskal_stress1(&[1.0, 2.0], &[0.0, 0.0]).unwrap(), 1.0);
        // 3 points: d = (3, 4, 5), d̂ = (3.5, 3.5, 5): sqrt(0.5 / 50) = 0.1
        let s = kruskal_stress1(&[3.0, 4.0, 5.0], &[3.5, 3.5, 5.0]).unwrap();
        assert!((s - 0.1).abs() < 1e-15);
        assert!(matches!(kruskal_stress1(&[0.0, 0.0], &[1.0, 1.0]), Err(Error::UndefinedStress)));
    }

    #[test]
    fn primary_ties_impose_no_order() {
        let d = Matrix::from_rows(&[[0.0, 1.0, 1.0], [1.0, 0.0, 2.0], [1.0, 2.0, 0.0]]);
        let order = PairOrder::new(&d);
        // pairs (0,1), (0,2) tie; their distances may come in either order
        let fitted = order.disparities(&[5.0, 3.0, 6.0]);
        assert_eq!(fitted, vec![5.0, 3.0, 6.0]);
        // the untied pair must still sit above both
        let fitted = order.disparities(&[5.0, 3.0, 1.0]);
        assert_eq!(fitted, vec![3.0, 3.0, 3.0]);
    }

    #[test]
    fn equilateral_triangle() {
        let d = Matrix::from_rows(&[[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]);
        let layout = nonmetric_mds(&d, &labels(3), &MdsOptions::default()).unwrap();
        assert!(layout.stress <= 1e-6, "{}", layout.stress);
        let dist = pairwise_distances(&layout.coords);
        assert!((dist[0] - dist[1]).abs() < 1e-6 * dist[0]);
        assert!((dist[0] - dist[2]).abs() < 1e-6 * dist[0]);
    }

    #[test]
    fn unit_square_is_recovered() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let d = distance_matrix(&pts);
        let layout = nonmetric_mds(&d, &labels(4), &MdsOptions::default()).unwrap();
        assert!(layout.stress <= 0.01);
        // similarity transform check: distance ratios of a square
        let dist = pairwise_distances(&layout.coords);
        let side = dist[0];
        let want = [1.0, 2f64.sqrt(), 1.0, 1.0, 2f64.sqrt(), 1.0];
        for (got, w) in dist.iter().zip(want) {
            assert!((got / side - w).abs() < 1e-6, "{dist:?}");
        }
    }

    #[test]
    fn classical_scaling_is_exact_for_euclidean_input() {
        let pts = [[0.0, 0.0], [3.0, 0.0], [0.0, 4.0], [2.0, 2.0], [-1.0, 1.5]];
        let d = distance_matrix(&pts);
        let x = classical_scaling(&d, 2).unwrap();
        let rebuilt = pairwise_distances(&x);
        let orig = pairwise_distances(&Matrix::from_rows(&pts));
        for (a, b) in rebuilt.iter().zip(&orig) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn too_few_points() {
        let d = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!(matches!(nonmetric_mds(&d, &labels(2), &MdsOptions::default()), Err(Error::TooFewPoints(2))));
    }

    #[test]
    fn invalid_inputs() {
        let d = Matrix::from_rows(&[[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.5, 1.0, 0.0]]);
        assert!(matches!(nonmetric_mds(&d, &labels(3), &MdsOptions::default()), Err(Error::Contract(_))));
        let d = Matrix::from_rows(&[[1.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]]);
        assert!(matches!(nonmetric_mds(&d, &labels(3), &MdsOptions::default()), Err(Error::Contract(_))));
    }

    #[test]
    fn more_restarts_never_hurt() {
        let mut rng = XorShift64Star::new(5);
        for _ in 0..5 {
            let n = 8;
            let raw = Matrix::from_fn(n, n, |_, _| rng.next_f64());
            let d = Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { raw[(i.min(j), i.max(j))] });
            let one = nonmetric_mds(&d, &labels(n), &MdsOptions { restarts: 1, ..Default::default() }).unwrap();
            let eight = nonmetric_mds(&d, &labels(n), &MdsOptions { restarts: 8, ..Default::default() }).unwrap();
            assert!(eight.stress <= one.stress);
            assert!(eight.history.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn layout_is_centered() {
        let pts = [[0.0, 0.0], [3.0, 0.5], [1.0, 4.0], [2.0, 2.0], [5.0, 1.5]];
        let layout = nonmetric_mds(&distance_matrix(&pts), &labels(5), &MdsOptions::default()).unwrap();
        for k in 0..2 {
            let mean: f64 = layout.coords.col(k).iter().sum::<f64>() / 5.0;
            assert!(mean.abs() < 1e-9);
        }
        assert!(layout.coords[(0, 0)] >= 0.0 && layout.coords[(0, 1)] >= 0.0);
        assert!((0.0..=1.0).contains(&layout.stress));
    }
}
