//! Factor analysis of citation profiles: Pearson correlations, principal
//! component extraction, factor retention, raw varimax rotation and cluster
//! designation.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::ego::EgoEnvironment;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};

const SYMMETRY_TOL: f64 = 1e-12;

/// Which side of the citation matrix forms a journal's profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileMode {
    /// Row i: how journal i distributes its references over the members.
    CitingProfiles,
    /// Column i: where journal i's citations come from.
    CitedProfiles,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub values: Matrix,
}

impl CorrelationMatrix {
    pub fn new(labels: Vec<String>, values: Matrix) -> Result<Self> {
        if values.rows() != labels.len() || !values.is_square() {
            return Err(Error::Contract(format!(
                "{} labels for a {}x{} matrix",
                labels.len(),
                values.rows(),
                values.cols()
            )));
        }
        if !values.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::Contract("correlation matrix is not symmetric".into()));
        }
        Ok(Self { labels, values })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCorrelations {
    pub correlations: CorrelationMatrix,
    /// Journals removed because their profile had zero variance.
    pub dropped: Vec<String>,
}

/// Pearson correlation; `None` when either vector has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn has_variance(x: &[f64]) -> bool {
    x.iter().any(|&v| v != x[0])
}

/// Correlates journal profiles over all environment members. Profiles with
/// zero variance are dropped and reported; at least three must survive.
pub fn profile_correlations(
    env: &EgoEnvironment,
    mode: ProfileMode,
    zero_diagonal: bool,
) -> Result<ProfileCorrelations> {
    let n = env.len();
    if n < 3 {
        return Err(Error::DegenerateEnvironment(format!(
            "{} has {n} member(s) in {}, need at least 3",
            env.ego, env.year
        )));
    }
    let cell = |i: usize, j: usize| {
        if zero_diagonal && i == j {
            0.0
        } else {
            env.matrix.get(i, j) as f64
        }
    };
    let profiles: Vec<Vec<f64>> = (0..n)
        .map(|v| match mode {
            ProfileMode::CitingProfiles => (0..n).map(|j| cell(v, j)).collect(),
            ProfileMode::CitedProfiles => (0..n).map(|i| cell(i, v)).collect(),
        })
        .collect();

    let (kept, dropped): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| has_variance(&profiles[i]));
    if kept.len() < 3 {
        return Err(Error::DegenerateEnvironment(format!(
            "only {} journal(s) with non-constant profiles, need at least 3",
            kept.len()
        )));
    }
    let m = kept.len();
    let mut values = Matrix::identity(m);
    for a in 0..m {
        for b in 0..a {
            let r = pearson(&profiles[kept[a]], &profiles[kept[b]]).expect("variance checked");
            values[(a, b)] = r;
            values[(b, a)] = r;
        }
    }
    let labels = kept.iter().map(|&i| env.members[i].clone()).collect();
    Ok(ProfileCorrelations {
        correlations: CorrelationMatrix { labels, values },
        dropped: dropped.iter().map(|&i| env.members[i].clone()).collect(),
    })
}

/// Eigenvalues (descending) and unit eigenvectors (columns) of a correlation
/// matrix. Each eigenvector is signed so its largest-magnitude entry is
/// positive.
#[derive(Debug, Clone)]
pub struct Components {
    pub eigenvalues: Vec<f64>,
    pub vectors: Matrix,
}

impl Components {
    /// Unrotated loadings for the first `k` components:
    /// `eigvec[f][i] * sqrt(max(eigval[f], 0))`.
    pub fn loadings(&self, k: usize) -> Matrix {
        let n = self.vectors.rows();
        Matrix::from_fn(n, k, |i, f| self.vectors[(i, f)] * self.eigenvalues[f].max(0.0).sqrt())
    }
}

pub fn extract_components(corr: &CorrelationMatrix) -> Result<Components> {
    let eig = symmetric_eigen(&corr.values, SYMMETRY_TOL)?;
    let mut vectors = eig.vectors;
    let n = vectors.rows();
    for f in 0..vectors.cols() {
        let mut pivot = 0;
        for i in 1..n {
            // first index wins among equal magnitudes
            if vectors[(i, f)].abs() > vectors[(pivot, f)].abs() {
                pivot = i;
            }
        }
        if vectors[(pivot, f)] < 0.0 {
            for i in 0..n {
                vectors[(i, f)] = -vectors[(i, f)];
            }
        }
    }
    Ok(Components { eigenvalues: eig.values, vectors })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FactorRule {
    /// Retain eigenvalues >= 1 (at least one factor).
    #[default]
    Kaiser,
    Fixed(usize),
}

impl FromStr for FactorRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("kaiser") {
            return Ok(FactorRule::Kaiser);
        }
        s.parse::<usize>()
            .map(FactorRule::Fixed)
            .map_err(|_| Error::Parameter(format!("factors must be `kaiser` or an integer, got {s:?}")))
    }
}

impl fmt::Display for FactorRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorRule::Kaiser => f.write_str("kaiser"),
            FactorRule::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl Serialize for FactorRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn select_factor_count(eigenvalues: &[f64], rule: FactorRule) -> usize {
    let n = eigenvalues.len();
    match rule {
        FactorRule::Kaiser => eigenvalues.iter().filter(|&&e| e >= 1.0).count().max(1),
        FactorRule::Fixed(k) => k.clamp(1, n.max(1)),
    }
}

/// Raw varimax criterion: sum over factors of the variance of squared
/// loadings, `Σ_f [ mean_i(λ⁴) − mean_i(λ²)² ]`.
pub fn varimax_criterion(loadings: &Matrix) -> f64 {
    let n = loadings.rows() as f64;
    (0..loadings.cols())
        .map(|f| {
            let (mut s2, mut s4) = (0.0, 0.0);
            for i in 0..loadings.rows() {
                let sq = loadings[(i, f)] * loadings[(i, f)];
                s2 += sq;
                s4 += sq * sq;
            }
            s4 / n - (s2 / n) * (s2 / n)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarimaxOptions {
    /// Maximum number of sweeps over all factor pairs.
    pub max_iter: usize,
    /// Stop once a sweep improves the criterion by less than this.
    pub tol: f64,
}

impl Default for VarimaxOptions {
    fn default() -> Self {
        Self { max_iter: 1000, tol: 1e-15 }
    }
}

#[derive(Debug, Clone)]
pub struct VarimaxRotation {
    pub loadings: Matrix,
    /// Orthogonal k×k matrix with `rotated = input · rotation`.
    pub rotation: Matrix,
    pub criterion: f64,
    pub sweeps: usize,
}

/// Orthogonal rotation maximizing the raw varimax criterion.
///
/// Uses Kaiser's pairwise scheme: every sweep visits each factor pair and
/// applies the planar rotation whose angle is the closed-form maximizer of
/// the criterion for that pair, so the criterion never decreases. Columns
/// are finally signed to have a non-negative loading sum.
pub fn varimax_rotate(loadings: &Matrix, opts: VarimaxOptions) -> VarimaxRotation {
    let (n, k) = (loadings.rows(), loadings.cols());
    let mut l = loadings.clone();
    let mut r = Matrix::identity(k);
    let mut criterion = varimax_criterion(&l);
    let mut sweeps = 0;
    if k >= 2 && n > 0 {
        while sweeps < opts.max_iter {
            sweeps += 1;
            let mut largest_angle: f64 = 0.0;
            for p in 0..k {
                for q in p + 1..k {
                    let angle = pair_angle(&l, p, q);
                    if angle.abs() < 1e-300 {
                        continue;
                    }
                    largest_angle = largest_angle.max(angle.abs());
                    let (s, c) = angle.sin_cos();
                    rotate_columns(&mut l, p, q, c, s);
                    rotate_columns(&mut r, p, q, c, s);
                }
            }
            let next = varimax_criterion(&l);
            let gain = next - criterion;
            criterion = next;
            if gain < opts.tol || largest_angle < 1e-15 {
                break;
            }
        }
    }
    for f in 0..k {
        let sum: f64 = (0..n).map(|i| l[(i, f)]).sum();
        if sum < 0.0 {
            for i in 0..n {
                l[(i, f)] = -l[(i, f)];
            }
            for i in 0..k {
                r[(i, f)] = -r[(i, f)];
            }
        }
    }
    VarimaxRotation { loadings: l, rotation: r, criterion, sweeps }
}

/// Optimal planar angle for columns `p`, `q` (Kaiser 1958, raw form).
fn pair_angle(l: &Matrix, p: usize, q: usize) -> f64 {
    let n = l.rows() as f64;
    let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..l.rows() {
        let (x, y) = (l[(i, p)], l[(i, q)]);
        let u = x * x - y * y;
        let v = 2.0 * x * y;
        a += u;
        b += v;
        c += u * u - v * v;
        d += 2.0 * u * v;
    }
    let num = d - 2.0 * a * b / n;
    let den = c - (a * a - b * b) / n;
    0.25 * num.atan2(den)
}

fn rotate_columns(m: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.rows() {
        let (x, y) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = c * x + s * y;
        m[(i, q)] = -s * x + c * y;
    }
}

/// 1-based index of each row's largest absolute loading; ties go to the
/// lower factor.
pub fn designate_clusters(loadings: &Matrix) -> Vec<usize> {
    (0..loadings.rows())
        .map(|i| {
            let row = loadings.row(i);
            let mut best = 0;
            for (f, v) in row.iter().enumerate().skip(1) {
                if v.abs() > row[best].abs() {
                    best = f;
                }
            }
            best + 1
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct FactorSolution {
    pub labels: Vec<String>,
    pub eigenvalues: Vec<f64>,
    pub k: usize,
    /// n×k rotated loadings (unrotated when k = 1).
    pub loadings: Matrix,
    pub rotation: Matrix,
    /// 1-based factor per journal.
    pub designation: Vec<usize>,
    pub criterion: f64,
}

impl FactorSolution {
    /// Journals grouped by designated factor, in label order.
    pub fn clusters(&self) -> Vec<Vec<&str>> {
        let mut out = vec![Vec::new(); self.k];
        for (label, &f) in self.labels.iter().zip(&self.designation) {
            out[f - 1].push(label.as_str());
        }
        out
    }
}

/// Extraction, retention, rotation and designation in one pass.
pub fn factor_analyze(corr: &CorrelationMatrix, rule: FactorRule, opts: VarimaxOptions) -> Result<FactorSolution> {
    let comps = extract_components(corr)?;
    let k = select_factor_count(&comps.eigenvalues, rule);
    let rot = varimax_rotate(&comps.loadings(k), opts);
    Ok(FactorSolution {
        labels: corr.labels.clone(),
        designation: designate_clusters(&rot.loadings),
        eigenvalues: comps.eigenvalues,
        k,
        loadings: rot.loadings,
        rotation: rot.rotation,
        criterion: rot.criterion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ego::{build_matrix, Dimension, Threshold};
    use crate::ingest::{aggregate, CitationRecord};
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn pearson_examples() {
        assert!(close(pearson(&[1., 2., 3.], &[2., 4., 6.]).unwrap(), 1.0, 1e-15));
        assert!(close(pearson(&[1., 2., 3.], &[3., 2., 1.]).unwrap(), -1.0, 1e-15));
        // by hand: means 1/3, deviations (2/3,-1/3,-1/3) and (-1/3,2/3,-1/3);
        // sxy = -2/9-2/9+1/9 = -1/3, sxx = syy = 6/9, r = -0.5
        assert!(close(pearson(&[1., 0., 0.], &[0., 1., 0.]).unwrap(), -0.5, 1e-15));
        assert_eq!(pearson(&[1., 1., 1.], &[1., 2., 3.]), None);
    }

    fn env_from(rows: &[&[u64]]) -> EgoEnvironment {
        let names: Vec<String> = (0..rows.len()).map(|i| format!("J{i}")).collect();
        let mut recs = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                recs.push(CitationRecord::new(1980, &names[i], &names[j], c).unwrap());
            }
        }
        let t = aggregate(recs);
        let matrix = build_matrix(&t, &names, 1980);
        EgoEnvironment {
            ego: names[0].clone(),
            year: 1980,
            dimension: Dimension::Citing,
            threshold: Threshold::ONE_PERCENT,
            members: names,
            matrix,
        }
    }

    #[test]
    fn profile_modes_and_diagonal() {
        let env = env_from(&[&[9, 1, 2, 3], &[2, 9, 4, 6], &[3, 2, 9, 1], &[1, 1, 1, 9]]);
        let rows = profile_correlations(&env, ProfileMode::CitingProfiles, true).unwrap();
        let r01 = pearson(&[0., 1., 2., 3.], &[2., 0., 4., 6.]).unwrap();
        assert!(close(rows.correlations.values[(0, 1)], r01, 1e-15));
        let cols = profile_correlations(&env, ProfileMode::CitedProfiles, false).unwrap();
        let c01 = pearson(&[9., 2., 3., 1.], &[1., 9., 2., 1.]).unwrap();
        assert!(close(cols.correlations.values[(0, 1)], c01, 1e-15));
        for m in [&rows, &cols] {
            let v = &m.correlations.values;
            assert!(v.is_symmetric(1e-12));
            assert!((0..4).all(|i| v[(i, i)] == 1.0));
        }
    }

    #[test]
    fn zero_variance_profiles_are_dropped() {
        let env = env_from(&[&[0, 1, 2, 3], &[5, 5, 5, 5], &[3, 2, 0, 1], &[1, 4, 1, 0]]);
        // J1 with zero diagonal: (5,0,5,5) varies; without: (5,5,5,5) is constant
        let zeroed = profile_correlations(&env, ProfileMode::CitingProfiles, true).unwrap();
        assert!(zeroed.dropped.is_empty());
        let with_diag = profile_correlations(&env, ProfileMode::CitingProfiles, false).unwrap();
        assert_eq!(with_diag.dropped, vec!["J1"]);
        assert_eq!(with_diag.correlations.labels, vec!["J0", "J2", "J3"]);
        let env = env_from(&[&[0, 1, 1], &[2, 2, 2], &[3, 3, 3]]);
        assert!(matches!(
            profile_correlations(&env, ProfileMode::CitingProfiles, false),
            Err(Error::DegenerateEnvironment(_))
        ));
        let tiny = env_from(&[&[0, 1], &[1, 0]]);
        assert!(matches!(
            profile_correlations(&tiny, ProfileMode::CitingProfiles, true),
            Err(Error::DegenerateEnvironment(_))
        ));
    }

    #[test]
    fn identity_components() {
        let c = CorrelationMatrix::new((0..4).map(|i| i.to_string()).collect(), Matrix::identity(4)).unwrap();
        let comps = extract_components(&c).unwrap();
        assert!(comps.eigenvalues.iter().all(|&e| e == 1.0));
    }

    #[test]
    fn two_by_two_closed_form() {
        for r in [-0.9, -0.3, 0.0, 0.25, 0.8] {
            let c =
                CorrelationMatrix::new(vec!["a".into(), "b".into()], Matrix::from_rows(&[[1.0, r], [r, 1.0]])).unwrap();
            let e = extract_components(&c).unwrap().eigenvalues;
            let (hi, lo) = (1.0 + r.abs(), 1.0 - r.abs());
            assert!(close(e[0], hi, 1e-14) && close(e[1], lo, 1e-14), "{r}: {e:?}");
        }
    }

    #[test]
    fn eigenvector_sign_rule() {
        let c = CorrelationMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            Matrix::from_rows(&[[1.0, -0.6, 0.2], [-0.6, 1.0, -0.4], [0.2, -0.4, 1.0]]),
        )
        .unwrap();
        let comps = extract_components(&c).unwrap();
        for f in 0..3 {
            let col = comps.vectors.col(f);
            let big = col.iter().cloned().fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m });
            assert!(big > 0.0);
        }
        let trace: f64 = comps.eigenvalues.iter().sum();
        assert!(close(trace, 3.0, 1e-12));
    }

    #[test]
    fn asymmetric_correlation_rejected() {
        let bad = CorrelationMatrix {
            labels: vec!["a".into(), "b".into()],
            values: Matrix::from_rows(&[[1.0, 0.5], [0.4, 1.0]]),
        };
        assert!(matches!(extract_components(&bad), Err(Error::Contract(_))));
        assert!(CorrelationMatrix::new(bad.labels.clone(), bad.values.clone()).is_err());
    }

    #[test]
    fn retention_rules() {
        assert_eq!(select_factor_count(&[2.5, 1.2, 0.8, 0.5], FactorRule::Kaiser), 2);
        assert_eq!(select_factor_count(&[0.9, 0.1], FactorRule::Kaiser), 1);
        let seventeen = vec![1.0; 17];
        assert_eq!(select_factor_count(&seventeen, FactorRule::Fixed(5)), 5);
        assert_eq!(select_factor_count(&[2.0, 1.0], FactorRule::Fixed(9)), 2);
        assert_eq!(select_factor_count(&[2.0, 1.0], FactorRule::Fixed(0)), 1);
        assert_eq!("kaiser".parse::<FactorRule>().unwrap(), FactorRule::Kaiser);
        assert_eq!("4".parse::<FactorRule>().unwrap(), FactorRule::Fixed(4));
        assert!("four".parse::<FactorRule>().is_err());
    }

    #[test]
    fn varimax_keeps_simple_structure() {
        let l = Matrix::from_rows(&[[0.9, 0.0], [0.8, 0.0], [0.0, 0.7], [0.0, 0.85]]);
        let out = varimax_rotate(&l, VarimaxOptions::default());
        assert!(out.loadings.max_abs_diff(&l) < 1e-12);
    }

    #[test]
    fn varimax_single_factor_is_identity() {
        let l = Matrix::from_rows(&[[0.9], [-0.5], [0.3]]);
        let out = varimax_rotate(&l, VarimaxOptions::default());
        assert_eq!(out.loadings, l);
        assert_eq!(out.rotation, Matrix::identity(1));
    }

    #[test]
    fn designation_rules() {
        let l = Matrix::from_rows(&[[0.9, 0.1], [0.5, -0.5], [0.2, -0.7]]);
        assert_eq!(designate_clusters(&l), vec![1, 1, 2]);
    }

    fn random_loadings(seed: u64, n: usize, k: usize) -> Matrix {
        let mut rng = crate::rng::XorShift64Star::new(seed);
        Matrix::from_fn(n, k, |_, _| rng.next_f64() * 1.6 - 0.8)
    }

    proptest! {
        #[test]
        fn varimax_ascends_and_preserves_communalities(seed in 0u64..10_000, n in 3usize..15, k in 2usize..5) {
            let k = k.min(n);
            let l = random_loadings(seed, n, k);
            let out = varimax_rotate(&l, VarimaxOptions::default());
            prop_assert!(varimax_criterion(&out.loadings) >= varimax_criterion(&l) - 1e-12);
            for i in 0..n {
                let before: f64 = l.row(i).iter().map(|x| x * x).sum();
                let after: f64 = out.loadings.row(i).iter().map(|x| x * x).sum();
                prop_assert!((before - after).abs() <= 1e-9);
            }
            let rtr = out.rotation.transpose().matmul(&out.rotation);
            prop_assert!(rtr.max_abs_diff(&Matrix::identity(k)) <= 1e-9);
            prop_assert!(l.matmul(&out.rotation).max_abs_diff(&out.loadings) <= 1e-12);
        }

        #[test]
        fn designation_follows_column_permutation(seed in 0u64..10_000, n in 1usize..10, k in 1usize..5) {
            let l = random_loadings(seed, n, k);
            let base = designate_clusters(&l);
            let mut order: Vec<usize> = (0..k).collect();
            order.reverse();
            let mut permuted = l.select_cols(&order);
            for i in 0..n {
                permuted[(i, 0)] = -permuted[(i, 0)];
            }
            let moved = designate_clusters(&permuted);
            for i in 0..n {
                let row = l.row(i);
                let best = row.iter().map(|v| v.abs()).fold(0.0, f64::max);
                let tied = row.iter().filter(|v| v.abs() == best).count() > 1;
                if !tied {
                    prop_assert_eq!(order[moved[i] - 1] + 1, base[i]);
                }
            }
        }

        #[test]
        fn positive_profile_scaling_is_invisible(seed in 0u64..10_000, scale in 1u64..7) {
            let mut rng = crate::rng::XorShift64Star::new(seed);
            let rows: Vec<Vec<u64>> = (0..5).map(|_| (0..5).map(|_| rng.below(20)).collect()).collect();
            let mut scaled = rows.clone();
            for v in scaled[2].iter_mut() {
                *v *= scale;
            }
            let r1: Vec<&[u64]> = rows.iter().map(|r| r.as_slice()).collect();
            let r2: Vec<&[u64]> = scaled.iter().map(|r| r.as_slice()).collect();
            let a = profile_correlations(&env_from(&r1), ProfileMode::CitingProfiles, false);
            let b = profile_correlations(&env_from(&r2), ProfileMode::CitingProfiles, false);
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!(a.correlations.values.max_abs_diff(&b.correlations.values) < 1e-12);
            }
        }
    }
}
