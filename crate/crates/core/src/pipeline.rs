//! End-to-end commands: the journal map pipeline and the pairwise trend
//! analysis, producing in-memory artifacts that the CLI writes to disk.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::ego::{ego_environment, ego_total, Dimension, Direction, EgoEnvironment, Threshold};
use crate::error::{Error, Result};
use crate::exec::Schedule;
use crate::export::{self, json_num, json_nums};
use crate::factors::{
    factor_analyze, profile_correlations, FactorRule, FactorSolution, ProfileCorrelations, ProfileMode, VarimaxOptions,
};
use crate::ingest::CitationTensor;
use crate::mds::{dissimilarity_from_correlation, nonmetric_mds, MapLayout, MdsOptions};
use crate::trends::{as_shares, available_years, pair_series, TrendSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Parameter(format!("unknown format {other:?}"))),
        }
    }
}

/// Parses `csv,json,svg` style lists into a sorted, de-duplicated set.
pub fn parse_formats(s: &str) -> Result<Vec<Format>> {
    let mut out: Vec<Format> = s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
    out.sort_by_key(|f| *f as u8);
    out.dedup();
    Ok(out)
}

/// Settings for one map run. Every field is echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapConfig {
    pub input: String,
    pub ego: String,
    pub year: i32,
    pub direction: Dimension,
    #[serde(serialize_with = "threshold_ratio")]
    pub threshold: Threshold,
    pub factors: FactorRule,
    pub profiles: ProfileMode,
    pub zero_diagonal: bool,
    pub dims: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    /// Trend smoothing window; unused by the map itself.
    pub window: usize,
    pub formats: Vec<Format>,
}

fn threshold_ratio<S: serde::Serializer>(t: &Threshold, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", t.numerator(), t.denominator()))
}

impl MapConfig {
    pub fn new(input: impl Into<String>, ego: impl Into<String>, year: i32) -> Self {
        let mds = MdsOptions::default();
        Self {
            input: input.into(),
            ego: ego.into(),
            year,
            direction: Dimension::Citing,
            threshold: Threshold::ONE_PERCENT,
            factors: FactorRule::Kaiser,
            profiles: ProfileMode::CitingProfiles,
            zero_diagonal: true,
            dims: mds.dims,
            seed: mds.seed,
            restarts: mds.restarts,
            max_iter: mds.max_iter,
            tol: mds.tol,
            window: 3,
            formats: vec![Format::Csv, Format::Json, Format::Svg],
        }
    }

    pub fn mds_options(&self, schedule: Schedule) -> MdsOptions {
        MdsOptions {
            dims: self.dims,
            seed: self.seed,
            restarts: self.restarts,
            max_iter: self.max_iter,
            tol: self.tol,
            schedule,
        }
    }
}

/// Correlations and factor solution for one environment.
#[derive(Debug, Clone)]
pub struct FactorAnalysis {
    pub profiles: ProfileCorrelations,
    pub solution: FactorSolution,
}

pub fn factor_environment(
    env: &EgoEnvironment,
    profiles: ProfileMode,
    zero_diagonal: bool,
    rule: FactorRule,
) -> Result<FactorAnalysis> {
    let profiles = profile_correlations(env, profiles, zero_diagonal)?;
    let solution = factor_analyze(&profiles.correlations, rule, VarimaxOptions::default())?;
    Ok(FactorAnalysis { profiles, solution })
}

#[derive(Debug, Clone)]
pub struct MapResult {
    pub config: MapConfig,
    pub environment: EgoEnvironment,
    pub analysis: FactorAnalysis,
    pub layout: MapLayout,
}

/// select members → build matrix → correlate → extract → retain → rotate →
/// designate → scale.
pub fn run_map_pipeline(tensor: &CitationTensor, config: &MapConfig, schedule: Schedule) -> Result<MapResult> {
    let environment = ego_environment(tensor, &config.ego, config.year, config.direction, config.threshold)?;
    let analysis = factor_environment(&environment, config.profiles, config.zero_diagonal, config.factors)?;
    let corr = &analysis.profiles.correlations;
    let layout = nonmetric_mds(&dissimilarity_from_correlation(corr), &corr.labels, &config.mds_options(schedule))?;
    Ok(MapResult { config: config.clone(), environment, analysis, layout })
}

impl MapResult {
    /// Member list with each journal's exchange with the ego in the
    /// selecting direction(s).
    fn members_json(&self, tensor: Option<&CitationTensor>) -> Value {
        let env = &self.environment;
        let idx = |name: &str| env.members.iter().position(|m| m == name).expect("member");
        let ego = 0;
        let members: Vec<Value> = env
            .members
            .iter()
            .map(|m| {
                let j = idx(m);
                json!({
                    "journal": m,
                    "cites_ego": env.matrix.get(j, ego),
                    "cited_by_ego": env.matrix.get(ego, j),
                })
            })
            .collect();
        let mut out = json!({ "members": members });
        if let Some(t) = tensor {
            out["ego_total_citing"] = json!(ego_total(t, &env.ego, env.year, Direction::Citing));
            out["ego_total_cited"] = json!(ego_total(t, &env.ego, env.year, Direction::Cited));
        }
        out
    }

    pub fn report(&self, tensor: &CitationTensor) -> Value {
        let sol = &self.analysis.solution;
        let layout = &self.layout;
        let env_json = self.members_json(Some(tensor));
        let loadings: Vec<Value> = sol
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| json!({ "journal": l, "loadings": json_nums(sol.loadings.row(i)), "factor": sol.designation[i] }))
            .collect();
        let coords: Vec<Value> = layout
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| json!({ "journal": l, "coords": json_nums(layout.coords.row(i)), "factor": sol.designation[i] }))
            .collect();
        let warnings: Vec<Value> = self
            .analysis
            .profiles
            .dropped
            .iter()
            .map(|j| json!({ "code": "zero-variance-profile", "journal": j }))
            .collect();
        let mut config = serde_json::to_value(&self.config).expect("config serializes");
        config["tol"] = json_num(self.config.tol);
        json!({
            "config": config,
            "environment": env_json,
            "factors": {
                "eigenvalues": json_nums(&sol.eigenvalues),
                "retained": sol.k,
                "varimax_criterion": json_num(sol.criterion),
                "loadings": loadings,
                "clusters": sol.clusters(),
            },
            "layout": {
                "points": coords,
                "stress": json_num(layout.stress),
                "best_start": layout.best_start,
            },
            "warnings": warnings,
        })
    }

    pub fn title(&self) -> String {
        format!(
            "Stimulus space for {} as ego, {} ({} patterns; threshold = {}%)",
            self.environment.ego,
            self.environment.year,
            self.environment.dimension,
            export::fmt_num(self.environment.threshold.as_f64() * 100.0)
        )
    }

    /// File name → contents for the requested formats.
    pub fn artifacts(&self, tensor: &CitationTensor) -> Vec<(&'static str, String)> {
        let sol = &self.analysis.solution;
        let mut out = Vec::new();
        for f in &self.config.formats {
            match f {
                Format::Json => out.push(("map.json", export::render_json(&self.report(tensor)))),
                Format::Csv => {
                    out.push(("layout.csv", export::layout_csv(&self.layout, &sol.designation)));
                    out.push(("loadings.csv", export::loadings_csv(sol)));
                }
                Format::Svg => out.push(("map.svg", export::map_svg(&self.layout, &sol.designation, &self.title()))),
            }
        }
        out
    }
}

/// Settings for the pairwise trend command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendConfig {
    pub input: String,
    pub journal_a: String,
    pub journal_b: String,
    pub from: Option<i32>,
    pub to: Option<i32>,
    pub window: usize,
    pub share: bool,
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone)]
pub struct TrendResult {
    pub config: TrendConfig,
    pub years: Vec<i32>,
    pub a_to_b: TrendSeries,
    pub b_to_a: TrendSeries,
    pub warnings: Vec<String>,
}

pub fn run_trend(tensor: &CitationTensor, config: &TrendConfig) -> Result<TrendResult> {
    for j in [&config.journal_a, &config.journal_b] {
        if !tensor.contains_journal(j) {
            return Err(Error::UnknownJournal(j.clone()));
        }
    }
    let first = config.from.or_else(|| tensor.years().next()).unwrap_or(0);
    let last = config.to.or_else(|| tensor.years().last()).unwrap_or(0);
    let years = available_years(tensor, first, last);
    let (mut ab, mut ba) = pair_series(tensor, &config.journal_a, &config.journal_b, &years)?;
    if config.share {
        as_shares(tensor, &mut ab);
        as_shares(tensor, &mut ba);
    }
    ab.smooth(config.window)?;
    ba.smooth(config.window)?;
    let mut warnings = Vec::new();
    if years.len() < config.window {
        warnings.push(format!(
            "{} year(s) in range, fewer than the window of {}; no moving averages",
            years.len(),
            config.window
        ));
    }
    Ok(TrendResult { config: config.clone(), years, a_to_b: ab, b_to_a: ba, warnings })
}

impl TrendResult {
    pub fn report(&self) -> Value {
        let pts = |s: &TrendSeries, smoothed: bool| -> Value {
            let src = if smoothed { &s.smoothed } else { &s.points };
            Value::Array(src.iter().map(|&(y, v)| json!({ "year": y, "value": json_num(v) })).collect())
        };
        json!({
            "config": serde_json::to_value(&self.config).expect("config serializes"),
            // windows run over consecutive years present in the data
            "window_basis": "available-years",
            "years": self.years,
            "a_cites_b": { "raw": pts(&self.a_to_b, false), "moving_average": pts(&self.a_to_b, true) },
            "b_cites_a": { "raw": pts(&self.b_to_a, false), "moving_average": pts(&self.b_to_a, true) },
            "warnings": self.warnings,
        })
    }

    pub fn artifacts(&self) -> Vec<(&'static str, String)> {
        let title = format!(
            "{}-year moving averages of citations between {} and {}",
            self.config.window, self.config.journal_a, self.config.journal_b
        );
        let mut out = Vec::new();
        for f in &self.config.formats {
            match f {
                Format::Csv => out.push(("trend.csv", export::trend_csv(&self.a_to_b, &self.b_to_a))),
                Format::Json => out.push(("trend.json", export::render_json(&self.report()))),
                Format::Svg => out.push(("trend.svg", export::trend_svg(&self.a_to_b, &self.b_to_a, &title))),
            }
        }
        out
    }
}

/// Writes artifacts into `dir` (created if needed); names never contain
/// path separators, so nothing lands outside `dir`.
pub fn write_artifacts(dir: &Path, artifacts: &[(&str, String)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, body) in artifacts {
        debug_assert!(!name.contains(['/', '\\']));
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
