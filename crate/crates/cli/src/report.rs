//! Report structures serialized to JSON, plus CSV tables.

use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::scenario::Scenario;

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub version: &'static str,
    pub wall_time_seconds: f64,
}

impl Provenance {
    pub fn new(seed: u64, wall_time_seconds: f64) -> Self {
        Self {
            seed,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_seconds,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classify: Option<Vec<ClassifyEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster: Option<Vec<ClusterEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<Vec<MeasureEntry>>,
    /// Present when both cluster and measure ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correspondence: Option<Vec<CorrespondenceRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decohere: Option<DecohereSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry_breaking: Option<SymmetryBreakingSection>,
    pub warnings: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyPoint {
    pub n: usize,
    pub max_variance: f64,
    pub lambda_max: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyEntry {
    pub state: String,
    pub points: Vec<ClassifyPoint>,
    pub exponent: f64,
    pub intercept: f64,
    pub residual: f64,
    pub verdict: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterPoint {
    pub n: usize,
    pub omega: usize,
    pub omega_of_x: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterEntry {
    pub state: String,
    pub epsilon: f64,
    pub points: Vec<ClusterPoint>,
    pub has_cluster_property: bool,
    pub rule: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct WorstPair {
    pub x: usize,
    pub y: usize,
    pub direction_a: [f64; 3],
    pub direction_b: [f64; 3],
    pub a: i8,
    pub b: i8,
    pub p_a: f64,
    pub p_b_given_a: f64,
    pub p_b: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasurePoint {
    pub n: usize,
    pub min_distance: usize,
    pub max_deviation: f64,
    /// (distance, largest deviation found at that distance).
    pub max_deviation_at_distance: Vec<(usize, f64)>,
    pub worst_pair: Option<WorstPair>,
    pub stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureEntry {
    pub state: String,
    pub epsilon: f64,
    pub varepsilon: f64,
    pub points: Vec<MeasurePoint>,
    /// Verdict at the largest size.
    pub stable: bool,
    pub search: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceRow {
    pub state: String,
    pub n: usize,
    pub cluster_property: bool,
    pub measurement_stable: bool,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitSummary {
    pub k: f64,
    pub one_plus_delta: f64,
    pub residual: f64,
    pub fragile: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecoherePoint {
    pub n: usize,
    pub analytic_gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory_gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory_stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_norm_error: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecohereCell {
    pub state: String,
    pub kernel: String,
    pub points: Vec<DecoherePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_fit: Option<FitSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory_fit: Option<FitSummary>,
    /// From the trajectory fit when trajectories ran, else from the analytic fit.
    pub fragile: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecohereSection {
    pub kappa: f64,
    pub axis: String,
    pub n_traj: usize,
    pub rate_convention: &'static str,
    pub cells: Vec<DecohereCell>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseSummary {
    pub energy: f64,
    pub magnetization: f64,
    pub max_variance: f64,
    pub gamma_collective: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CascadeRow {
    pub site: usize,
    pub outcome: i8,
    pub probability: f64,
    pub max_variance: f64,
    pub nfs: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryBreakingPoint {
    pub n: usize,
    pub ground_residual: f64,
    pub symmetric: PhaseSummary,
    pub pure_phase: PhaseSummary,
    pub energy_ordering_holds: bool,
    pub gamma_ratio: f64,
    pub cascade: Vec<CascadeRow>,
    /// Number of measurements until the NFS bound held, if it did.
    pub measurements_to_nfs: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryBreakingSection {
    pub j: f64,
    pub h: f64,
    pub method: String,
    pub kappa: f64,
    pub paramagnetic: bool,
    pub cascade_nfs_bound: &'static str,
    pub sizes: Vec<SymmetryBreakingPoint>,
    pub gamma_ratio_increasing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroundRow {
    pub n: usize,
    pub level: usize,
    pub energy: f64,
    pub residual: f64,
    pub magnetization: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroundReport {
    pub model: String,
    pub j: f64,
    pub h: f64,
    pub delta: f64,
    pub b: f64,
    pub geometry: String,
    pub levels: Vec<GroundRow>,
    pub provenance: Provenance,
}

/// A named CSV file produced by a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub csv: String,
}

impl Table {
    pub fn from_rows<R: Serialize>(name: impl Into<String>, rows: &[R]) -> CliResult<Self> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row)
                .map_err(|e| CliError::Serialize(e.to_string()))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Serialize(e.to_string()))?;
        Ok(Self {
            name: name.into(),
            csv: String::from_utf8(bytes).map_err(|e| CliError::Serialize(e.to_string()))?,
        })
    }

    pub fn raw(name: impl Into<String>, csv: String) -> Self {
        Self {
            name: name.into(),
            csv,
        }
    }
}

/// Lower-case file-name fragment for a label.
pub fn slug(label: &str) -> String {
    let mut out = String::new();
    for c in label.chars() {
        if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `report.json` and every table into `dir`.
pub fn write_outputs(dir: &std::path::Path, json: &str, tables: &[Table]) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), json)?;
    for t in tables {
        std::fs::write(dir.join(&t.name), &t.csv)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs_are_file_safe() {
        assert_eq!(
            slug("product(theta=1.5708,phi=0)"),
            "product_theta_1.5708_phi_0"
        );
        assert_eq!(slug("ghz"), "ghz");
    }

    #[test]
    fn tables_have_headers() {
        let t = Table::from_rows(
            "x.csv",
            &[CorrespondenceRow {
                state: "ghz".into(),
                n: 4,
                cluster_property: false,
                measurement_stable: false,
                agree: true,
            }],
        )
        .unwrap();
        assert!(t
            .csv
            .starts_with("state,n,cluster_property,measurement_stable,agree\n"));
    }
}
