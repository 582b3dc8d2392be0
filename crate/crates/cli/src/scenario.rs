//! Declarative experiment descriptions (TOML) and their validation.
//!
//! Unknown keys anywhere in a scenario are rejected, as are parameters that
//! do not apply to the chosen state kind.

use std::path::PathBuf;

use macrostab::dynamics::{Kernel, Model, VacuumMethod};
use macrostab::qcore::{read_state_header, Axis, Geometry, LatticeSpec, DEFAULT_MAX_SITES};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliError, CliResult, Context};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Classify,
    Cluster,
    Measure,
    Decohere,
    SymmetryBreaking,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub sizes: Vec<usize>,
    #[serde(default = "default_geometry")]
    pub geometry: String,
    #[serde(default)]
    pub seed: u64,
    /// Site cap; defaults to the library default of 14.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_sites: Option<usize>,
    pub experiments: Vec<Experiment>,
    #[serde(default)]
    pub states: Vec<StateSpec>,
    #[serde(default)]
    pub cluster: ClusterParams,
    #[serde(default)]
    pub measure: MeasureParams,
    #[serde(default)]
    pub decohere: DecohereParams,
    #[serde(default)]
    pub symmetry_breaking: SymmetryBreakingParams,
    #[serde(default)]
    pub output: OutputParams,
}

fn default_geometry() -> String {
    "open-chain".into()
}

/// One catalog entry. Which optional fields are allowed depends on `kind`:
///
/// | kind          | fields                      |
/// |---------------|-----------------------------|
/// | `product`     | `theta`, `phi`              |
/// | `ghz`, `w`    | none                        |
/// | `dicke`       | `k` (default N/2)           |
/// | `tfim-ground` | `j` (default 1), `h`        |
/// | `pure-phase`  | `j`, `h`, `method`          |
/// | `file`        | `path` (fixes the size)     |
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterParams {
    pub epsilon: f64,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self { epsilon: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureParams {
    pub epsilon: f64,
    pub varepsilon: f64,
    /// Smallest |x − y| swept; defaults to ⌊N/2⌋ per size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_distance: Option<usize>,
}

impl Default for MeasureParams {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            varepsilon: macrostab::measure::DEFAULT_CONDITIONING_FLOOR,
            min_distance: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianParams {
    pub model: String,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default)]
    pub h: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub b: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecohereParams {
    pub kappa: f64,
    /// `x`, `y`, `z`, or `optimal` for the state's maximal-fluctuation operator.
    pub axis: String,
    pub kernels: Vec<String>,
    /// Correlation length of the exponential kernel, in sites.
    pub xi: f64,
    /// Trajectories per cell; 0 runs the analytic rate only.
    pub n_traj: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Optional system Hamiltonian during the noisy evolution (default H = 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianParams>,
}

impl Default for DecohereParams {
    fn default() -> Self {
        Self {
            kappa: 0.01,
            axis: "z".into(),
            kernels: vec!["collective".into(), "independent".into()],
            xi: 1.0,
            n_traj: 0,
            dt: None,
            horizon: None,
            hamiltonian: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymmetryBreakingParams {
    pub j: f64,
    pub h: f64,
    pub method: String,
    /// Intensity of the collective z noise used for the rate comparison.
    pub kappa: f64,
    /// Largest number of σ_z measurements in the cascade; defaults to N.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cascade_max: Option<usize>,
}

impl Default for SymmetryBreakingParams {
    fn default() -> Self {
        Self {
            j: 1.0,
            h: 0.1,
            method: "doublet-superposition".into(),
            kappa: 0.01,
            cascade_max: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Structured,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl Scenario {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn has(&self, experiment: Experiment) -> bool {
        self.experiments.contains(&experiment)
    }
}

/// Parses `a:b:step` (inclusive) or a single size.
pub fn parse_sizes(text: &str) -> CliResult<Vec<usize>> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| CliError::Validation(format!("bad size {s:?} in {text:?}")))
    };
    let (a, b, step) = match parts.as_slice() {
        [a] => (num(a)?, num(a)?, 1),
        [a, b] => (num(a)?, num(b)?, 1),
        [a, b, s] => (num(a)?, num(b)?, num(s)?),
        _ => invalid!("sizes must look like a:b:step, got {text:?}"),
    };
    if step == 0 || b < a {
        invalid!("empty size range {text:?}");
    }
    Ok((a..=b).step_by(step).collect())
}

pub fn parse_geometry(text: &str) -> CliResult<Geometry> {
    match text {
        "open-chain" | "open" => Ok(Geometry::OpenChain),
        "periodic-chain" | "periodic" => Ok(Geometry::PeriodicChain),
        other => invalid!("unknown geometry {other:?}"),
    }
}

/// Parses a command-line state description such as `ghz`,
/// `product:theta=1.5708,phi=0` or `tfim-ground:h=2`.
pub fn parse_state_arg(text: &str) -> CliResult<StateSpec> {
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut spec = StateSpec {
        kind: kind.to_string(),
        ..StateSpec::default()
    };
    if kind == "file" {
        spec.path = Some(PathBuf::from(rest));
        return Ok(spec);
    }
    for item in rest.split(',').filter(|s| !s.is_empty()) {
        let Some((key, value)) = item.split_once('=') else {
            invalid!("expected key=value in state {text:?}, got {item:?}");
        };
        let float = || {
            value
                .parse::<f64>()
                .map_err(|_| CliError::Validation(format!("bad number {value:?} for {key}")))
        };
        match key {
            "theta" => spec.theta = Some(float()?),
            "phi" => spec.phi = Some(float()?),
            "j" => spec.j = Some(float()?),
            "h" => spec.h = Some(float()?),
            "k" => {
                spec.k =
                    Some(value.parse().map_err(|_| {
                        CliError::Validation(format!("bad integer {value:?} for k"))
                    })?)
            }
            "method" => spec.method = Some(value.to_string()),
            "label" => spec.label = Some(value.to_string()),
            other => invalid!("unknown state parameter {other:?}"),
        }
    }
    Ok(spec)
}

/// A state kind with its parameters resolved.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSource {
    Product {
        theta: f64,
        phi: f64,
    },
    Ghz,
    W,
    Dicke {
        k: Option<usize>,
    },
    TfimGround {
        j: f64,
        h: f64,
    },
    PurePhase {
        j: f64,
        h: f64,
        method: VacuumMethod,
    },
    File {
        path: PathBuf,
        n_sites: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub label: String,
    pub source: StateSource,
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x}");
    if s.len() > 8 {
        format!("{x:.4}")
    } else {
        s
    }
}

impl StateSpec {
    fn resolve(&self) -> CliResult<CatalogEntry> {
        let allowed: &[&str] = match self.kind.as_str() {
            "product" => &["theta", "phi"],
            "ghz" | "w" => &[],
            "dicke" => &["k"],
            "tfim-ground" => &["j", "h"],
            "pure-phase" => &["j", "h", "method"],
            "file" => &["path"],
            other => invalid!("unknown state kind {other:?}"),
        };
        let present = [
            ("theta", self.theta.is_some()),
            ("phi", self.phi.is_some()),
            ("k", self.k.is_some()),
            ("j", self.j.is_some()),
            ("h", self.h.is_some()),
            ("method", self.method.is_some()),
            ("path", self.path.is_some()),
        ];
        for (name, set) in present {
            if set && !allowed.contains(&name) {
                invalid!(
                    "parameter {name} does not apply to state kind {}",
                    self.kind
                );
            }
        }
        for (name, v) in [
            ("theta", self.theta),
            ("phi", self.phi),
            ("j", self.j),
            ("h", self.h),
        ] {
            if let Some(v) = v {
                if !v.is_finite() {
                    invalid!("state parameter {name} must be finite");
                }
            }
        }
        let (source, default_label) = match self.kind.as_str() {
            "product" => {
                let (theta, phi) = (self.theta.unwrap_or(0.0), self.phi.unwrap_or(0.0));
                (
                    StateSource::Product { theta, phi },
                    format!("product(theta={},phi={})", fmt_num(theta), fmt_num(phi)),
                )
            }
            "ghz" => (StateSource::Ghz, "ghz".into()),
            "w" => (StateSource::W, "w".into()),
            "dicke" => (
                StateSource::Dicke { k: self.k },
                match self.k {
                    Some(k) => format!("dicke(k={k})"),
                    None => "dicke(k=N/2)".into(),
                },
            ),
            "tfim-ground" => {
                let Some(h) = self.h else {
                    invalid!("tfim-ground needs a transverse field h");
                };
                let j = self.j.unwrap_or(1.0);
                (
                    StateSource::TfimGround { j, h },
                    format!("tfim-ground(j={},h={})", fmt_num(j), fmt_num(h)),
                )
            }
            "pure-phase" => {
                let Some(h) = self.h else {
                    invalid!("pure-phase needs a transverse field h");
                };
                let j = self.j.unwrap_or(1.0);
                let method: VacuumMethod = self
                    .method
                    .as_deref()
                    .unwrap_or("doublet-superposition")
                    .parse()
                    .map_err(|e: macrostab::Error| CliError::Validation(e.to_string()))?;
                (
                    StateSource::PurePhase { j, h, method },
                    format!("pure-phase(j={},h={},{method})", fmt_num(j), fmt_num(h)),
                )
            }
            "file" => {
                let Some(path) = self.path.clone() else {
                    invalid!("file state needs a path");
                };
                let file = std::fs::File::open(&path).map_err(|e| {
                    CliError::Validation(format!("cannot open state file {}: {e}", path.display()))
                })?;
                let n_sites = read_state_header(std::io::BufReader::new(file))
                    .context(|| format!("reading header of {}", path.display()))?;
                let label = format!(
                    "file({})",
                    path.file_name()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default()
                );
                (StateSource::File { path, n_sites }, label)
            }
            _ => unreachable!(),
        };
        Ok(CatalogEntry {
            label: self.label.clone().unwrap_or(default_label),
            source,
        })
    }
}

/// Everything the runners need, checked against every module precondition.
#[derive(Clone, Debug)]
pub struct ValidScenario {
    pub scenario: Scenario,
    pub lattices: Vec<LatticeSpec>,
    pub catalog: Vec<CatalogEntry>,
    pub kernels: Vec<Kernel<f64>>,
    pub axis: Option<Axis>,
    pub vacuum_method: VacuumMethod,
    pub hamiltonian_model: Option<Model>,
}

fn in_open_unit(name: &str, v: f64) -> CliResult<()> {
    if !(v > 0.0 && v < 1.0) {
        invalid!("{name} must lie in (0, 1), got {v}");
    }
    Ok(())
}

pub fn validate(scenario: &Scenario) -> CliResult<ValidScenario> {
    let s = scenario;
    if s.experiments.is_empty() {
        invalid!("scenario {:?} lists no experiments", s.name);
    }
    if s.sizes.is_empty() {
        invalid!("size list is empty");
    }
    if s.sizes.windows(2).any(|w| w[0] >= w[1]) {
        invalid!("sizes must be strictly ascending, got {:?}", s.sizes);
    }
    let scaling = [
        Experiment::Classify,
        Experiment::Cluster,
        Experiment::Decohere,
    ];
    if scaling.iter().any(|e| s.has(*e)) && s.sizes.len() < 3 {
        invalid!("scaling fits need at least three sizes, got {:?}", s.sizes);
    }
    let geometry = parse_geometry(&s.geometry)?;
    let cap = s.max_sites.unwrap_or(DEFAULT_MAX_SITES);
    let lattices = s
        .sizes
        .iter()
        .map(|&n| LatticeSpec::with_cap(n, geometry, cap).context(|| format!("size N = {n}")))
        .collect::<CliResult<Vec<_>>>()?;

    let needs_states = s
        .experiments
        .iter()
        .any(|e| *e != Experiment::SymmetryBreaking);
    if needs_states && s.states.is_empty() {
        invalid!(
            "experiments {:?} need at least one [[states]] entry",
            s.experiments
        );
    }
    let catalog = s
        .states
        .iter()
        .map(StateSpec::resolve)
        .collect::<CliResult<Vec<_>>>()?;
    for (i, entry) in catalog.iter().enumerate() {
        if catalog[..i].iter().any(|e| e.label == entry.label) {
            invalid!("duplicate state label {:?}", entry.label);
        }
        match &entry.source {
            StateSource::File { n_sites, path } => {
                if s.sizes != [*n_sites] {
                    invalid!(
                        "state file {} holds {n_sites} sites but the scenario sizes are {:?}",
                        path.display(),
                        s.sizes
                    );
                }
            }
            StateSource::Ghz if s.sizes[0] < 2 => invalid!("ghz needs N ≥ 2"),
            StateSource::Dicke { k: Some(k) } if s.sizes.iter().any(|n| k > n) => {
                invalid!("dicke k = {k} exceeds the smallest size")
            }
            _ => {}
        }
    }

    if s.has(Experiment::Cluster) {
        in_open_unit("cluster.epsilon", s.cluster.epsilon)?;
    }
    if s.has(Experiment::Measure) {
        in_open_unit("measure.epsilon", s.measure.epsilon)?;
        in_open_unit("measure.varepsilon", s.measure.varepsilon)?;
        for &n in &s.sizes {
            let d = s.measure.min_distance.unwrap_or((n / 2).max(1));
            if d >= n {
                invalid!("measure.min_distance {d} must be smaller than N = {n}");
            }
        }
    }
    let mut kernels = Vec::new();
    let mut axis = None;
    let mut hamiltonian_model = None;
    if s.has(Experiment::Decohere) {
        let d = &s.decohere;
        if !(d.kappa.is_finite() && d.kappa > 0.0) {
            invalid!("decohere.kappa must be positive, got {}", d.kappa);
        }
        if d.kernels.is_empty() {
            invalid!("decohere.kernels is empty");
        }
        for name in &d.kernels {
            let kernel =
                Kernel::parse(name, Some(d.xi)).map_err(|e| CliError::Validation(e.to_string()))?;
            if kernels.contains(&kernel) {
                invalid!("kernel {name} listed twice");
            }
            kernels.push(kernel);
        }
        if !(d.xi.is_finite() && d.xi > 0.0) {
            invalid!("decohere.xi must be positive");
        }
        axis = match d.axis.as_str() {
            "optimal" => None,
            other => Some(
                other
                    .parse::<Axis>()
                    .map_err(|e| CliError::Validation(e.to_string()))?,
            ),
        };
        if d.n_traj != 0 && d.n_traj < macrostab::dynamics::MIN_TRAJECTORIES {
            invalid!(
                "decohere.n_traj must be 0 (analytic only) or at least {}",
                macrostab::dynamics::MIN_TRAJECTORIES
            );
        }
        for (name, v) in [("dt", d.dt), ("horizon", d.horizon)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    invalid!("decohere.{name} must be positive");
                }
            }
        }
        if let Some(hp) = &d.hamiltonian {
            hamiltonian_model = Some(
                hp.model
                    .parse::<Model>()
                    .map_err(|e| CliError::Validation(e.to_string()))?,
            );
            if ![hp.j, hp.h, hp.delta, hp.b].iter().all(|v| v.is_finite()) {
                invalid!("decohere.hamiltonian couplings must be finite");
            }
        }
        // The stability bound depends on the kernel spectrum; check it per cell now.
        for lattice in &lattices {
            for kernel in &kernels {
                let noise = macrostab::dynamics::NoiseModel::axis(
                    axis.unwrap_or(Axis::Z),
                    d.kappa,
                    *kernel,
                );
                let prepared = noise
                    .prepare(lattice)
                    .context(|| format!("noise model {kernel} at N = {}", lattice.n_sites()))?;
                if let Some(dt) = d.dt {
                    if d.n_traj > 0 && dt > prepared.max_step() {
                        invalid!(
                            "decohere.dt = {dt} violates the stability bound {:e} for {kernel} at N = {}",
                            prepared.max_step(),
                            lattice.n_sites()
                        );
                    }
                }
            }
        }
    }
    let vacuum_method: VacuumMethod = s
        .symmetry_breaking
        .method
        .parse()
        .map_err(|e: macrostab::Error| CliError::Validation(e.to_string()))?;
    if s.has(Experiment::SymmetryBreaking) {
        let p = &s.symmetry_breaking;
        if !(p.j.is_finite() && p.h.is_finite()) {
            invalid!("symmetry_breaking couplings must be finite");
        }
        if !(p.kappa.is_finite() && p.kappa > 0.0) {
            invalid!("symmetry_breaking.kappa must be positive");
        }
        if s.sizes[0] < 2 {
            invalid!("symmetry breaking needs N ≥ 2");
        }
    }
    Ok(ValidScenario {
        scenario: s.clone(),
        lattices,
        catalog,
        kernels,
        axis,
        vacuum_method,
        hamiltonian_model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "demo"
sizes = [4, 6, 8]
experiments = ["classify", "cluster"]

[[states]]
kind = "ghz"

[[states]]
kind = "product"
theta = 1.5707963267948966
"#;

    #[test]
    fn parses_and_validates() {
        let s = Scenario::from_toml(MINIMAL).unwrap();
        let v = validate(&s).unwrap();
        assert_eq!(v.catalog.len(), 2);
        assert_eq!(v.catalog[0].label, "ghz");
        assert_eq!(s.cluster.epsilon, 0.1);
    }

    #[test]
    fn partial_sections_keep_defaults() {
        let s = Scenario::from_toml(&format!(
            "{MINIMAL}\n[decohere]\nn_traj = 200\n[measure]\nmin_distance = 1\n"
        ))
        .unwrap();
        assert_eq!(s.decohere.n_traj, 200);
        assert_eq!(s.decohere.kappa, 0.01);
        assert_eq!(s.decohere.kernels, ["collective", "independent"]);
        assert_eq!(s.measure.epsilon, 0.05);
        assert_eq!(s.measure.min_distance, Some(1));
        let typo = format!("{MINIMAL}\n[decohere]\nkapa = 0.1\n");
        assert!(Scenario::from_toml(&typo).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let typo = MINIMAL.replace("theta =", "thta =");
        assert!(matches!(
            Scenario::from_toml(&typo),
            Err(CliError::Parse(_))
        ));
        let top = format!("{MINIMAL}\nsede = 3\n");
        assert!(Scenario::from_toml(&top).is_err());
    }

    #[test]
    fn irrelevant_parameters_are_rejected() {
        let s = Scenario::from_toml(&MINIMAL.replace("kind = \"ghz\"", "kind = \"ghz\"\nh = 2.0"))
            .unwrap();
        assert!(matches!(validate(&s), Err(CliError::Validation(_))));
    }

    #[test]
    fn size_rules() {
        assert_eq!(parse_sizes("4:12:2").unwrap(), vec![4, 6, 8, 10, 12]);
        assert_eq!(parse_sizes("5").unwrap(), vec![5]);
        assert!(parse_sizes("8:4:2").is_err());
        let mut s = Scenario::from_toml(MINIMAL).unwrap();
        s.sizes = vec![4, 6];
        assert_eq!(validate(&s).unwrap_err().exit_code(), 2);
        s.sizes = vec![4, 6, 40];
        assert_eq!(validate(&s).unwrap_err().exit_code(), 4);
        s.sizes = vec![6, 4, 8];
        assert_eq!(validate(&s).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn state_arguments() {
        let s = parse_state_arg("product:theta=1.5,phi=0.25").unwrap();
        assert_eq!((s.theta, s.phi), (Some(1.5), Some(0.25)));
        let s = parse_state_arg("file:/tmp/x.state").unwrap();
        assert_eq!(s.path.unwrap(), PathBuf::from("/tmp/x.state"));
        assert!(parse_state_arg("ghz:z=1").is_err());
    }
}
