//! `macrostab` command-line entry point.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use macrostab::dynamics::{Model, Which};
use macrostab::qcore::write_state_file;
use macrostab_cli::report::{to_json, write_outputs, Table};
use macrostab_cli::scenario::{
    ClusterParams, DecohereParams, MeasureParams, OutputParams, StateSpec, SymmetryBreakingParams,
};
use macrostab_cli::{
    parse_geometry, parse_sizes, parse_state_arg, run_ground, run_scenario, CliError, CliResult,
    Experiment, GroundParams, OutputFormat, Scenario, THREADS_ENV,
};

#[derive(Parser, Debug)]
#[command(
    name = "macrostab",
    version,
    about = "Macroscopic entanglement and stability experiments on spin chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Sizes as `a:b:step` (inclusive) or a single N.
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving report.json and the CSV tables.
    #[arg(long)]
    out: Option<PathBuf>,
    /// What to print on stdout when no --out directory is given.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// `open-chain` or `periodic-chain`.
    #[arg(long, default_value = "open-chain")]
    geometry: String,
    /// Raise the site cap (at most 24).
    #[arg(long)]
    max_sites: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct States {
    /// State such as `ghz`, `w`, `dicke:k=3`, `product:theta=1.5708`,
    /// `tfim-ground:h=2`, `pure-phase:h=0.1` or `file:path.state`. Repeatable.
    #[arg(long = "state", required = true)]
    states: Vec<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maximal additive fluctuation per size and the AFS/NFS verdict.
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        states: States,
    },
    /// Normalized correlation field, Ω(ε) per size and the cluster verdict.
    Cluster {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        states: States,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Measurement-stability test of local measurement pairs.
    Measure {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        states: States,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Floor on P(a) below which a conditional is not evaluated.
        #[arg(long, default_value_t = 0.05)]
        varepsilon: f64,
        /// Smallest site separation swept; defaults to N/2 per size.
        #[arg(long)]
        min_distance: Option<usize>,
        /// Also run the cluster analysis at this ε and report the correspondence.
        #[arg(long)]
        with_cluster: Option<f64>,
    },
    /// Dephasing rates (analytic and optionally trajectories) and fragility fits.
    Decohere {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        states: States,
        #[arg(long, default_value_t = 0.01)]
        kappa: f64,
        /// `x`, `y`, `z` or `optimal`.
        #[arg(long, default_value = "z")]
        axis: String,
        /// `collective`, `independent` or `exponential`. Repeatable.
        #[arg(long = "kernel")]
        kernels: Vec<String>,
        #[arg(long, default_value_t = 1.0)]
        xi: f64,
        /// Trajectories per cell; 0 computes analytic rates only.
        #[arg(long, default_value_t = 0)]
        n_traj: usize,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Lowest eigenpairs of a spin-chain Hamiltonian.
    Ground {
        #[command(flatten)]
        common: Common,
        /// `tfim` or `xxz`.
        #[arg(long, default_value = "tfim")]
        model: String,
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        #[arg(long, default_value_t = 0.0)]
        h: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Symmetry-breaking longitudinal field.
        #[arg(long, default_value_t = 0.0)]
        b: f64,
        /// Number of levels, 1 or 2.
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Symmetric ground state versus pure-phase vacuum, plus the measurement cascade.
    SymmetryBreaking {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        /// `doublet-superposition` or `sb-field-limit`.
        #[arg(long, default_value = "doublet-superposition")]
        method: String,
        #[arg(long, default_value_t = 0.01)]
        kappa: f64,
        #[arg(long)]
        cascade_max: Option<usize>,
    },
    /// Run a TOML scenario file.
    Run {
        scenario: PathBuf,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn output_format(format: Option<Format>) -> OutputFormat {
    match format {
        Some(Format::Csv) => OutputFormat::Csv,
        _ => OutputFormat::Structured,
    }
}

fn scenario_from_flags(
    name: &str,
    common: &Common,
    default_sizes: &str,
    experiments: Vec<Experiment>,
    states: &[String],
) -> CliResult<Scenario> {
    let states: Vec<StateSpec> = states
        .iter()
        .map(|s| parse_state_arg(s))
        .collect::<CliResult<_>>()?;
    Ok(Scenario {
        name: name.to_string(),
        sizes: parse_sizes(common.sizes.as_deref().unwrap_or(default_sizes))?,
        geometry: common.geometry.clone(),
        seed: common.seed,
        max_sites: common.max_sites,
        experiments,
        states,
        cluster: ClusterParams::default(),
        measure: MeasureParams::default(),
        decohere: DecohereParams::default(),
        symmetry_breaking: SymmetryBreakingParams::default(),
        output: OutputParams {
            dir: common.out.clone(),
            format: output_format(common.format),
        },
    })
}

fn emit(json: &str, tables: &[Table], out: Option<&Path>, format: OutputFormat) -> CliResult<()> {
    if let Some(dir) = out {
        write_outputs(dir, json, tables)?;
        eprintln!(
            "wrote report.json and {} table(s) to {}",
            tables.len(),
            dir.display()
        );
        return Ok(());
    }
    match format {
        OutputFormat::Structured => print!("{json}"),
        OutputFormat::Csv => {
            for t in tables {
                println!("# {}", t.name);
                print!("{}", t.csv);
            }
        }
    }
    Ok(())
}

fn run_and_emit(scenario: &Scenario) -> CliResult<()> {
    let out = run_scenario(scenario)?;
    for w in &out.report.warnings {
        eprintln!("warning: {w}");
    }
    emit(
        &out.json()?,
        &out.tables,
        scenario.output.dir.as_deref(),
        scenario.output.format,
    )
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            CliError::Validation(format!(
                "{THREADS_ENV} must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot configure {threads} threads: {e}")))
}

fn execute(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Classify { common, states } => {
            let s = scenario_from_flags(
                "classify",
                &common,
                "4:12:2",
                vec![Experiment::Classify],
                &states.states,
            )?;
            run_and_emit(&s)
        }
        Command::Cluster {
            common,
            states,
            epsilon,
        } => {
            let mut s = scenario_from_flags(
                "cluster",
                &common,
                "4:12:2",
                vec![Experiment::Cluster],
                &states.states,
            )?;
            s.cluster.epsilon = epsilon;
            run_and_emit(&s)
        }
        Command::Measure {
            common,
            states,
            epsilon,
            varepsilon,
            min_distance,
            with_cluster,
        } => {
            let mut experiments = vec![Experiment::Measure];
            if with_cluster.is_some() {
                experiments.insert(0, Experiment::Cluster);
            }
            let mut s =
                scenario_from_flags("measure", &common, "4:12:2", experiments, &states.states)?;
            s.measure = MeasureParams {
                epsilon,
                varepsilon,
                min_distance,
            };
            if let Some(eps) = with_cluster {
                s.cluster.epsilon = eps;
            }
            run_and_emit(&s)
        }
        Command::Decohere {
            common,
            states,
            kappa,
            axis,
            kernels,
            xi,
            n_traj,
            dt,
            horizon,
        } => {
            let mut s = scenario_from_flags(
                "decohere",
                &common,
                "4:10:2",
                vec![Experiment::Decohere],
                &states.states,
            )?;
            let defaults = DecohereParams::default();
            s.decohere = DecohereParams {
                kappa,
                axis,
                kernels: if kernels.is_empty() {
                    defaults.kernels
                } else {
                    kernels
                },
                xi,
                n_traj,
                dt,
                horizon,
                hamiltonian: None,
            };
            run_and_emit(&s)
        }
        Command::SymmetryBreaking {
            common,
            j,
            h,
            method,
            kappa,
            cascade_max,
        } => {
            let mut s = scenario_from_flags(
                "symmetry-breaking",
                &common,
                "6:10:2",
                vec![Experiment::SymmetryBreaking],
                &[],
            )?;
            s.symmetry_breaking = SymmetryBreakingParams {
                j,
                h,
                method,
                kappa,
                cascade_max,
            };
            run_and_emit(&s)
        }
        Command::Ground {
            common,
            model,
            j,
            h,
            delta,
            b,
            levels,
        } => {
            let which = match levels {
                1 => Which::Lowest,
                2 => Which::LowestTwo,
                other => {
                    return Err(CliError::Validation(format!(
                        "--levels must be 1 or 2, got {other}"
                    )))
                }
            };
            let model: Model = model
                .parse()
                .map_err(|e: macrostab::Error| CliError::Validation(e.to_string()))?;
            let params = GroundParams {
                model,
                j,
                h,
                delta,
                b,
                which,
                geometry: parse_geometry(&common.geometry)?,
                sizes: parse_sizes(common.sizes.as_deref().unwrap_or("8"))?,
                max_sites: common.max_sites,
                seed: common.seed,
            };
            let (report, states, table) = run_ground(&params)?;
            let json = to_json(&report)?;
            emit(
                &json,
                std::slice::from_ref(&table),
                common.out.as_deref(),
                output_format(common.format),
            )?;
            if let Some(dir) = &common.out {
                for (row, state) in report.levels.iter().zip(&states) {
                    let path = dir.join(format!("ground_n{}_level{}.state", row.n, row.level));
                    write_state_file(state, &path).map_err(CliError::from)?;
                }
            }
            Ok(())
        }
        Command::Run {
            scenario,
            seed,
            out,
            format,
        } => {
            let text = std::fs::read_to_string(&scenario)?;
            let mut s = Scenario::from_toml(&text)?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            if let Some(out) = out {
                s.output.dir = Some(out);
            }
            if let Some(format) = format {
                s.output.format = output_format(Some(format));
            }
            run_and_emit(&s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
