//! Executes validated scenarios and assembles reports.

use std::time::Instant;

use macrostab::analyzer::{classify_scaling, max_additive_fluctuation};
use macrostab::cluster::{cluster_verdict, correlation_field, omega_from_field, CLUSTER_RULE};
use macrostab::dynamics::{
    analytic_dephasing_rate, build_hamiltonian, evolve_noisy, fit_gamma_scaling, ground_state,
    magnetization, pure_phase_vacuum, Coupling, DecoherenceFit, EnsembleConfig, Hamiltonian,
    HamiltonianSpec, Kernel, Model, NoiseModel, VacuumMethod, Which, DEFAULT_STEPS,
};
use macrostab::measure::{measurement_cascade, stability_test, CASCADE_NFS_FACTOR};
use macrostab::qcore::{
    make_dicke, make_ghz, make_uniform_product_state, make_w, read_state_file, Axis, Geometry,
    LatticeSpec, LocalOperator, StateVector, DEFAULT_MAX_SITES,
};

use crate::error::{invalid, CliError, CliResult, Context};
use crate::report::*;
use crate::scenario::{validate, CatalogEntry, Experiment, Scenario, StateSource, ValidScenario};

/// Recorded in every decoherence report.
pub const RATE_CONVENTION: &str =
    "initial slope of -ln F(t), weighted least squares through the origin over the first 5% of the horizon";

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    pub tables: Vec<Table>,
}

impl RunOutput {
    pub fn json(&self) -> CliResult<String> {
        to_json(&self.report)
    }
}

fn build_state(
    entry: &CatalogEntry,
    lattice: &LatticeSpec,
    warnings: &mut Vec<String>,
) -> CliResult<StateVector<f64>> {
    let n = lattice.n_sites();
    let ctx = || format!("building state {} at N = {n}", entry.label);
    let state = match &entry.source {
        StateSource::Product { theta, phi } => {
            make_uniform_product_state(*lattice, *theta, *phi).context(ctx)?
        }
        StateSource::Ghz => make_ghz(*lattice).context(ctx)?,
        StateSource::W => make_w(*lattice).context(ctx)?,
        StateSource::Dicke { k } => make_dicke(*lattice, k.unwrap_or(n / 2)).context(ctx)?,
        StateSource::TfimGround { j, h } => {
            let ham = build_hamiltonian(&HamiltonianSpec::transverse_ising(*lattice, *j, *h))
                .context(ctx)?;
            ground_state(&ham, Which::Lowest)
                .context(ctx)?
                .remove(0)
                .state
        }
        StateSource::PurePhase { j, h, method } => {
            let vac = pure_phase_vacuum(
                &HamiltonianSpec::transverse_ising(*lattice, *j, *h),
                *method,
            )
            .context(ctx)?;
            if vac.paramagnetic {
                warnings.push(format!(
                    "{}: |h| ≥ |J|, no ordered phase; pure-phase vacuum at N = {n} is not meaningful",
                    entry.label
                ));
            }
            vac.state
        }
        StateSource::File { path, .. } => read_state_file::<f64>(path)
            .and_then(|s| s.with_lattice(*lattice))
            .context(ctx)?,
    };
    Ok(state)
}

fn fit_summary(fit: &DecoherenceFit<f64>) -> FitSummary {
    FitSummary {
        k: fit.k,
        one_plus_delta: fit.one_plus_delta,
        residual: fit.residual,
        fragile: fit.fragile,
    }
}

/// Runs every experiment in the scenario, in a fixed section order.
pub fn run_scenario(scenario: &Scenario) -> CliResult<RunOutput> {
    let start = Instant::now();
    let v = validate(scenario)?;
    let mut warnings = Vec::new();
    let mut tables = Vec::new();
    let needs_states = v
        .scenario
        .experiments
        .iter()
        .any(|e| *e != Experiment::SymmetryBreaking);
    let states: Vec<Vec<StateVector<f64>>> = if needs_states {
        v.catalog
            .iter()
            .map(|entry| {
                v.lattices
                    .iter()
                    .map(|l| build_state(entry, l, &mut warnings))
                    .collect()
            })
            .collect::<CliResult<_>>()?
    } else {
        Vec::new()
    };
    let s = &v.scenario;
    let classify = if s.has(Experiment::Classify) {
        Some(run_classify(&v, &states, &mut tables)?)
    } else {
        None
    };
    let cluster = if s.has(Experiment::Cluster) {
        Some(run_cluster(&v, &states, &mut tables)?)
    } else {
        None
    };
    let measure = if s.has(Experiment::Measure) {
        Some(run_measure(&v, &states, &mut tables)?)
    } else {
        None
    };
    let correspondence = match (&cluster, &measure) {
        (Some(c), Some(m)) => {
            let n = *s.sizes.last().unwrap();
            let rows: Vec<CorrespondenceRow> = c
                .iter()
                .zip(m)
                .map(|(c, m)| CorrespondenceRow {
                    state: c.state.clone(),
                    n,
                    cluster_property: c.has_cluster_property,
                    measurement_stable: m.stable,
                    agree: c.has_cluster_property == m.stable,
                })
                .collect();
            tables.push(Table::from_rows("correspondence.csv", &rows)?);
            Some(rows)
        }
        _ => None,
    };
    let decohere = if s.has(Experiment::Decohere) {
        Some(run_decohere(&v, &states, &mut tables)?)
    } else {
        None
    };
    let symmetry_breaking = if s.has(Experiment::SymmetryBreaking) {
        Some(run_symmetry_breaking(&v, &mut tables, &mut warnings)?)
    } else {
        None
    };
    Ok(RunOutput {
        report: Report {
            scenario: s.clone(),
            classify,
            cluster,
            measure,
            correspondence,
            decohere,
            symmetry_breaking,
            warnings,
            provenance: Provenance::new(s.seed, start.elapsed().as_secs_f64()),
        },
        tables,
    })
}

pub fn run_classify(
    v: &ValidScenario,
    states: &[Vec<StateVector<f64>>],
    tables: &mut Vec<Table>,
) -> CliResult<Vec<ClassifyEntry>> {
    #[derive(serde::Serialize)]
    struct Row<'a> {
        state: &'a str,
        n: usize,
        max_variance: f64,
        lambda_max: f64,
    }
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for (entry, per_size) in v.catalog.iter().zip(states) {
        let mut points = Vec::new();
        for state in per_size {
            let f = max_additive_fluctuation(state)
                .context(|| format!("fluctuation of {} at N = {}", entry.label, state.n_sites()))?;
            points.push(ClassifyPoint {
                n: state.n_sites(),
                max_variance: f.max_variance,
                lambda_max: f.lambda_max,
            });
        }
        let fit_points: Vec<(usize, f64)> = points.iter().map(|p| (p.n, p.max_variance)).collect();
        let verdict =
            classify_scaling(&fit_points).context(|| format!("scaling fit for {}", entry.label))?;
        for p in &points {
            rows.push(Row {
                state: &entry.label,
                n: p.n,
                max_variance: p.max_variance,
                lambda_max: p.lambda_max,
            });
        }
        entries.push(ClassifyEntry {
            state: entry.label.clone(),
            points,
            exponent: verdict.exponent,
            intercept: verdict.intercept,
            residual: verdict.residual,
            verdict: verdict.verdict.to_string(),
        });
    }
    tables.push(Table::from_rows("classify.csv", &rows)?);
    Ok(entries)
}

pub fn run_cluster(
    v: &ValidScenario,
    states: &[Vec<StateVector<f64>>],
    tables: &mut Vec<Table>,
) -> CliResult<Vec<ClusterEntry>> {
    #[derive(serde::Serialize)]
    struct Row<'a> {
        state: &'a str,
        n: usize,
        omega: usize,
    }
    let epsilon = v.scenario.cluster.epsilon;
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for (entry, per_size) in v.catalog.iter().zip(states) {
        let mut points = Vec::new();
        for (i, state) in per_size.iter().enumerate() {
            let n = state.n_sites();
            let ctx = || format!("cluster analysis of {} at N = {n}", entry.label);
            let field = correlation_field(state).context(ctx)?;
            let report = omega_from_field(&field, epsilon).context(ctx)?;
            if i + 1 == per_size.len() {
                tables.push(Table::raw(
                    format!("rho_{}_n{n}.csv", slug(&entry.label)),
                    field.to_csv(),
                ));
            }
            rows.push(Row {
                state: &entry.label,
                n,
                omega: report.omega,
            });
            points.push(ClusterPoint {
                n,
                omega: report.omega,
                omega_of_x: report.omega_of_x,
            });
        }
        let seq: Vec<(usize, usize)> = points.iter().map(|p| (p.n, p.omega)).collect();
        let verdict =
            cluster_verdict(&seq).context(|| format!("cluster verdict for {}", entry.label))?;
        entries.push(ClusterEntry {
            state: entry.label.clone(),
            epsilon,
            points,
            has_cluster_property: verdict.has_cluster_property,
            rule: CLUSTER_RULE,
        });
    }
    tables.push(Table::from_rows("cluster.csv", &rows)?);
    Ok(entries)
}

pub fn run_measure(
    v: &ValidScenario,
    states: &[Vec<StateVector<f64>>],
    tables: &mut Vec<Table>,
) -> CliResult<Vec<MeasureEntry>> {
    #[derive(serde::Serialize)]
    struct Row<'a> {
        state: &'a str,
        n: usize,
        min_distance: usize,
        max_deviation: f64,
        stable: bool,
    }
    let p = &v.scenario.measure;
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    let mut search = macrostab::measure::SEARCH_VERSION;
    for (entry, per_size) in v.catalog.iter().zip(states) {
        let mut points = Vec::new();
        for (i, state) in per_size.iter().enumerate() {
            let n = state.n_sites();
            let min_distance = p.min_distance.unwrap_or((n / 2).max(1));
            let report = stability_test(state, p.epsilon, p.varepsilon, min_distance)
                .context(|| format!("measurement stability of {} at N = {n}", entry.label))?;
            search = report.search;
            if i + 1 == per_size.len() {
                tables.push(Table::raw(
                    format!("deviations_{}_n{n}.csv", slug(&entry.label)),
                    report.to_csv(),
                ));
            }
            let worst_pair = report.worst_pair().map(|w| WorstPair {
                x: w.x,
                y: w.y,
                direction_a: w.direction_a,
                direction_b: w.direction_b,
                a: w.a,
                b: w.b,
                p_a: w.p_a,
                p_b_given_a: w.p_b_given_a,
                p_b: w.p_b,
                deviation: w.deviation,
            });
            rows.push(Row {
                state: &entry.label,
                n,
                min_distance,
                max_deviation: report.max_deviation,
                stable: report.stable,
            });
            points.push(MeasurePoint {
                n,
                min_distance,
                max_deviation: report.max_deviation,
                max_deviation_at_distance: report.max_deviation_at_distance.clone(),
                worst_pair,
                stable: report.stable,
            });
        }
        let stable = points.last().map(|p| p.stable).unwrap_or(true);
        entries.push(MeasureEntry {
            state: entry.label.clone(),
            epsilon: p.epsilon,
            varepsilon: p.varepsilon,
            points,
            stable,
            search,
        });
    }
    tables.push(Table::from_rows("measure.csv", &rows)?);
    Ok(entries)
}

/// Per-site coupling operators along the state's maximal-fluctuation operator.
fn optimal_coupling(state: &StateVector<f64>) -> CliResult<Coupling<f64>> {
    let f = max_additive_fluctuation(state)?;
    let c = &f.optimal_coefficients;
    Ok(Coupling::Operators(
        (0..state.n_sites())
            .map(|x| {
                LocalOperator::from_pauli_coefficients(
                    x,
                    0.0,
                    [c[3 * x], c[3 * x + 1], c[3 * x + 2]],
                )
            })
            .collect(),
    ))
}

fn decohere_hamiltonian(
    v: &ValidScenario,
    lattice: &LatticeSpec,
) -> CliResult<Option<Hamiltonian<f64>>> {
    let (Some(hp), Some(model)) = (&v.scenario.decohere.hamiltonian, v.hamiltonian_model) else {
        return Ok(None);
    };
    let spec = HamiltonianSpec {
        model,
        lattice: *lattice,
        j: hp.j,
        h: hp.h,
        delta: hp.delta,
        b: hp.b,
    };
    Ok(Some(build_hamiltonian(&spec)?))
}

/// Distinct, reproducible seed per (state, kernel, size) cell.
fn cell_seed(seed: u64, state: usize, kernel: usize, size: usize) -> u64 {
    let mut x = seed;
    for part in [state, kernel, size] {
        x = (x ^ part as u64)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .rotate_left(29);
    }
    x
}

pub fn run_decohere(
    v: &ValidScenario,
    states: &[Vec<StateVector<f64>>],
    tables: &mut Vec<Table>,
) -> CliResult<DecohereSection> {
    #[derive(serde::Serialize)]
    struct Row<'a> {
        state: &'a str,
        kernel: &'a str,
        n: usize,
        gamma_analytic: f64,
        gamma_trajectory: Option<f64>,
        gamma_stderr: Option<f64>,
    }
    let p = &v.scenario.decohere;
    let mut cells = Vec::new();
    let mut rows = Vec::new();
    let hamiltonians = v
        .lattices
        .iter()
        .map(|l| decohere_hamiltonian(v, l))
        .collect::<CliResult<Vec<_>>>()?;
    for (si, (entry, per_size)) in v.catalog.iter().zip(states).enumerate() {
        for (ki, kernel) in v.kernels.iter().enumerate() {
            let kernel_name = kernel.to_string();
            let mut points = Vec::new();
            for (ni, state) in per_size.iter().enumerate() {
                let n = state.n_sites();
                let ctx = || {
                    format!(
                        "decoherence of {} under {kernel_name} noise at N = {n}",
                        entry.label
                    )
                };
                let coupling = match v.axis {
                    Some(axis) => Coupling::Axis(axis),
                    None => optimal_coupling(state)?,
                };
                let noise = NoiseModel::new(coupling, p.kappa, *kernel);
                let analytic = analytic_dephasing_rate(state, &noise).context(ctx)?;
                let mut point = DecoherePoint {
                    n,
                    analytic_gamma: analytic,
                    trajectory_gamma: None,
                    trajectory_stderr: None,
                    dt: None,
                    horizon: None,
                    fit_points: None,
                    max_norm_error: None,
                };
                if p.n_traj > 0 {
                    let prepared = noise.prepare(state.lattice()).context(ctx)?;
                    let mut cfg = EnsembleConfig::for_noise(
                        &prepared,
                        p.n_traj,
                        cell_seed(v.scenario.seed, si, ki, ni),
                    )
                    .context(ctx)?;
                    if let Some(horizon) = p.horizon {
                        cfg.horizon = horizon;
                        cfg.dt = horizon / DEFAULT_STEPS as f64;
                    }
                    if let Some(dt) = p.dt {
                        cfg.dt = dt;
                    }
                    let ev = evolve_noisy(state, hamiltonians[ni].as_ref(), &noise, &cfg)
                        .context(ctx)?;
                    let rate = ev.estimate_rate().context(ctx)?;
                    tables.push(Table::raw(
                        format!("fidelity_{}_{}_n{n}.csv", slug(&entry.label), kernel.name()),
                        ev.to_csv(),
                    ));
                    point.trajectory_gamma = Some(rate.gamma);
                    point.trajectory_stderr = Some(rate.stderr);
                    point.dt = Some(cfg.dt);
                    point.horizon = Some(cfg.horizon);
                    point.fit_points = Some(rate.fit_points);
                    point.max_norm_error = Some(ev.max_norm_error);
                }
                rows.push(Row {
                    state: &entry.label,
                    kernel: kernel.name(),
                    n,
                    gamma_analytic: point.analytic_gamma,
                    gamma_trajectory: point.trajectory_gamma,
                    gamma_stderr: point.trajectory_stderr,
                });
                points.push(point);
            }
            let fit = |values: Vec<(usize, f64)>| -> CliResult<Option<FitSummary>> {
                if values.iter().all(|(_, g)| *g > 0.0) {
                    let f = fit_gamma_scaling(&values)
                        .context(|| format!("rate scaling of {}", entry.label))?;
                    Ok(Some(fit_summary(&f)))
                } else {
                    Ok(None)
                }
            };
            let analytic_fit = fit(points.iter().map(|q| (q.n, q.analytic_gamma)).collect())?;
            let trajectory_fit = if p.n_traj > 0 {
                fit(points
                    .iter()
                    .map(|q| (q.n, q.trajectory_gamma.unwrap_or(0.0)))
                    .collect())?
            } else {
                None
            };
            let chosen = if p.n_traj > 0 {
                &trajectory_fit
            } else {
                &analytic_fit
            };
            let note = chosen
                .is_none()
                .then(|| "rate is zero at some size; no scaling fit (not fragile)".to_string());
            cells.push(DecohereCell {
                state: entry.label.clone(),
                kernel: kernel_name,
                fragile: chosen.as_ref().map(|f| f.fragile).unwrap_or(false),
                points,
                analytic_fit,
                trajectory_fit,
                note,
            });
        }
    }
    tables.push(Table::from_rows("decohere.csv", &rows)?);
    Ok(DecohereSection {
        kappa: p.kappa,
        axis: p.axis.clone(),
        n_traj: p.n_traj,
        rate_convention: RATE_CONVENTION,
        cells,
    })
}

pub fn run_symmetry_breaking(
    v: &ValidScenario,
    tables: &mut Vec<Table>,
    warnings: &mut Vec<String>,
) -> CliResult<SymmetryBreakingSection> {
    #[derive(serde::Serialize)]
    struct Row {
        n: usize,
        energy_symmetric: f64,
        energy_pure_phase: f64,
        magnetization_symmetric: f64,
        magnetization_pure_phase: f64,
        max_variance_symmetric: f64,
        max_variance_pure_phase: f64,
        gamma_symmetric: f64,
        gamma_pure_phase: f64,
    }
    #[derive(serde::Serialize)]
    struct CascadeCsv {
        n: usize,
        step: usize,
        site: usize,
        outcome: i8,
        probability: f64,
        max_variance: f64,
        nfs: bool,
    }
    let p = &v.scenario.symmetry_breaking;
    let mut points = Vec::new();
    let mut rows = Vec::new();
    let mut cascade_rows = Vec::new();
    let paramagnetic = p.h.abs() >= p.j.abs();
    if paramagnetic {
        warnings.push(format!(
            "symmetry breaking: |h| = {} ≥ |J| = {}; the model is paramagnetic",
            p.h, p.j
        ));
    }
    let collective = NoiseModel::axis(Axis::Z, p.kappa, Kernel::Collective);
    for lattice in &v.lattices {
        let n = lattice.n_sites();
        let ctx = || format!("symmetry-breaking run at N = {n}");
        let spec = HamiltonianSpec::transverse_ising(*lattice, p.j, p.h);
        let ham = build_hamiltonian(&spec).context(ctx)?;
        let gs = ground_state(&ham, Which::Lowest).context(ctx)?.remove(0);
        let vac = pure_phase_vacuum(&spec, v.vacuum_method).context(ctx)?;
        let summarize = |state: &StateVector<f64>, energy: f64| -> CliResult<PhaseSummary> {
            Ok(PhaseSummary {
                energy,
                magnetization: magnetization(state).context(ctx)?,
                max_variance: max_additive_fluctuation(state).context(ctx)?.max_variance,
                gamma_collective: analytic_dephasing_rate(state, &collective).context(ctx)?,
            })
        };
        let symmetric = summarize(&gs.state, gs.energy)?;
        let pure_phase = summarize(&vac.state, vac.energy)?;
        let cascade: Vec<CascadeRow> = measurement_cascade(&gs.state, p.cascade_max.unwrap_or(n))
            .context(ctx)?
            .into_iter()
            .map(|s| CascadeRow {
                site: s.site,
                outcome: s.outcome,
                probability: s.probability,
                max_variance: s.max_variance,
                nfs: s.nfs,
            })
            .collect();
        for (step, c) in cascade.iter().enumerate() {
            cascade_rows.push(CascadeCsv {
                n,
                step: step + 1,
                site: c.site,
                outcome: c.outcome,
                probability: c.probability,
                max_variance: c.max_variance,
                nfs: c.nfs,
            });
        }
        let measurements_to_nfs = cascade.iter().position(|c| c.nfs).map(|i| i + 1);
        rows.push(Row {
            n,
            energy_symmetric: symmetric.energy,
            energy_pure_phase: pure_phase.energy,
            magnetization_symmetric: symmetric.magnetization,
            magnetization_pure_phase: pure_phase.magnetization,
            max_variance_symmetric: symmetric.max_variance,
            max_variance_pure_phase: pure_phase.max_variance,
            gamma_symmetric: symmetric.gamma_collective,
            gamma_pure_phase: pure_phase.gamma_collective,
        });
        points.push(SymmetryBreakingPoint {
            n,
            ground_residual: gs.residual,
            energy_ordering_holds: symmetric.energy <= pure_phase.energy + 1e-10,
            gamma_ratio: symmetric.gamma_collective / pure_phase.gamma_collective,
            symmetric,
            pure_phase,
            cascade,
            measurements_to_nfs,
        });
    }
    tables.push(Table::from_rows("symmetry_breaking.csv", &rows)?);
    tables.push(Table::from_rows("cascade.csv", &cascade_rows)?);
    let gamma_ratio_increasing = points
        .windows(2)
        .all(|w| w[1].gamma_ratio > w[0].gamma_ratio);
    Ok(SymmetryBreakingSection {
        j: p.j,
        h: p.h,
        method: v.vacuum_method.to_string(),
        kappa: p.kappa,
        paramagnetic,
        cascade_nfs_bound: if CASCADE_NFS_FACTOR == 2.0 {
            "max variance <= 2N"
        } else {
            "max variance <= c*N"
        },
        sizes: points,
        gamma_ratio_increasing,
    })
}

/// Parameters of the `ground` subcommand.
#[derive(Clone, Debug)]
pub struct GroundParams {
    pub model: Model,
    pub j: f64,
    pub h: f64,
    pub delta: f64,
    pub b: f64,
    pub which: Which,
    pub geometry: Geometry,
    pub sizes: Vec<usize>,
    pub max_sites: Option<usize>,
    pub seed: u64,
}

/// Low-lying eigenpairs per size; also returns the states for export.
pub fn run_ground(p: &GroundParams) -> CliResult<(GroundReport, Vec<StateVector<f64>>, Table)> {
    let start = Instant::now();
    if p.sizes.is_empty() {
        invalid!("no sizes given");
    }
    if ![p.j, p.h, p.delta, p.b].iter().all(|x| x.is_finite()) {
        invalid!("couplings must be finite");
    }
    let lattices = p
        .sizes
        .iter()
        .map(|&n| {
            LatticeSpec::with_cap(n, p.geometry, p.max_sites.unwrap_or(DEFAULT_MAX_SITES))
                .context(|| format!("size N = {n}"))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut levels = Vec::new();
    let mut states = Vec::new();
    for lattice in lattices {
        let n = lattice.n_sites();
        let spec = HamiltonianSpec {
            model: p.model,
            lattice,
            j: p.j,
            h: p.h,
            delta: p.delta,
            b: p.b,
        };
        let ctx = || format!("ground state at N = {n}");
        let ham = build_hamiltonian(&spec).context(ctx)?;
        for (level, pair) in ground_state(&ham, p.which)
            .context(ctx)?
            .into_iter()
            .enumerate()
        {
            levels.push(GroundRow {
                n,
                level,
                energy: pair.energy,
                residual: pair.residual,
                magnetization: magnetization(&pair.state).context(ctx)?,
            });
            states.push(pair.state);
        }
    }
    let table = Table::from_rows("ground.csv", &levels)?;
    Ok((
        GroundReport {
            model: p.model.to_string(),
            j: p.j,
            h: p.h,
            delta: p.delta,
            b: p.b,
            geometry: p.geometry.to_string(),
            levels,
            provenance: Provenance::new(p.seed, start.elapsed().as_secs_f64()),
        },
        states,
        table,
    ))
}

/// Vacuum method parsed from user text.
pub fn parse_vacuum_method(text: &str) -> CliResult<VacuumMethod> {
    text.parse()
        .map_err(|e: macrostab::Error| CliError::Validation(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(text: &str) -> Scenario {
        Scenario::from_toml(text).unwrap()
    }

    #[test]
    fn ghz_and_product_classification() {
        let out = run_scenario(&scenario(
            r#"
name = "t"
sizes = [4, 6, 8]
experiments = ["classify"]
[[states]]
kind = "ghz"
[[states]]
kind = "product"
theta = 1.5707963267948966
"#,
        ))
        .unwrap();
        let c = out.report.classify.unwrap();
        assert_eq!(c[0].verdict, "AFS");
        assert!((c[0].exponent - 2.0).abs() < 1e-9);
        assert_eq!(c[1].verdict, "NFS");
        assert!(out.tables.iter().any(|t| t.name == "classify.csv"));
    }

    #[test]
    fn mismatched_state_file_fails_before_compute() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.state");
        macrostab::qcore::write_state_file(
            &make_ghz::<f64>(LatticeSpec::open(5).unwrap()).unwrap(),
            &path,
        )
        .unwrap();
        let text = format!(
            "name = \"f\"\nsizes = [4]\nexperiments = [\"measure\"]\n[[states]]\nkind = \"file\"\npath = {:?}\n",
            path.display().to_string()
        );
        let err = run_scenario(&scenario(&text)).unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn decohere_zero_rate_is_not_fragile() {
        let out = run_scenario(&scenario(
            r#"
name = "d"
sizes = [3, 4, 5]
experiments = ["decohere"]
[[states]]
kind = "product"
[decohere]
kappa = 0.01
axis = "z"
kernels = ["collective"]
xi = 1.0
n_traj = 0
"#,
        ))
        .unwrap();
        let cell = &out.report.decohere.unwrap().cells[0];
        assert!(!cell.fragile);
        assert!(cell.note.is_some());
    }

    #[test]
    fn cell_seeds_differ() {
        assert_ne!(cell_seed(1, 0, 0, 0), cell_seed(1, 0, 0, 1));
        assert_ne!(cell_seed(1, 0, 1, 0), cell_seed(1, 1, 0, 0));
    }
}
