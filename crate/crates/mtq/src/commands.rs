//! Subcommand implementations. Each one computes its complete report in
//! memory; nothing touches the filesystem until [`write_outputs`].

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use mtq_core::decohere::{coherence_scan, run_trajectory, DecoherenceModel, TrajectoryConfig};
use mtq_core::engram::{
    coactivated_set, recall_coactivation, run_experiment, ConditioningConfig, NeuronModel,
};
use mtq_core::entangle::{schmidt_decompose, BipartiteSplit, DEFAULT_FACTORIZABLE_TOL};
use mtq_core::lattice::{
    engram_distance, partition_domains_with, CoherentDomain, MapBindingPattern, SiteIndex,
};
use mtq_core::qstate::{Hamiltonian, PureState, UnitaryOperator, MAX_HAMILTONIAN_QUBITS};
use mtq_core::{seed, Complex64, ALGEBRAIC_TOL};
use serde::Serialize;

use crate::config::{DecohereMode, Format, Gate, MeasureSpec, Preparation, RunConfig};
use crate::error::{keyed, CliError, CliResult};
use crate::formats;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    State,
    Entangle,
    Lattice,
    Decohere,
    Experiment,
    DemoEpr,
    Recall,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::State => "state",
            Subcommand::Entangle => "entangle",
            Subcommand::Lattice => "lattice",
            Subcommand::Decohere => "decohere",
            Subcommand::Experiment => "experiment",
            Subcommand::DemoEpr => "demo-epr",
            Subcommand::Recall => "recall",
        }
    }

    fn default_format(self, cfg: &RunConfig) -> Format {
        match self {
            Subcommand::Experiment => Format::Csv,
            Subcommand::Decohere if cfg.mode == DecohereMode::Scan => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// Everything a run produces, held in memory until the run succeeds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outputs {
    pub report: Vec<u8>,
    pub files: Vec<(PathBuf, Vec<u8>)>,
}

pub fn execute(cmd: Subcommand, cfg: &RunConfig) -> CliResult<Outputs> {
    let format = cfg.format.unwrap_or_else(|| cmd.default_format(cfg));
    match cmd {
        Subcommand::State => state(cfg, format),
        Subcommand::Entangle => entangle(cfg, format),
        Subcommand::Lattice => lattice(cfg, format),
        Subcommand::Decohere => match cfg.mode {
            DecohereMode::Scan => scan(cfg, format),
            DecohereMode::Trajectory => trajectories(cfg, format),
        },
        Subcommand::Experiment => experiment(cfg, format),
        Subcommand::DemoEpr => demo_epr(cfg, format),
        Subcommand::Recall => recall(cfg, format),
    }
}

/// Writes side files first, then the report (to stdout when `out` is unset).
pub fn write_outputs(outputs: &Outputs, out: Option<&Path>) -> CliResult<()> {
    for (path, bytes) in &outputs.files {
        write_file(path, bytes)?;
    }
    match out {
        Some(path) => write_file(path, &outputs.report),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&outputs.report)
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_input(key: &str, path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::config(key, format!("cannot read {}: {e}", path.display())))
}

fn json_lines<T: Serialize>(items: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item).expect("report serializes");
        out.push(b'\n');
    }
    out
}

fn json_document<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serializes");
    out.push(b'\n');
    out
}

fn json_compact<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec(value).expect("report serializes");
    out.push(b'\n');
    out
}

fn csv_document<T: Serialize>(rows: &[T]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("csv row serializes");
    }
    w.into_inner().expect("in-memory writer")
}

fn ket_label(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn site_pair(s: SiteIndex) -> [usize; 2] {
    [s.protofilament, s.row]
}

/// The input state named by `state_file` or `preset`.
pub fn input_state(cfg: &RunConfig, default_preset: &str) -> CliResult<PureState> {
    if let Some(path) = &cfg.state_file {
        let text = read_input("state_file", path)?;
        return formats::parse_state(&text, &path.display().to_string());
    }
    preset_state(cfg.preset.as_deref().unwrap_or(default_preset), cfg.qubits)
        .map_err(keyed("preset"))
}

/// Named example states. `psi` is `(2/√5)|1> + (1/√5)|0>`; the two-qubit
/// presets use ket labels whose first character is qubit 0.
pub fn preset_state(name: &str, qubits: usize) -> mtq_core::Result<PureState> {
    let one = Complex64::new(1.0, 0.0);
    match name {
        "psi" => PureState::from_real(1, &[1.0, 2.0]),
        "x" => PureState::from_kets(&[("00", one), ("01", one)]),
        "bell" => PureState::from_kets(&[("00", one), ("11", one)]),
        "zeta" => PureState::from_kets(&[("00", one), ("01", one), ("11", one)]),
        "pion" => PureState::from_kets(&[("01", one), ("10", one)]),
        "ghz" => {
            let dim = 1usize << qubits;
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[0] = one;
            amps[dim - 1] = one;
            PureState::new(qubits, amps)
        }
        "ground" => PureState::ground(qubits),
        "uniform" => PureState::uniform(qubits),
        _ => Err(mtq_core::Error::InvalidParameter {
            name: "preset",
            reason: "unknown preset",
        }),
    }
}

pub fn gate_operator(gate: Gate) -> UnitaryOperator {
    match gate {
        Gate::A => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let c = |x: f64| Complex64::new(x, 0.0);
            UnitaryOperator::from_up_down_basis([[c(h), c(h)], [c(h), c(-h)]])
                .expect("A is unitary")
        }
        Gate::H => UnitaryOperator::hadamard(),
        Gate::X => UnitaryOperator::pauli_x(),
    }
}

fn check_norm(state: &PureState, context: &str) -> CliResult<()> {
    let drift = (state.norm_sqr() - 1.0).abs();
    if drift > ALGEBRAIC_TOL || !drift.is_finite() {
        return Err(CliError::Invariant(format!(
            "norm drift {drift:e} {context}"
        )));
    }
    Ok(())
}

fn chain_hamiltonian(cfg: &RunConfig, n: usize, key: &str) -> CliResult<Hamiltonian> {
    if n > MAX_HAMILTONIAN_QUBITS {
        return Err(CliError::config(
            key,
            format!("unitary evolution supports at most {MAX_HAMILTONIAN_QUBITS} qubits"),
        ));
    }
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    Hamiltonian::uniform(n, &cfg.tubulin, &edges).map_err(keyed("delta"))
}

#[derive(Serialize)]
struct AmplitudeRow {
    index: usize,
    label: String,
    re: f64,
    im: f64,
    probability: f64,
}

#[derive(Serialize)]
struct Measurement {
    qubit: usize,
    outcome: u8,
}

#[derive(Serialize)]
struct Evolution {
    steps: usize,
    dt: f64,
    time: f64,
}

#[derive(Serialize)]
struct StateReport {
    num_qubits: usize,
    norm_sqr: f64,
    evolution: Option<Evolution>,
    measurements: Vec<Measurement>,
    amplitudes: Vec<AmplitudeRow>,
}

fn state(cfg: &RunConfig, format: Format) -> CliResult<Outputs> {
    let mut s = input_state(cfg, "psi")?;
    let n = s.num_qubits();
    for &(gate, qubit) in &cfg.apply {
        if qubit >= n {
            return Err(CliError::config(
                "apply",
                format!("qubit {qubit} out of range for {n} qubits"),
            ));
        }
        s.apply_operator(&gate_operator(gate), &[qubit])
            .map_err(keyed("apply"))?;
    }
    let steps = cfg.steps.unwrap_or(0);
    let evolution = if steps > 0 {
        let dt = cfg.dt.unwrap_or(1e-13);
        let prop = chain_hamiltonian(cfg, n, "steps")?
            .propagator()
            .map_err(keyed("delta"))?;
        for step in 0..steps {
            prop.step(&mut s, dt).map_err(keyed("dt"))?;
            check_norm(&s, &format!("after evolution step {}", step + 1))?;
        }
        Some(Evolution {
            steps,
            dt,
            time: dt * steps as f64,
        })
    } else {
        None
    };
    let order: Vec<usize> = match &cfg.measure {
        MeasureSpec::None => Vec::new(),
        MeasureSpec::All => (0..n).collect(),
        MeasureSpec::Qubits(q) => q.clone(),
    };
    if let Some(&q) = order.iter().find(|&&q| q >= n) {
        return Err(CliError::config(
            "measure",
            format!("qubit {q} out of range for {n} qubits"),
        ));
    }
    let mut rng = seed::component_rng(cfg.seed, "state");
    let mut measurements = Vec::new();
    for qubit in order {
        let outcome = s.measure_qubit(qubit, &mut rng).map_err(keyed("measure"))?;
        measurements.push(Measurement { qubit, outcome });
    }
    let amplitudes: Vec<AmplitudeRow> = s
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.re != 0.0 || z.im != 0.0)
        .map(|(index, z)| AmplitudeRow {
            index,
            label: ket_label(index, n),
            re: z.re,
            im: z.im,
            probability: z.norm_sqr(),
        })
        .collect();
    let report = match format {
        Format::Json => json_document(&StateReport {
            num_qubits: n,
            norm_sqr: s.norm_sqr(),
            evolution,
            measurements,
            amplitudes,
        }),
        Format::Csv => csv_document(&amplitudes),
    };
    let files = cfg
        .state_out
        .iter()
        .map(|p| (p.clone(), formats::write_state(&s).into_bytes()))
        .collect();
    Ok(Outputs { report, files })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitSides {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// One bipartition analysis, serialized as a single JSON object.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub split: SplitSides,
    pub coefficients: Vec<f64>,
    pub entropy_bits: f64,
    pub factorizable: bool,
}

#[derive(Serialize)]
struct EntanglementCsvRow {
    left: String,
    right: String,
    coefficients: String,
    entropy_bits: f64,
    factorizable: bool,
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

pub fn analyze(state: &PureState, splits: &[BipartiteSplit]) -> CliResult<Vec<EntanglementReport>> {
    splits
        .iter()
        .map(|split| {
            let spectrum = schmidt_decompose(state, split).map_err(keyed("split"))?;
            Ok(EntanglementReport {
                split: SplitSides {
                    left: split.left().to_vec(),
                    right: split.right().to_vec(),
                },
                coefficients: spectrum.coefficients().to_vec(),
                entropy_bits: spectrum.entropy_bits(),
                factorizable: spectrum.second() <= DEFAULT_FACTORIZABLE_TOL,
            })
        })
        .collect()
}

fn entangle(cfg: &RunConfig, format: Format) -> CliResult<Outputs> {
    let s = input_state(cfg, "bell")?;
    let n = s.num_qubits();
    if n < 2 {
        return Err(CliError::config(
            "state_file",
            "entanglement needs at least 2 qubits",
        ));
    }
    let splits = match &cfg.split {
        Some(left) => vec![BipartiteSplit::new(n, left).map_err(keyed("split"))?],
        None => BipartiteSplit::all(n),
    };
    let reports = analyze(&s, &splits)?;
    let report = match format {
        Format::Json => json_lines(&reports),
        Format::Csv => csv_document(
            &reports
                .iter()
                .map(|r| EntanglementCsvRow {
                    left: join(&r.split.left),
                    right: join(&r.split.right),
                    coefficients: join(&r.coefficients),
                    entropy_bits: r.entropy_bits,
                    factorizable: r.factorizable,
                })
                .collect::<Vec<_>>(),
        ),
    };
    Ok(Outputs {
        report,
        files: Vec::new(),
    })
}

#[derive(Serialize)]
struct GeometryReport {
    protofilaments: usize,
    rows: usize,
    seam_shift: usize,
    diagonals: bool,
    sites: usize,
    edges: usize,
    length_nm: f64,
}

#[derive(Serialize)]
struct AdjacencyEntry {
    site: [usize; 2],
    neighbors: Vec<[usize; 2]>,
}

#[derive(Serialize)]
struct LatticeReport {
    geometry: GeometryReport,
    bound_edges: usize,
    adjacency: Vec<AdjacencyEntry>,
    domains: Vec<Vec<[usize; 2]>>,
}

#[derive(Serialize)]
struct LatticeCsvRow {
    protofilament: usize,
    row: usize,
    domain: usize,
    neighbors: String,
}

fn load_pattern(cfg: &RunConfig) -> CliResult<MapBindingPattern> {
    match &cfg.pattern_file {
        Some(path) => {
            let text = read_input("pattern_file", path)?;
            formats::parse_pattern(&text, &path.display().to_string())
        }
        None => Ok(MapBindingPattern::empty(cfg.geometry)),
    }
}

fn lattice(cfg: &RunConfig, format: Format) -> CliResult<Outputs> {
    let pattern = load_pattern(cfg)?;
    let g = *pattern.geometry();
    let domains =
        partition_domains_with(&g, &pattern, &cfg.partition).map_err(keyed("max_domain_size"))?;
    let mut owner = vec![0usize; g.num_sites()];
    for (i, d) in domains.iter().enumerate() {
        for &s in d.sites() {
            owner[g.site_id(s)] = i;
        }
    }
    let adjacency: Vec<AdjacencyEntry> = g
        .sites()
        .map(|s| AdjacencyEntry {
            site: site_pair(s),
            neighbors: g
                .neighbors(s)
                .expect("site on lattice")
                .into_iter()
                .map(site_pair)
                .collect(),
        })
        .collect();
    let report = match format {
        Format::Json => json_compact(&LatticeReport {
            geometry: GeometryReport {
                protofilaments: g.num_protofilaments(),
                rows: g.num_rows(),
                seam_shift: g.seam_shift(),
                diagonals: g.diagonal_neighbors(),
                sites: g.num_sites(),
                edges: g.edge_count(),
                length_nm: g.length_nm(),
            },
            bound_edges: pattern.len(),
            adjacency,
            domains: domains
                .iter()
                .map(|d| d.sites().iter().copied().map(site_pair).collect())
                .collect(),
        }),
        Format::Csv => csv_document(
            &adjacency
                .iter()
                .enumerate()
                .map(|(id, a)| LatticeCsvRow {
                    protofilament: a.site[0],
                    row: a.site[1],
                    domain: owner[id],
                    neighbors: a
                        .neighbors
                        .iter()
                        .map(|[p, r]| format!("{p}:{r}"))
                        .collect::<Vec<_>>()
                        .join(" "),
                })
                .collect::<Vec<_>>(),
        ),
    };
    Ok(Outputs {
        report,
        files: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanCsvRow {
    pub tau_eff_seconds: f64,
    pub dyn_timescale_seconds: f64,
    pub survival: f64,
    pub verdict: &'static str,
}

fn decoherence_model(cfg: &RunConfig) -> CliResult<DecoherenceModel> {
    DecoherenceModel::new(cfg.tau_bare, cfg.protection_factor).map_err(keyed("protection_factor"))
}

/// The configured effective time is appended to `scan_taus` unless already
/// listed.
pub fn scan_rows(cfg: &RunConfig) -> CliResult<Vec<ScanCsvRow>> {
    let model = decoherence_model(cfg)?;
    let mut taus = cfg.scan_taus.clone();
    if !taus.contains(&model.tau_eff()) {
        taus.push(model.tau_eff());
    }
    Ok(coherence_scan(&taus, cfg.dyn_timescale)
        .map_err(keyed("dyn_timescale"))?
        .into_iter()
        .map(|r| ScanCsvRow {
            tau_eff_seconds: r.tau_eff,
            dyn_timescale_seconds: r.dyn_timescale,
            survival: r.survival,
            verdict: r.verdict.as_str(),
        })
        .collect())
}

fn scan(cfg: &RunConfig, format: Format) -> CliResult<Outputs> {
    let rows = scan_rows(cfg)?;
    let report = match format {
        Format::Json => json_document(&rows),
        Format::Csv => csv_document(&rows),
    };
    Ok(Outputs {
        report,
        files: Vec::new(),
    })
}

#[derive(Serialize)]
struct TrajectoryRow {
    trajectory: usize,
    collapses: usize,
    first_collapse_step: Option<usize>,
}

#[derive(Serialize)]
struct TrajectorySummary {
    num_qubits: usize,
    tau_eff: f64,
    dt: f64,
    steps: usize,
    duration: f64,
    trajectories: usize,
    zero_collapse_fraction: f64,
    analytic_survival: f64,
    mean_collapses: f64,
}

fn trajectories(cfg: &RunConfig, format: Format) -> CliResult<Outputs> {
    let model = decoherence_model(cfg)?;
    let initial = input_state(cfg, "bell")?;
    let n = initial.num_qubits();
    let g = cfg.geometry;
    if n > g.num_sites() {
        return Err(CliError::config(
            "rows",
            "lattice has fewer sites than the state has qubits",
        ));
    }
    let sites: Vec<SiteIndex> = g.sites().take(n).collect();
    let dt = cfg.dt.unwrap_or(model.tau_eff() / 100.0);
    let steps = cfg.steps.unwrap_or(100);
    let base = TrajectoryConfig::new(dt, steps, 0).map_err(keyed("steps"))?;
    let prop = if n <= MAX_HAMILTONIAN_QUBITS {
        Some(
            chain_hamiltonian(cfg, n, "state_file")?
                .propagator()
                .map_err(keyed("delta"))?,
        )
    } else {
        None
    };
    let master = seed::derive(cfg.seed, "decohere");
    let mut rows = Vec::with_capacity(cfg.trajectories);
    for trajectory in 0..cfg.trajectories {
        let mut domain = CoherentDomain::with_state(sites.clone(), initial.clone())
            .map_err(keyed("state_file"))?;
        let config = TrajectoryConfig {
            seed: seed::derive_indexed(master, trajectory as u64),
            ..base
        };
        let mut evolve = |s: &mut PureState| -> mtq_core::Result<()> {
            if let Some(p) = &prop {
                p.step(s, dt)?;
            }
            Ok(())
        };
        let events =
            run_trajectory(&mut domain, &model, &config, Some(&mut evolve)).map_err(keyed("dt"))?;
        check_norm(&domain.state(), &format!("in trajectory {trajectory}"))?;
        rows.push(TrajectoryRow {
            trajectory,
            collapses: events.len(),
            first_collapse_step: events.first().map(|e| e.step),
        });
    }
    let report = match format {
        Format::Csv => csv_document(&rows),
        Format::Json => {
            let count = rows.len() as f64;
            json_document(&TrajectorySummary {
                num_qubits: n,
                tau_eff: model.tau_eff(),
                dt,
                steps,
                duration: base.duration(),
                trajectories: rows.len(),
                zero_collapse_fraction: rows.iter().filter(|r| r.collapses == 0).count() as f64
                    / count,
                analytic_survival: model
                    .survival_probability(base.duration())
                    .map_err(keyed("dt"))?,
                mean_collapses: rows.iter().map(|r| r.collapses as f64).sum::<f64>() / count,
            })
        }
    };
    Ok(Outputs {
        report,
        files: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub run: usize,
    pub trained: u64,
    pub untrained: u64,
    pub total: u64,
    pub pi: f64,
}

#[derive(Serialize)]
struct ExperimentReport<'a> {
    num_flies: usize,
    p_avoid_trained: f64,
    expected_pi: f64,
    mean_pi: f64,
    runs: &'a [ExperimentRow],
}

pub fn experiment_rows(cfg: &RunConfig) -> CliResult<(ConditioningConfig, Vec<ExperimentRow>)> {
    let conditioning = ConditioningConfig::new(
        cfg.num_flies,
        cfg.p_avoid_trained,
        seed::derive(cfg.seed, "experiment"),
    )
    .map_err(keyed("p_avoid_trained"))?;
    let rows = run_experiment(&conditioning, cfg.runs)
        .map_err(keyed("runs"))?
        .into_iter()
        .enumerate()
        .map(|(run, t)| ExperimentRow {
            run,
            trained: t.trained(),
            untrained: t.untrained(),
            total: t.total(),
            pi: t.performance_index(),
        })
        .collect();
    Ok((conditioning, rows))
}

fn experiment(cfg: &RunConfig, format: Format) -> CliResult<Outputs> {
    let (conditioning, rows) = experiment_rows(cfg)?;
    let report = match format {
        Format::Csv => csv_document(&rows),
        Format::Json => json_document(&ExperimentReport {
            num_flies: conditioning.num_flies,
            p_avoid_trained: conditioning.p_avoid_trained,
            expected_pi: conditioning.expected_pi(),
            mean_pi: rows.iter().map(|r| r.pi).sum::<f64>() / rows.len() as f64,
            runs: &rows,
        }),
    };
    Ok(Outputs {
        report,
        files: Vec::new(),
    })
}

/// Outcome counts of measuring qubit 0 then qubit 1 of the pion state, keyed
/// by ket label.
pub fn epr_counts(trials: usize, master_seed: u64) -> CliResult<BTreeMap<String, u64>> {
    let pion = preset_state("pion", 2).map_err(keyed("preset"))?;
    let mut rng = seed::component_rng(master_seed, "demo-epr");
    let mut counts: BTreeMap<String, u64> = ["00", "01", "10", "11"]
        .iter()
        .map(|k| (k.to_string(), 0))
        .collect();
    for _ in 0..trials {
        let mut s = pion.clone();
        let a = s.measure_qubit(0, &mut rng).map_err(keyed("trials"))?;
        let b = s.measure_qubit(1, &mut rng).map_err(keyed("trials"))?;
        *counts.get_mut(&format!("{a}{b}")).expect("two-bit label") += 1;
    }
    Ok(counts)
}

fn helicity(bit: char) -> i8 {
    if bit == '1' {
        1
    } else {
        -1
    }
}

#[derive(Serialize)]
struct EprReport {
    state: &'static str,
    trials: usize,
    counts: BTreeMap<String, u64>,
    violations: u64,
    anticorrelated: bool,
}

#[derive(Serialize)]
struct EprCsvRow {
    outcome: String,
    helicity_1: i8,
    helicity_2: i8,
    count: u64,
}

fn demo_epr(cfg: &RunConfig, format: Format) -> CliResult<Outputs> {
    let counts = epr_counts(cfg.trials, cfg.seed)?;
    let violations = counts["00"] + counts["11"];
    let report = match format {
        Format::Json => json_document(&EprReport {
            state: "(|01> + |10>)/sqrt2, bit 0 = helicity -1, bit 1 = helicity +1",
            trials: cfg.trials,
            violations,
            anticorrelated: violations == 0,
            counts,
        }),
        Format::Csv => csv_document(
            &counts
                .iter()
                .map(|(k, &count)| {
                    let mut bits = k.chars();
                    EprCsvRow {
                        outcome: k.clone(),
                        helicity_1: helicity(bits.next().expect("two bits")),
                        helicity_2: helicity(bits.next().expect("two bits")),
                        count,
                    }
                })
                .collect::<Vec<_>>(),
        ),
    };
    Ok(Outputs {
        report,
        files: Vec::new(),
    })
}

#[derive(Serialize)]
struct RecallTrace {
    neuron: u64,
    distance: f64,
    /// Conformation bits in lexicographic site order.
    pattern: String,
}

fn recall(cfg: &RunConfig, format: Format) -> CliResult<Outputs> {
    let key_pattern_file = load_pattern(cfg)?;
    let g = *key_pattern_file.geometry();
    let mut engram_rng = seed::component_rng(cfg.seed, "recall-engrams");
    let key_pattern = if cfg.pattern_file.is_some() {
        key_pattern_file
    } else {
        MapBindingPattern::random(g, cfg.density, &mut engram_rng)
    };
    let mut neurons = Vec::with_capacity(cfg.neurons);
    for id in 0..cfg.neurons as u64 {
        let pattern = if id == cfg.key || id < cfg.shared as u64 {
            key_pattern.clone()
        } else {
            MapBindingPattern::random(g, cfg.density, &mut engram_rng)
        };
        neurons.push(
            NeuronModel::with_engram(id, pattern, cfg.partition)
                .map_err(keyed("max_domain_size"))?,
        );
    }
    let activated =
        coactivated_set(&neurons, cfg.key, cfg.threshold).map_err(keyed("threshold"))?;
    if cfg.prepare == Preparation::Uniform {
        for n in neurons.iter_mut().filter(|n| activated.contains(&n.id())) {
            for d in n.domains_mut() {
                let k = d.len();
                d.set_state(PureState::uniform(k).map_err(keyed("max_domain_size"))?)
                    .map_err(keyed("max_domain_size"))?;
            }
        }
    }
    let mut rng = seed::component_rng(cfg.seed, "recall");
    let outcome = recall_coactivation(&mut neurons, cfg.key, cfg.threshold, &mut rng)
        .map_err(keyed("key"))?;
    let traces = outcome
        .collapses
        .iter()
        .map(|(&id, bits)| {
            Ok(RecallTrace {
                neuron: id,
                distance: engram_distance(&key_pattern, neurons[id as usize].engram())
                    .map_err(keyed("pattern_file"))?,
                pattern: bits
                    .values()
                    .map(|&b| if b == 1 { '1' } else { '0' })
                    .collect(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let report = match format {
        Format::Json => json_lines(&traces),
        Format::Csv => csv_document(&traces),
    };
    Ok(Outputs {
        report,
        files: Vec::new(),
    })
}
