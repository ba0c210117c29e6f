//! Command-line front end. The reference for flags, columns and exit
//! codes is `docs/cli.md` at the repository root.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{resolve_turbine, DATA_PACK_VERSION, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::metrics::{build_reports, bundled_hearing_groups, delta_c, load_hearing_groups, HearingGroupFilter, MetricsReport};
use crate::noise::ObserverPoint;
use crate::output::{cone_table, fmt_g, report_table, reports_json, simulation_table, spectrum_table, write_atomic, Table};
use crate::scenario::{load_scenarios, Scenario};
use crate::sim::{observer_trace, simulate, SimulationConfig, SimulationResult, DEFAULT_SAMPLES_PER_REV};
use crate::snell::{incidence_angle, limit_angle, UnderwaterReceiver};

#[derive(Debug, Parser)]
#[command(name = "aquapitch", about = "Underwater footprint of wind-turbine trailing-edge noise", disable_version_flag = true)]
pub struct Cli {
    /// Print the program, schema and data-pack versions
    #[arg(short = 'V', long)]
    pub version: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time series of the cone-averaged level for one scenario
    Simulate(SimulateArgs),
    /// Fixed-observer level traces for a set of collective pitch angles
    Sweep(SweepArgs),
    /// Power loss, level and modulation metrics for a set of scenarios
    Metrics(MetricsArgs),
    /// Weighted level reductions between nominal and IPC scenarios
    Compare(CompareArgs),
    /// Air-side incidence angle versus horizontal distance
    Snell(SnellArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file holding exactly one scenario
    pub scenario: PathBuf,
    /// Output CSV (default: stdout)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write the cone geometry of every sample
    #[arg(long)]
    pub cones: Option<PathBuf>,
    /// Also write every ring observer's per-blade spectrum
    #[arg(long)]
    pub spectra: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Bundled turbine name or turbine file
    #[arg(long)]
    pub turbine: String,
    /// Collective pitch angles, deg (comma separated, at least two)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub pitch: Vec<f64>,
    /// Observer position x,y,z in m
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 1, default_value = "50,0,0")]
    pub observer: Vec<f64>,
    /// Wind speed, m/s (default: rated)
    #[arg(long)]
    pub wind_speed: Option<f64>,
    /// Rotor speed, rad/s (default: rated)
    #[arg(long)]
    pub rotor_speed: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub revolutions: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_REV)]
    pub samples_per_rev: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Scenario or suite files
    #[arg(required = true)]
    pub scenarios: Vec<PathBuf>,
    /// Output CSV (default: stdout)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write the reports with full spectra as JSON
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Hearing-group filter file (default: bundled)
    #[arg(long)]
    pub hearing_groups: Option<PathBuf>,
    /// Worker threads (default: available cores)
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Nominal scenario file; repeat once per pair
    #[arg(long, required = true)]
    pub nominal: Vec<PathBuf>,
    /// IPC scenario file; repeat once per pair
    #[arg(long, required = true)]
    pub ipc: Vec<PathBuf>,
    /// Hearing groups to report (default: all)
    #[arg(long, value_delimiter = ',')]
    pub groups: Vec<String>,
    #[arg(long)]
    pub hearing_groups: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SnellArgs {
    /// Refraction index c_w/c_a (default: from the bundled media, 1500/343)
    #[arg(long)]
    pub n: Option<f64>,
    /// Source height H, m
    #[arg(long)]
    pub height: f64,
    /// Depth factors β (receiver depth β·H), comma separated
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub d_min: f64,
    #[arg(long)]
    pub d_max: f64,
    #[arg(long, default_value_t = 10.0)]
    pub d_step: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn version_string() -> String {
    format!(
        "aquapitch {} (schema {SCHEMA_VERSION}, data pack {DATA_PACK_VERSION})",
        env!("CARGO_PKG_VERSION")
    )
}

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

/// Runs a parsed command line, writing primary output to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    if cli.version {
        return emit(None, &format!("{}\n", version_string()), stdout);
    }
    match cli.command {
        None => Err(Error::InvalidArgument("no subcommand given; see --help".into())),
        Some(Command::Simulate(a)) => cmd_simulate(&a, stdout),
        Some(Command::Sweep(a)) => cmd_sweep(&a, stdout),
        Some(Command::Metrics(a)) => cmd_metrics(&a, stdout),
        Some(Command::Compare(a)) => cmd_compare(&a, stdout),
        Some(Command::Snell(a)) => cmd_snell(&a, stdout),
    }
}

fn single_scenario(path: &Path) -> Result<Scenario> {
    let mut s = load_scenarios(path)?;
    if s.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "{} holds {} scenarios, exactly one is expected",
            path.display(),
            s.len()
        )));
    }
    Ok(s.remove(0))
}

pub fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut config = single_scenario(&args.scenario)?.to_config()?;
    config.record_ring_spectra = args.spectra.is_some();
    let result = simulate(&config)?;
    if let Some(p) = &args.cones {
        write_atomic(p, cone_table(&result).to_csv().as_bytes())?;
    }
    if let Some(p) = &args.spectra {
        write_atomic(p, spectrum_table(&result).to_csv().as_bytes())?;
    }
    emit(args.output.as_deref(), &simulation_table(&result).to_csv(), stdout)
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<()> {
    if args.pitch.len() < 2 {
        return Err(Error::InvalidArgument("a sweep needs at least two pitch values".into()));
    }
    let [x, y, z] = args.observer[..] else {
        return Err(Error::InvalidArgument("observer must be given as x,y,z".into()));
    };
    let turbine = resolve_turbine(&args.turbine)?;
    let wind = args.wind_speed.unwrap_or(turbine.rated_wind_speed);
    let omega = args.rotor_speed.unwrap_or_else(|| turbine.rated_omega());
    let observer = ObserverPoint::new(x, y, z);
    let mut t = Table::new(["pitch_deg", "time_s", "psi_blade1_deg", "ospl_db", "power_w"]);
    for &p in &args.pitch {
        for s in observer_trace(&turbine, wind, omega, p, &observer, args.revolutions, args.samples_per_rev)? {
            t.push(vec![
                fmt_g(p),
                fmt_g(s.time),
                fmt_g(s.psi_blade1.to_degrees()),
                fmt_g(s.ospl),
                fmt_g(s.power),
            ]);
        }
    }
    emit(args.output.as_deref(), &t.to_csv(), stdout)
}

fn filters(path: Option<&Path>) -> Result<Vec<HearingGroupFilter>> {
    match path {
        Some(p) => load_hearing_groups(p),
        None => bundled_hearing_groups(),
    }
}

/// Simulates independent scenarios on up to `jobs` threads; results keep
/// the input order.
pub fn simulate_all(configs: &[SimulationConfig], jobs: Option<usize>) -> Result<Vec<SimulationResult>> {
    let jobs = jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .clamp(1, configs.len().max(1));
    let chunk = configs.len().div_ceil(jobs).max(1);
    let chunks: Vec<Result<Vec<SimulationResult>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(simulate).collect::<Result<Vec<_>>>()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(configs.len());
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

fn load_configs(paths: &[PathBuf]) -> Result<Vec<SimulationConfig>> {
    let mut configs = Vec::new();
    for p in paths {
        for s in load_scenarios(p)? {
            configs.push(s.to_config()?);
        }
    }
    Ok(configs)
}

/// Reports for all scenarios in `paths`.
pub fn metrics_for(paths: &[PathBuf], filters: &[HearingGroupFilter], jobs: Option<usize>) -> Result<Vec<MetricsReport>> {
    let configs = load_configs(paths)?;
    let results = simulate_all(&configs, jobs)?;
    build_reports(&results, filters)
}

pub fn cmd_metrics(args: &MetricsArgs, stdout: &mut dyn Write) -> Result<()> {
    let filters = filters(args.hearing_groups.as_deref())?;
    let reports = metrics_for(&args.scenarios, &filters, args.jobs)?;
    if let Some(p) = &args.json {
        write_atomic(p, reports_json(&reports).as_bytes())?;
    }
    emit(args.output.as_deref(), &report_table(&reports).to_csv(), stdout)
}

pub fn cmd_compare(args: &CompareArgs, stdout: &mut dyn Write) -> Result<()> {
    if args.nominal.len() != args.ipc.len() {
        return Err(Error::InvalidArgument(format!(
            "{} nominal and {} IPC scenarios given; they are compared pairwise",
            args.nominal.len(),
            args.ipc.len()
        )));
    }
    let all = filters(args.hearing_groups.as_deref())?;
    let selected: Vec<HearingGroupFilter> = if args.groups.is_empty() {
        all
    } else {
        args.groups
            .iter()
            .map(|g| {
                all.iter()
                    .find(|f| f.group.eq_ignore_ascii_case(g))
                    .cloned()
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown hearing group '{g}'")))
            })
            .collect::<Result<_>>()?
    };

    let mut configs = Vec::new();
    for (n, i) in args.nominal.iter().zip(&args.ipc) {
        let mut nominal = single_scenario(n)?.to_config()?;
        // the nominal run is the power baseline whatever its label
        nominal.label = crate::metrics::NOMINAL_LABEL.into();
        configs.push(nominal);
        configs.push(single_scenario(i)?.to_config()?);
    }
    let results = simulate_all(&configs, args.jobs)?;

    let mut header = vec!["turbine".to_string(), "strategy".into(), "unfiltered_db".into()];
    header.extend(selected.iter().map(|f| format!("{}_db", f.group)));
    let mut t = Table::new(header);
    for pair in results.chunks(2) {
        let reports = build_reports(pair, &selected)?;
        let (nom, ipc) = (&reports[0], &reports[1]);
        let mut row = vec![ipc.turbine.clone(), ipc.strategy.clone(), fmt_g(delta_c(nom, ipc, None)?)];
        for f in &selected {
            row.push(fmt_g(delta_c(nom, ipc, Some(&f.group))?));
        }
        t.push(row);
    }
    emit(args.output.as_deref(), &t.to_csv(), stdout)
}

pub fn cmd_snell(args: &SnellArgs, stdout: &mut dyn Write) -> Result<()> {
    let n = args
        .n
        .unwrap_or_else(|| crate::config::MediumProperties::water().sound_speed / crate::config::MediumProperties::air().sound_speed);
    if !(n > 1.0) {
        return Err(Error::InvalidArgument(format!("refraction index must exceed 1, got {n}")));
    }
    limit_angle(n)?;
    if !(args.d_step > 0.0) || !(args.d_max >= args.d_min) || args.d_min < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "distance range needs 0 ≤ d_min ≤ d_max and d_step > 0, got {}..{} step {}",
            args.d_min, args.d_max, args.d_step
        )));
    }
    let steps = ((args.d_max - args.d_min) / args.d_step + 1e-9).floor() as usize;
    let mut t = Table::new(["d_m", "beta", "phi_air_deg"]);
    for &beta in &args.beta {
        for i in 0..=steps {
            let d = args.d_min + i as f64 * args.d_step;
            let rx = UnderwaterReceiver::new(d, beta, args.height);
            match incidence_angle(&rx, n) {
                Ok(phi) => t.push(vec![fmt_g(d), fmt_g(beta), fmt_g(phi.to_degrees())]),
                // a surface receiver outside the cone has no transmitted ray
                Err(Error::NoSolution(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    emit(args.output.as_deref(), &t.to_csv(), stdout)
}

/// Process exit code for a result: 0 success, 2 configuration or usage
/// error, 1 any other failure.
pub fn exit_code(result: &Result<()>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(e) if e.is_config() => 2,
        Err(_) => 1,
    }
}
