//! Command-line front end for `memsosc-core`.

pub mod report;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use memsosc_core::ac::{ac_sweep, mna::sweep_at, parse_netlist};
use memsosc_core::ac::netlist::Netlist;
use memsosc_core::compensation::{
    analyze, loaded_q_bandwidth, series_impedance, shunt_inductor_for, tank_impedance, tune_bank, zero_phase_c0,
    CompensationNetwork, Topology,
};
use memsosc_core::csv;
use memsosc_core::design::{run_design, DesignReport};
use memsosc_core::document::{resolve_design, resolve_network, resolve_resonator, Document};
use memsosc_core::noise::{fom_from_measurement, fom_max, fom_physical, leeson_phase_noise, noise_factor_components, sensitivity_sweep};
use memsosc_core::resonator::{fixtures, frequency_grid, ComplexResponse, Resonator, Spacing};
use memsosc_core::sweep::{evaluate, header, parameter_sweep, OperatingConditions, SweepVariable};
use memsosc_core::units::{eng, parse_value};
use memsosc_core::Error;

use report::{Report, DEFAULT_OFFSETS};

#[derive(Debug, Parser)]
#[command(name = "memsosc", version, about = "MEMS-referenced oscillator analysis and design")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resonator parameters, C0 reactance and optional impedance sweep.
    Resonator {
        /// Fixture name (quartz45m, saw400m, fbar2g4, rft30g).
        source: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Zero-phase C0, shunt inductor and compensated-tank analysis.
    Compensate {
        source: Option<String>,
        /// Network fixture name (rft_l0_q10, rft_l0_250p).
        #[arg(long)]
        network: Option<String>,
        /// Frequency for the zero-phase condition and inductor suggestion.
        #[arg(long, value_parser = eng_value)]
        target: Option<f64>,
        /// Inductor Q used with --target when no network is given.
        #[arg(long, value_parser = eng_value, default_value = "10")]
        q_l0: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Noise budget, phase noise and figures of merit.
    Noise {
        source: Option<String>,
        #[arg(long)]
        network: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Full design flow from a design spec.
    Design {
        /// Design fixture name (rft30g_design).
        source: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Impedance sweep of a netlist file.
    Ac {
        netlist: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// One-parameter sweep: q_rft, delta_c, q_l0 or l_0.
    Sweep {
        variable: String,
        source: Option<String>,
        #[arg(long)]
        network: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Input document (or netlist for `ac`).
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Output file, written atomically.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = eng_value, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, value_parser = eng_value, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Logarithmic spacing.
    #[arg(long)]
    pub log: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

fn eng_value(s: &str) -> Result<f64, String> {
    parse_value(s).map_err(|e| e.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    User(String),
    #[error("{0}")]
    Design(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 1,
            CliError::Design(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Design(_) => CliError::Design(e.to_string()),
            Error::Netlist(diags) => CliError::User(diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")),
            other => CliError::User(other.to_string()),
        }
    }
}

/// What a command prints.
#[derive(Debug, Default, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
}

type CliResult<T> = Result<T, CliError>;

/// Parse arguments, run, print, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            eprint!("{}", out.stderr);
            let _ = std::io::stdout().flush();
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<Output> {
    match &cli.command {
        Command::Resonator { source, common } => cmd_resonator(source.as_deref(), common),
        Command::Compensate { source, network, target, q_l0, common } => {
            cmd_compensate(source.as_deref(), network.as_deref(), *target, *q_l0, common)
        }
        Command::Noise { source, network, common } => cmd_noise(source.as_deref(), network.as_deref(), common),
        Command::Design { source, common } => cmd_design(source.as_deref(), common),
        Command::Ac { netlist, common } => cmd_ac(netlist.as_deref(), common),
        Command::Sweep { variable, source, network, common } => {
            cmd_sweep(variable, source.as_deref(), network.as_deref(), common)
        }
    }
}

/// Write via a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |e: std::io::Error| CliError::User(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn document(common: &Common) -> CliResult<Option<Document>> {
    Ok(match &common.input {
        Some(p) => Some(Document::read(p)?),
        None => None,
    })
}

fn resonator(source: Option<&str>, doc: Option<&Document>) -> CliResult<Resonator> {
    if let Some(name) = source {
        return Ok(resolve_resonator(name)?);
    }
    match doc {
        Some(d) if d.has_section("resonator") => Ok(d.resonator()?),
        _ => Err(CliError::User(format!(
            "no resonator given: name a fixture ({}) or pass --in with a [resonator] section",
            fixtures::NAMES.join(", ")
        ))),
    }
}

fn network(name: Option<&str>, doc: Option<&Document>, res: &Resonator) -> CliResult<Option<CompensationNetwork>> {
    if let Some(n) = name {
        return Ok(Some(resolve_network(n)?));
    }
    match doc {
        Some(d) if d.has_section("network") => Ok(Some(d.network(res)?)),
        _ => Ok(None),
    }
}

fn required_network(name: Option<&str>, doc: Option<&Document>, res: &Resonator) -> CliResult<CompensationNetwork> {
    network(name, doc, res)?.ok_or_else(|| {
        CliError::User("no network given: pass --network (rft_l0_q10, rft_l0_250p) or --in with a [network] section".into())
    })
}

/// Values for `--from/--to/--points/--log`, if a window was requested.
fn window(common: &Common, default_points: usize) -> CliResult<Option<Vec<f64>>> {
    let (from, to) = match (common.from, common.to) {
        (None, None) => return Ok(None),
        (Some(a), Some(b)) => (a, b),
        _ => return Err(CliError::User("--from and --to must be given together".into())),
    };
    let points = common.points.unwrap_or(default_points);
    if points == 0 {
        return Err(CliError::User("--points must be at least 1".into()));
    }
    if points == 1 {
        if from != to {
            return Err(CliError::User("a single point needs --from equal to --to".into()));
        }
        return Ok(Some(vec![from]));
    }
    if !(from < to) {
        return Err(CliError::User(format!("--from ({from}) must be below --to ({to})")));
    }
    if common.log {
        return Ok(Some(frequency_grid(from, to, points, Spacing::Log)?));
    }
    let n = points - 1;
    Ok(Some((0..points).map(|i| (from * (n - i) as f64 + to * i as f64) / n as f64).collect()))
}

fn frequency_window(common: &Common) -> CliResult<Option<Vec<f64>>> {
    let w = window(common, 201)?;
    if let Some(f) = &w {
        if f.iter().any(|&x| !(x > 0.0)) {
            return Err(CliError::User("sweep frequencies must be positive".into()));
        }
    }
    Ok(w)
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        _ => report.to_text(),
    }
}

/// Report plus optional CSV. CSV goes to `--out` when given; otherwise it
/// takes stdout and the report moves to stderr (`--format csv` drops it).
fn emit(common: &Common, report: &Report, table: Option<String>) -> CliResult<Output> {
    match (table, &common.out) {
        (None, _) if common.format == Format::Csv => {
            Err(CliError::User("--format csv needs a sweep window (--from/--to)".into()))
        }
        (None, _) => Ok(Output { stdout: render(report, common.format), stderr: String::new() }),
        (Some(t), Some(path)) => {
            write_atomic(path, &t)?;
            let stdout = if common.format == Format::Csv { String::new() } else { render(report, common.format) };
            Ok(Output { stdout, stderr: String::new() })
        }
        (Some(t), None) => {
            let stderr = if common.format == Format::Csv { String::new() } else { render(report, common.format) };
            Ok(Output { stdout: t, stderr })
        }
    }
}

pub fn cmd_resonator(source: Option<&str>, common: &Common) -> CliResult<Output> {
    let doc = document(common)?;
    let res = resonator(source, doc.as_ref())?;
    let fs = res.series_resonance();
    let x_c0 = res.static_reactance(fs)?.abs();
    let mut r = Report::new();
    r.section("resonator")
        .text("label", &res.label)
        .num("r_m", res.r_m, "ohm")
        .num("l_m", res.l_m, "H")
        .num("c_m", res.c_m, "F")
        .num("c_0", res.c_0, "F")
        .num("f_s", fs, "Hz")
        .num("f_p", res.parallel_resonance(), "Hz")
        .plain("q", res.quality_factor(), "")
        .plain("kt2", res.coupling_coefficient(), "")
        .num("motional_bandwidth", res.motional_bandwidth(), "Hz")
        .num("x_c0_at_fs", x_c0, "ohm")
        .plain("x_c0_over_r_m", x_c0 / res.r_m, "");
    let table = match frequency_window(common)? {
        Some(f) => Some(csv::sweep_csv(&res.sweep(&f)?)),
        None => None,
    };
    emit(common, &r, table)
}

fn tank_response(res: &Resonator, comp: &CompensationNetwork, freqs: &[f64]) -> CliResult<ComplexResponse> {
    let values = freqs
        .iter()
        .map(|&f| match comp.topology {
            Topology::Shunt => tank_impedance(res, comp, f),
            Topology::Series => series_impedance(res, comp, f),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ComplexResponse::new(freqs.to_vec(), values)?)
}

pub fn cmd_compensate(
    source: Option<&str>,
    network_name: Option<&str>,
    target: Option<f64>,
    q_l0: f64,
    common: &Common,
) -> CliResult<Output> {
    let doc = document(common)?;
    let res = resonator(source, doc.as_ref())?;
    let mut r = Report::new();
    r.section("resonator").text("label", &res.label).num("f_s", res.series_resonance(), "Hz");
    let mut comp = network(network_name, doc.as_ref(), &res)?;
    if let Some(f) = target {
        r.section("zero_phase").num("target", f, "Hz");
        match zero_phase_c0(&res, f) {
            Ok(c0) => {
                r.num("c_0_required", c0, "F");
            }
            Err(e @ Error::NoPhysicalSolution(_)) => {
                r.text("c_0_required", &format!("none ({e})"));
            }
            Err(e) => return Err(e.into()),
        }
        let l = shunt_inductor_for(res.c_0, f)?;
        r.num("l_0_for_c_0", l, "H");
        if comp.is_none() {
            comp = Some(CompensationNetwork::shunt(l, q_l0, f)?);
        }
    }
    let Some(comp) = comp else {
        return Err(CliError::User("compensate needs --target or a network (--network or [network] in --in)".into()));
    };
    r.section("network")
        .text("topology", match comp.topology {
            Topology::Shunt => "shunt",
            Topology::Series => "series",
        })
        .num("l_0", comp.l_0, "H")
        .plain("q_l0", comp.q_l0, "")
        .num("r_l0", comp.r_l0(), "ohm")
        .num("c_added", comp.added_capacitance(), "F")
        .int("bank_code", comp.bank_code as u64)
        .int("bank_size", comp.bank_size as u64);
    if comp.topology == Topology::Shunt {
        let a = analyze(&res, &comp)?;
        r.section("tank")
            .num("f_tank", a.f_tank.unwrap_or(f64::NAN), "Hz")
            .num("f_osc", a.f_osc, "Hz")
            .num("alignment_window", a.alignment_window, "Hz")
            .flag("aligned", a.aligned)
            .text("dominant_mode", mode_name(a.dominant_mode))
            .num("r_res", a.r_res, "ohm")
            .plain("beta", a.beta, "")
            .plain("q_loaded", a.q_loaded, "");
        match loaded_q_bandwidth(&res, &comp) {
            Ok(q) => r.plain("q_loaded_3db", q, ""),
            Err(_) => r.text("q_loaded_3db", "n/a"),
        };
        if comp.bank_size > 0 {
            let t = tune_bank(&res, &comp)?;
            r.section("bank").int("best_code", t.code as u64).num("detuning", t.detuning, "Hz").flag("aligned", t.aligned);
            if let Some(w) = &t.warning {
                r.text("warning", w);
            }
        }
    }
    let table = match frequency_window(common)? {
        Some(f) => Some(csv::sweep_csv(&tank_response(&res, &comp, &f)?)),
        None => None,
    };
    emit(common, &r, table)
}

fn mode_name(m: memsosc_core::DominantMode) -> &'static str {
    match m {
        memsosc_core::DominantMode::Motional => "motional",
        memsosc_core::DominantMode::LcTank => "lc_tank",
    }
}

pub fn cmd_noise(source: Option<&str>, network_name: Option<&str>, common: &Common) -> CliResult<Output> {
    let doc = document(common)?;
    let res = resonator(source, doc.as_ref())?;
    let comp = required_network(network_name, doc.as_ref(), &res)?;
    let defaults = OperatingConditions::default();
    let mut used = Vec::new();
    let get = |key: &str, fallback: f64, what: &str, used: &mut Vec<String>| -> CliResult<f64> {
        let v = match &doc {
            Some(d) => d.number("operating_point", key)?,
            None => None,
        };
        Ok(v.unwrap_or_else(|| {
            used.push(format!("{key} = {fallback} ({what})"));
            fallback
        }))
    };
    let a = analyze(&res, &comp)?;
    let cond = OperatingConditions {
        v_osc: get("v_osc", defaults.v_osc, "default", &mut used)?,
        supply: get("supply", defaults.supply, "default", &mut used)?,
        delta_f: get("delta_f", defaults.delta_f, "default", &mut used)?,
        temperature: get("temperature", defaults.temperature, "default", &mut used)?,
        gamma: get("gamma", defaults.gamma, "default", &mut used)?,
        g_mbias: None,
        startup_margin: defaults.startup_margin,
    };
    let mut op = cond.operating_point(a.r_res, a.f_osc)?;
    op.f_0 = get("f_0", op.f_0, "dominant resonance", &mut used)?;
    op.i_bias = get("i_bias", op.i_bias, "v_osc / r_res", &mut used)?;
    op.p_dc = get("p_dc", cond.supply * op.i_bias, "supply * i_bias", &mut used)?;
    op.g_mbias = get("g_mbias", op.g_mbias, "1.25 * 2 / r_res", &mut used)?;
    op.validate()?;
    let budget = noise_factor_components(&res, &comp, &op)?;

    let mut r = Report::new();
    r.section("operating_point")
        .num("v_osc", op.v_osc, "V")
        .num("i_bias", op.i_bias, "A")
        .num("p_dc", op.p_dc, "W")
        .num("f_0", op.f_0, "Hz")
        .num("delta_f", op.delta_f, "Hz")
        .plain("temperature", op.temperature, "K")
        .plain("gamma", op.gamma, "")
        .num("g_mbias", op.g_mbias, "S")
        .list("defaults_used", &used);
    r.section("tank")
        .text("dominant_mode", mode_name(a.dominant_mode))
        .num("r_res", a.r_res, "ohm")
        .plain("beta", a.beta, "")
        .plain("q_loaded", a.q_loaded, "");
    r.section("noise_budget")
        .plain("f_unity", budget.f_unity, "")
        .plain("f_rl0", budget.f_rl0, "")
        .plain("f_active", budget.f_active, "")
        .plain("f_min", budget.f_min, "")
        .plain("eta", budget.eta, "");
    r.section("phase_noise");
    let mut offsets = DEFAULT_OFFSETS.to_vec();
    if !offsets.contains(&op.delta_f) {
        offsets.push(op.delta_f);
    }
    for off in offsets {
        let o = memsosc_core::OscillatorOperatingPoint { delta_f: off, ..op };
        let pn = leeson_phase_noise(&res, a.q_loaded, &o, budget.f_min)?;
        r.plain(&format!("at_{}", eng(off, "Hz").replace(' ', "")), pn, "dBc/Hz");
    }
    let pn = leeson_phase_noise(&res, a.q_loaded, &op, budget.f_min)?;
    r.section("fom").plain("phase_noise", pn, "dBc/Hz");
    r.plain("fom_measured", fom_from_measurement(pn, op.f_0, op.delta_f, op.p_dc)?, "dBc/Hz");
    match fom_physical(a.q_loaded, budget.beta, budget.eta, budget.f_min, op.temperature) {
        Ok(v) => r.plain("fom_physical", v, "dBc/Hz"),
        Err(e) => r.text("fom_physical", &format!("n/a ({e})")),
    };
    r.plain("fom_max", fom_max(a.q_loaded, a.beta)?, "dBc/Hz");

    let table = match window(common, 13)? {
        Some(dc) => Some(csv::sensitivity_csv(&sensitivity_sweep(&res, &comp, &op, &dc)?)),
        None => None,
    };
    emit(common, &r, table)
}

pub fn design_report(d: &DesignReport) -> Report {
    let mut r = Report::new();
    r.section("resonator")
        .num("f_s", d.f_s, "Hz")
        .num("f_p", d.f_p, "Hz")
        .plain("q", d.q_rft, "")
        .plain("bare_max_phase", d.bare_max_phase_deg, "deg");
    r.section("compensation")
        .num("c_node_midscale", d.c_node_midscale, "F")
        .num("l_0", d.l_0, "H")
        .num("r_l0", d.r_l0, "ohm")
        .num("c_fix", d.c_fix, "F")
        .int("bank_code", d.bank_code as u64)
        .num("f_tank", d.f_tank.unwrap_or(f64::NAN), "Hz")
        .num("alignment_window", d.alignment_window, "Hz")
        .text("dominant_mode", mode_name(d.dominant_mode))
        .num("f_osc", d.f_osc, "Hz")
        .num("r_res", d.r_res, "ohm")
        .plain("beta", d.beta, "")
        .plain("q_loaded", d.q_loaded, "");
    r.section("active")
        .num("g_m", d.g_m, "S")
        .plain("startup_product", d.startup_product, "")
        .num("i_bias", d.i_bias, "A")
        .plain("w_over_l", d.w_over_l, "")
        .num("p_dc_estimate", d.p_dc_estimate, "W")
        .text("p_dc_basis", "supply * i_bias, single tail current, core only");
    r.section("noise")
        .num("v_osc", d.v_osc, "V")
        .plain("gamma", d.gamma, "")
        .num("g_mbias", d.g_mbias, "S")
        .plain("temperature", d.temperature, "K")
        .num("offset", d.offset, "Hz")
        .plain("f_rl0", d.budget.f_rl0, "")
        .plain("f_active", d.budget.f_active, "")
        .plain("f_min", d.budget.f_min, "")
        .plain("eta", d.budget.eta, "")
        .plain("predicted_pn", d.predicted_pn, "dBc/Hz")
        .plain("predicted_fom", d.predicted_fom, "dBc/Hz")
        .plain("fom_max", d.fom_max, "dBc/Hz");
    r.section("warnings").list("warnings", &d.warnings);
    r
}

pub fn cmd_design(source: Option<&str>, common: &Common) -> CliResult<Output> {
    let doc = document(common)?;
    let spec = match (source, &doc) {
        (Some(name), _) => resolve_design(name)?,
        (None, Some(d)) => d.design()?,
        (None, None) => {
            return Err(CliError::User("no design spec: name a fixture (rft30g_design) or pass --in".into()));
        }
    };
    if common.format == Format::Csv {
        return Err(CliError::User("design reports are text or json".into()));
    }
    let d = run_design(&spec)?;
    let text = render(&design_report(&d), common.format);
    match &common.out {
        Some(path) => {
            write_atomic(path, &text)?;
            Ok(Output { stdout: format!("wrote {}\n", path.display()), stderr: String::new() })
        }
        None => Ok(Output { stdout: text, stderr: String::new() }),
    }
}

fn table_output(common: &Common, table: String) -> CliResult<Output> {
    match &common.out {
        Some(path) => {
            write_atomic(path, &table)?;
            let rows = table.lines().count().saturating_sub(1);
            Ok(Output { stdout: format!("wrote {rows} rows to {}\n", path.display()), stderr: String::new() })
        }
        None => Ok(Output { stdout: table, stderr: String::new() }),
    }
}

pub fn cmd_ac(path: Option<&Path>, common: &Common) -> CliResult<Output> {
    let path = path
        .or(common.input.as_deref())
        .ok_or_else(|| CliError::User("ac needs a netlist file".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::User(format!("cannot read {}: {e}", path.display())))?;
    let netlist: Netlist = parse_netlist(&text).map_err(|d| {
        CliError::User(d.iter().map(|x| format!("{}:{x}", path.display())).collect::<Vec<_>>().join("\n"))
    })?;
    let response = match frequency_window(common)? {
        Some(f) => sweep_at(&netlist, &f)?,
        None => {
            if netlist.sweep.is_none() {
                return Err(CliError::User("netlist has no `.ac` directive; pass --from/--to".into()));
            }
            ac_sweep(&netlist)?
        }
    };
    table_output(common, csv::sweep_csv(&response))
}

pub fn cmd_sweep(variable: &str, source: Option<&str>, network_name: Option<&str>, common: &Common) -> CliResult<Output> {
    let var: SweepVariable = variable.parse()?;
    let doc = document(common)?;
    let res = resonator(source, doc.as_ref())?;
    let comp = required_network(network_name, doc.as_ref(), &res)?;
    let values = window(common, 11)?.ok_or_else(|| CliError::User("sweep needs --from and --to".into()))?;
    let cond = OperatingConditions::default();
    let rows = if values.len() == 1 && var == SweepVariable::DeltaC {
        vec![evaluate(&res, &comp, &cond, values[0], values[0])?]
    } else {
        parameter_sweep(&res, &comp, &cond, var, &values)?
    };
    table_output(common, csv::table(&header(var), rows.iter().map(|r| r.cells())))
}
