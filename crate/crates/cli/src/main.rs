//! `pulsewalk`: verify, simulate and scan composite pulse sequences.
//!
//! Exit codes: 0 success, 1 verification failed, 2 input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pulsewalk::bloch::{self, DEFAULT_POINTS, DEFAULT_SEED};
use pulsewalk::catalog::{self, parse_angle, VerifyReport};
use pulsewalk::export;
use pulsewalk::walk::Walk;
use pulsewalk::{Channel, ErrorModel, Exec, PulseError, Sequence, Vec3};

/// Tolerance on the error-free net rotation against the sequence's intended
/// net effect.
const NET_EFFECT_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "pulsewalk", version, about = "Composite pulse design and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the error-suppression order of a sequence.
    Check(CheckArgs),
    /// Fit the log-log slope of worst-case deviation against error strength.
    Slope(SlopeArgs),
    /// Export the toggling-frame error walk as CSV or SVG.
    Walk(WalkArgs),
    /// Scan the Knill-like family over α (radians).
    ScanAlpha(ScanArgs),
    /// Evolve one Bloch vector under a given error and export its trajectory.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChannelArg {
    Amplitude,
    Detuning,
    Both,
}

impl ChannelArg {
    fn channels(self) -> Vec<Channel> {
        match self {
            ChannelArg::Amplitude => vec![Channel::Amplitude],
            ChannelArg::Detuning => vec![Channel::Detuning],
            ChannelArg::Both => Channel::BOTH.to_vec(),
        }
    }

    fn single(self) -> Result<Channel, PulseError> {
        match self {
            ChannelArg::Amplitude => Ok(Channel::Amplitude),
            ChannelArg::Detuning => Ok(Channel::Detuning),
            ChannelArg::Both => Err(PulseError::InvalidArgument(
                "--channel: this command needs a single channel (amplitude or detuning)".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
}

#[derive(Args)]
struct CheckArgs {
    /// Catalog name (e.g. `knill`, `knill_family(pi/3)`) or path to a sequence file.
    sequence: String,
    #[arg(long, value_enum, default_value = "both")]
    channel: ChannelArg,
    /// Minimum certified order for success.
    #[arg(long, default_value_t = 1)]
    require_order: u8,
    /// Print the machine-readable report instead of the human one.
    #[arg(long)]
    json: bool,
    /// Also write the machine-readable report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SlopeArgs {
    sequence: String,
    #[arg(long, value_enum, default_value = "amplitude")]
    channel: ChannelArg,
    /// Error window `lo:hi`.
    #[arg(long, default_value = "1e-4:1e-2")]
    range: String,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    /// Seed for the random initial states.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Single initial state `x,y,z` instead of the 26-state worst case.
    #[arg(long)]
    r0: Option<String>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WalkArgs {
    sequence: String,
    #[arg(long, value_enum, default_value = "amplitude")]
    channel: ChannelArg,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum, default_value = "detuning")]
    channel: ChannelArg,
    /// α window `lo:hi` in radians; accepts `pi` factors.
    #[arg(long, default_value = "-pi:pi", allow_hyphen_values = true)]
    range: String,
    #[arg(long, default_value_t = 181)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    sequence: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    r0: String,
    /// Samples per step in the trajectory.
    #[arg(long, default_value_t = 32)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Verification,
    Input(String),
}

impl From<PulseError> for Failure {
    fn from(e: PulseError) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Slope(a) => cmd_slope(a),
        Command::Walk(a) => cmd_walk(a),
        Command::ScanAlpha(a) => cmd_scan_alpha(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_sequence(source: &str) -> Result<Sequence, Failure> {
    let path = Path::new(source);
    if path.is_file() || source.ends_with(".toml") {
        let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{source}: {e}")))?;
        Sequence::from_toml(&text).map_err(|e| Failure::Input(format!("{source}: {e}")))
    } else {
        Ok(catalog::catalog(source)?)
    }
}

fn parse_range(text: &str, flag: &str, parse: impl Fn(&str) -> Option<f64>) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Input(format!("{flag}: expected `lo:hi`, got `{text}`"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    Ok((parse(lo).ok_or_else(bad)?, parse(hi).ok_or_else(bad)?))
}

fn parse_vec3(text: &str, flag: &str) -> Result<Vec3, Failure> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Input(format!("{flag}: expected `x,y,z`, got `{text}`")))?;
    match parts[..] {
        [x, y, z] => Ok(Vec3::new(x, y, z)),
        _ => Err(Failure::Input(format!(
            "{flag}: expected three components, got {}",
            parts.len()
        ))),
    }
}

fn write_output(out: Option<&Path>, body: &str) -> CmdResult {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| Failure::Input(format!("--out {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn fmt_vec(v: Vec3) -> String {
    format!("({:+.3e}, {:+.3e}, {:+.3e})", v.x, v.y, v.z)
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct CheckDoc<'a> {
    sequence: &'a str,
    steps: usize,
    net_effect_error: f64,
    net_effect_ok: bool,
    required_order: u8,
    channels: &'a [VerifyReport],
    passed: bool,
}

fn cmd_check(a: CheckArgs) -> CmdResult {
    let seq = load_sequence(&a.sequence)?;
    let net_err = bloch::propagator(&seq, &ErrorModel::NONE).max_abs_diff(&seq.intended_net_effect().rotation());
    let net_ok = net_err < NET_EFFECT_TOL;
    let reports = a
        .channel
        .channels()
        .into_iter()
        .map(|ch| catalog::verify(&seq, ch))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = net_ok && reports.iter().all(|r| r.certified_order() >= a.require_order);

    let doc = CheckDoc {
        sequence: seq.name(),
        steps: seq.len(),
        net_effect_error: net_err,
        net_effect_ok: net_ok,
        required_order: a.require_order,
        channels: &reports,
        passed,
    };
    let json = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
    if let Some(p) = &a.out {
        write_output(Some(p), &json)?;
    }
    if a.json {
        print!("{json}");
    } else {
        print_check(&seq, net_err, net_ok, &reports, a.require_order, passed);
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn print_check(seq: &Sequence, net_err: f64, net_ok: bool, reports: &[VerifyReport], required: u8, passed: bool) {
    println!("sequence      {} ({} steps)", seq.name(), seq.len());
    println!("net effect    {} (max matrix error {net_err:.1e})", pass(net_ok));
    for r in reports {
        println!("[{}]", r.channel);
        println!("  closure residual  {}", fmt_vec(r.closure_residual));
        println!("  first order       {}", pass(r.first_order));
        if let Some(d) = &r.second_order_detail {
            println!("  vector area       {}", fmt_vec(d.vector_area));
        }
        println!("  second order      {}", pass(r.second_order));
        for axis in &r.preserved_axes {
            println!("  preserved axis    {}", fmt_vec(*axis));
        }
        println!("  certified order   {}", r.certified_order());
        println!("  perturbative      {}", r.perturbative_order);
        match r.slope {
            Some(s) => println!("  worst-case slope  {s:.3}"),
            None => println!("  worst-case slope  n/a (deviation below floor)"),
        }
    }
    println!("result        {} (required order {required})", pass(passed));
}

fn cmd_slope(a: SlopeArgs) -> CmdResult {
    let seq = load_sequence(&a.sequence)?;
    let ch = a.channel.single()?;
    let range = parse_range(&a.range, "--range", |s| s.trim().parse().ok())?;
    let states = match &a.r0 {
        Some(text) => vec![parse_vec3(text, "--r0")?],
        None => bloch::default_initial_states(a.seed),
    };
    let rep = bloch::scaling_slope_with(&seq, ch, &states, range, a.points, Exec::Parallel)?;
    write_output(a.out.as_deref(), &export::slope_csv(&rep))?;
    let line = match rep.slope {
        Some(s) => format!("slope {s:.4} (r² {:.6})", rep.r_squared.unwrap_or(f64::NAN)),
        None => "slope n/a (deviation below floor)".to_string(),
    };
    if a.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn cmd_walk(a: WalkArgs) -> CmdResult {
    let seq = load_sequence(&a.sequence)?;
    let ch = a.channel.single()?;
    let walk = Walk::from_sequence(&seq, ch);
    let body = match a.format {
        Format::Csv => export::walk_csv(&walk, export::WALK_SAMPLES),
        Format::Svg => export::walk_svg(&walk, &format!("{} ({ch})", seq.name())),
    };
    write_output(a.out.as_deref(), &body)
}

fn cmd_scan_alpha(a: ScanArgs) -> CmdResult {
    let ch = a.channel.single()?;
    let (lo, hi) = parse_range(&a.range, "--range", |s| parse_angle(s).ok())?;
    let rows = catalog::scan_alpha(ch, lo, hi, a.points, Exec::Parallel)?;
    write_output(a.out.as_deref(), &export::alpha_scan_csv(&rows))
}

fn cmd_simulate(a: SimulateArgs) -> CmdResult {
    let seq = load_sequence(&a.sequence)?;
    let err = ErrorModel::new(a.epsilon, a.delta)?;
    let r0 = parse_vec3(&a.r0, "--r0")?;
    let sim = bloch::evolve_sampled(&seq, &err, r0, a.points.max(1))?;
    write_output(a.out.as_deref(), &export::trajectory_csv(&sim))?;
    let line = format!(
        "final {} ideal {} deviation {:.3e}",
        fmt_vec(sim.final_lab),
        fmt_vec(sim.ideal),
        sim.deviation
    );
    if a.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}
