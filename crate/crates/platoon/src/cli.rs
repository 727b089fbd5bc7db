//! Command-line front end. Exit status 0 when every verdict a subcommand
//! reports passes, 1 when one fails, 2 on usage or configuration errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use platoon_core::{
    certify_internal, gain_region, min_headway, region_contains, robust_sweep, simulate,
    sufficient_condition, sweep_surface, Certification, Mode, VerdictKind,
};

use crate::format::{sig, DEFAULT_PRECISION};
use crate::plot::{emit_plot_data, write_trace, PlotKind, PlotSource};
use crate::report::{full_report, headway_bounds};
use crate::scenario::{parse_scenario, preset, DelaySection, ParsedScenario, ScenarioFile};

#[derive(Debug, Parser)]
#[command(name = "platoon", version, about = "Delay-robust platoon headway and gain analysis")]
pub struct Cli {
    /// Significant digits in printed and tabular numbers.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    pub precision: usize,
    /// Directory for CSV and JSON artifacts.
    #[arg(long, global = true, default_value = "platoon-out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum time headways.
    Bounds(BoundsArgs),
    /// Admissible (k_v, k_p) region and its boundary lines.
    Region(SourceArgs),
    /// Region membership and the sufficient condition for the design gains.
    CheckGains(SourceArgs),
    /// Robust string-stability sweep over (omega, tau).
    StringSweep(SourceArgs),
    /// Interlacing certificate of the characteristic quasi-polynomial.
    InternalCheck(InternalArgs),
    /// Platoon simulation with trace export.
    Simulate(SourceArgs),
    /// Every check on one scenario, bundled into report.json.
    FullReport(SourceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CliMode {
    Acc,
    Cacc,
    CaccPlus,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Mode {
        match m {
            CliMode::Acc => Mode::Acc,
            CliMode::Cacc => Mode::Cacc,
            CliMode::CaccPlus => Mode::CaccPlus,
        }
    }
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Single family; all defined families when omitted.
    #[arg(long, value_enum)]
    pub mode: Option<CliMode>,
    #[arg(long, default_value_t = 0.0)]
    pub ka: f64,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    #[arg(long, default_value_t = 0.5)]
    pub tau0: f64,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Built-in scenario.
    #[arg(long, conflicts_with = "scenario")]
    pub preset: Option<String>,
    /// Scenario TOML file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[command(flatten)]
    pub gains: GainArgs,
}

/// Overrides of the design gains. Any of them switches the platoon to
/// uniform gains.
#[derive(Debug, Args)]
pub struct GainArgs {
    #[arg(long)]
    pub ka: Option<f64>,
    #[arg(long)]
    pub kv: Option<f64>,
    #[arg(long)]
    pub kp: Option<f64>,
    #[arg(long)]
    pub hw: Option<f64>,
    #[arg(long)]
    pub r: Option<u32>,
    /// Also sets the simulated delay.
    #[arg(long)]
    pub tau0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct InternalArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Delay to certify at; defaults to the scenario delay.
    #[arg(long)]
    pub tau: Option<f64>,
}

/// Parses `args` and runs the subcommand, printing to stdout/stderr.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

/// Runs a parsed command. `Ok(passed)` on completion.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    let p = cli.precision;
    let f = |x: f64| sig(x, p);
    match &cli.command {
        Command::Bounds(a) => {
            writeln!(out, "mode\tka\tr\ttau0\tmin_headway")?;
            let rows: Vec<(Mode, f64, u32, f64)> = match a.mode {
                Some(m) => {
                    let mode = Mode::from(m);
                    vec![(mode, a.ka, a.r, min_headway(mode, a.ka, a.r, a.tau0)?)]
                }
                None => {
                    let b = headway_bounds(a.ka, a.r, a.tau0)?;
                    let mut rows = vec![(Mode::Acc, 0.0, 1, b.acc)];
                    rows.extend(b.cacc.map(|h| (Mode::Cacc, a.ka, 1, h)));
                    rows.extend(b.cacc_plus.map(|h| (Mode::CaccPlus, a.ka, a.r, h)));
                    rows
                }
            };
            for (mode, ka, r, h) in rows {
                writeln!(out, "{}\t{}\t{}\t{}\t{}", mode.name(), f(ka), r, f(a.tau0), f(h))?;
            }
            Ok(true)
        }
        Command::Region(a) => {
            let s = load(a)?;
            let region = gain_region(&s.design)?;
            writeln!(out, "mode: {}", s.design.mode().name())?;
            for (k, v) in [("a1", region.a1), ("b1", region.b1), ("a2", region.a2), ("b2", region.b2)] {
                writeln!(out, "{k}: {}", f(v))?;
            }
            writeln!(out, "rhs: {}", f(region.rhs))?;
            writeln!(out, "feasible: {}", region.feasible)?;
            write_plot(&cli.out, PlotSource::Region(&region), PlotKind::RegionBoundary, p)?;
            Ok(region.feasible)
        }
        Command::CheckGains(a) => {
            let s = load(a)?;
            let g = s.design;
            let region = gain_region(&g)?;
            let inside = region.feasible && region_contains(&region, g.kv, g.kp);
            let cond = sufficient_condition(&g);
            writeln!(out, "mode: {}", g.mode().name())?;
            writeln!(out, "min_headway: {}", f(min_headway(g.mode(), g.ka, g.r, g.tau0)?))?;
            writeln!(out, "feasible: {}", region.feasible)?;
            writeln!(out, "in_region: {inside}")?;
            writeln!(out, "lhs1: {}", f(cond.lhs1))?;
            writeln!(out, "lhs2: {}", f(cond.lhs2))?;
            writeln!(out, "sufficient_condition: {}", cond.holds)?;
            Ok(inside && cond.holds)
        }
        Command::StringSweep(a) => {
            let s = load(a)?;
            let rep = robust_sweep(&s.design, &s.grid)?;
            writeln!(out, "sup_magnitude: {}", f(rep.sup_magnitude))?;
            writeln!(out, "argmax_omega: {}", f(rep.argmax_omega))?;
            writeln!(out, "argmax_tau: {}", f(rep.argmax_tau))?;
            writeln!(out, "tail_limit: {}", f(rep.tail_limit))?;
            writeln!(out, "margin: {}", f(rep.margin))?;
            writeln!(out, "passed: {}", rep.passed)?;
            if !rep.passed {
                writeln!(
                    out,
                    "witness: omega = {}, tau = {}, |H| = {}",
                    f(rep.argmax_omega),
                    f(rep.argmax_tau),
                    f(rep.sup_magnitude)
                )?;
            }
            let surface = sweep_surface(&s.design, &s.grid)?;
            write_plot(&cli.out, PlotSource::Surface(&surface), PlotKind::SweepSurface, p)?;
            Ok(rep.passed)
        }
        Command::InternalCheck(a) => {
            let s = load(&a.source)?;
            let tau = a.tau.unwrap_or(s.platoon.tau);
            let rep = certify_internal(&s.design, tau, s.l_max)?;
            writeln!(out, "tau: {}", f(tau))?;
            writeln!(out, "kp_bar: {} (< 4/27: {})", f(rep.params.kp_bar), rep.kp_ok)?;
            writeln!(out, "gamma_bar: {} (<= 1/2: {})", f(rep.params.gamma_bar), rep.gamma_ok)?;
            let list = |v: &[f64]| v.iter().map(|&x| f(x)).collect::<Vec<_>>().join(", ");
            writeln!(out, "roots_real: [{}]", list(&rep.roots.real))?;
            writeln!(out, "roots_imag: [{}]", list(&rep.roots.imag))?;
            writeln!(out, "interlaced: {}", rep.interlaced)?;
            writeln!(out, "window_counts: {}", rep.count_check)?;
            writeln!(out, "condition_b_at_0: {}", f(rep.condition_b_value))?;
            writeln!(out, "certification: {:?}", rep.certification)?;
            write_plot(&cli.out, PlotSource::Internal(&rep), PlotKind::InterlacingCurves, p)?;
            write_plot(&cli.out, PlotSource::Internal(&rep), PlotKind::ConditionBCurve, p)?;
            Ok(rep.certification == Certification::Stable)
        }
        Command::Simulate(a) => {
            let s = load(a)?;
            let tr = simulate(&s.platoon)?;
            std::fs::create_dir_all(&cli.out)
                .with_context(|| format!("creating {}", cli.out.display()))?;
            write_trace(create(&cli.out.join("trace.csv"))?, &tr, p)?;
            write_plot(&cli.out, PlotSource::Trace(&tr), PlotKind::DeltaTraces, p)?;
            let summary = create(&cli.out.join("summary.json"))?;
            serde_json::to_writer_pretty(summary, &tr.summary)?;
            let sm = &tr.summary;
            let peaks = sm.peaks.iter().map(|&x| f(x)).collect::<Vec<_>>().join(", ");
            writeln!(out, "peaks: [{peaks}]")?;
            let kind = match sm.kind {
                VerdictKind::Chain => "chain",
                VerdictKind::Platoon => "platoon",
            };
            writeln!(out, "verdict ({kind}): {}", if sm.passed { "pass" } else { "fail" })?;
            if let Some(i) = sm.first_violation {
                writeln!(out, "first_violation: vehicle {i}")?;
            }
            writeln!(out, "trace: {}", cli.out.join("trace.csv").display())?;
            Ok(sm.passed)
        }
        Command::FullReport(a) => {
            let s = load(a)?;
            let bundle = full_report(&s)?;
            std::fs::create_dir_all(&cli.out)
                .with_context(|| format!("creating {}", cli.out.display()))?;
            let mut file = create(&cli.out.join("report.json"))?;
            serde_json::to_writer_pretty(&mut file, &bundle)?;
            file.flush()?;
            let v = &bundle.verdicts;
            for (k, ok) in [
                ("synthesis", v.synthesis),
                ("string_stability", v.string_stability),
                ("internal_stability", v.internal_stability),
                ("simulation", v.simulation),
            ] {
                writeln!(out, "{k}: {}", if ok { "pass" } else { "fail" })?;
            }
            writeln!(out, "report: {}", cli.out.join("report.json").display())?;
            Ok(v.all)
        }
    }
}

fn load(a: &SourceArgs) -> Result<ParsedScenario> {
    let mut file = match (&a.preset, &a.scenario) {
        (Some(name), _) => preset(name)?,
        (None, Some(path)) => {
            let parsed = parse_scenario(path)?;
            if !a.gains.any() {
                return Ok(parsed);
            }
            parsed.file
        }
        (None, None) => preset("paper-cacc-0.7")?,
    };
    apply_overrides(&mut file, &a.gains);
    Ok(file.parse()?)
}

impl GainArgs {
    fn any(&self) -> bool {
        self.ka.is_some()
            || self.kv.is_some()
            || self.kp.is_some()
            || self.hw.is_some()
            || self.r.is_some()
            || self.tau0.is_some()
    }
}

fn apply_overrides(file: &mut ScenarioFile, g: &GainArgs) {
    if !g.any() {
        return;
    }
    let c = &mut file.controller;
    c.ka = g.ka.unwrap_or(c.ka);
    c.kv = g.kv.unwrap_or(c.kv);
    c.kp = g.kp.unwrap_or(c.kp);
    c.hw = g.hw.unwrap_or(c.hw);
    c.r = g.r.unwrap_or(c.r);
    c.vehicles.clear();
    if let Some(tau0) = g.tau0 {
        file.delay = DelaySection { tau: tau0, tau0 };
    }
    file.controller.mode = file.design_gains().mode();
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_plot(dir: &Path, source: PlotSource<'_>, kind: PlotKind, precision: usize) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(kind.file_name());
    emit_plot_data(create(&path)?, source, kind, precision)?;
    Ok(())
}
