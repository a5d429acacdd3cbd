use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coalesce_cli::commands::{self, default_oracle_times, FitOverrides};
use coalesce_cli::manifest::ExperimentManifest;
use coalesce_cli::presets::{preset, PRESET_NAMES};
use coalesce_cli::suite::{run_suite, Suite};
use coalesce_cli::{output_root, CliError, CliResult, OUTPUT_ROOT_VAR};
use coalesce_core::{ParamValue, Params, SpatialGrid};

#[derive(Parser)]
#[command(name = "coalesce", version, about = "Interface coalescence in viscous conservation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a manifest (TOML path or preset name) and write its outputs.
    Simulate { manifest: String },
    /// Fit the scaling law to the coalescing branch of a track CSV.
    Fit {
        track: PathBuf,
        #[arg(long)]
        t0_lo: Option<f64>,
        #[arg(long)]
        t0_hi: Option<f64>,
        #[arg(long)]
        t0_step: Option<f64>,
        /// Smallest interface position kept [default: 0.05].
        #[arg(long)]
        window_floor: Option<f64>,
        /// Keep samples below this fraction of the last maximum [default: 0.3].
        #[arg(long)]
        cap_fraction: Option<f64>,
        /// Output directory [default: next to the track].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a reference solution: cole-hopf, green or profile.
    Oracle {
        kind: String,
        /// Sampling times, comma separated.
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long, default_value_t = 0.01)]
        h: f64,
        /// Parameter as key=value, repeatable.
        #[arg(long = "param", short = 'p')]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Explicit upper bound on the last coalescence time.
    Bounds { manifest: String },
    /// Run a verification suite and write report.json.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Print a preset manifest, or list the presets.
    Preset { name: Option<String> },
}

fn load_manifest(arg: &str) -> CliResult<ExperimentManifest> {
    let path = Path::new(arg);
    if path.exists() {
        return ExperimentManifest::load(path);
    }
    preset(arg).ok_or_else(|| {
        CliError::Config(format!(
            "`{arg}` is neither a manifest file nor a preset ({})",
            PRESET_NAMES.join(", ")
        ))
    })
}

fn parse_params(items: &[String]) -> CliResult<Params> {
    let mut p = Params::new();
    for item in items {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("parameter `{item}` is not key=value")))?;
        let value = match v.parse::<f64>() {
            Ok(n) => ParamValue::Number(n),
            Err(_) => ParamValue::Text(v.to_string()),
        };
        p.insert(k.trim(), value);
    }
    Ok(p)
}

fn execute(cli: Cli) -> CliResult<()> {
    let root = output_root();
    match cli.command {
        Command::Simulate { manifest } => {
            let m = load_manifest(&manifest)?;
            let r = commands::simulate(&m, &root)?;
            let s = &r.summary;
            println!("run directory: {}", r.dir.display());
            println!("zero count: {} -> {}", s.initial_zero_count, s.final_zero_count);
            for b in &s.branches {
                match b.end {
                    Some(end) => println!("branch {}: t in [{}, {}], terminated at {end}", b.id, b.t_first, b.t_last),
                    None => println!("branch {}: t in [{}, {}], survives", b.id, b.t_first, b.t_last),
                }
            }
            if let Some(f) = &s.fit {
                println!("fit: t0 = {:.16e}, c1 = {:.16e}, c2 = {:.16e}", f.t0, f.c1, f.c2);
            }
            if let Some(e) = &s.fit_error {
                eprintln!("fit skipped: {e}");
            }
            for w in &s.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Fit {
            track,
            t0_lo,
            t0_hi,
            t0_step,
            window_floor,
            cap_fraction,
            out,
        } => {
            let overrides = FitOverrides {
                t0_lo,
                t0_hi,
                t0_step,
                window_floor,
                cap_fraction,
            };
            let r = commands::fit_track(&track, &overrides, out.as_deref())?;
            let f = r.result.fit;
            println!("branch {}: t0 = {:.16e}, c1 = {:.16e}, c2 = {:.16e}, residual = {:.16e}, {} samples",
                r.branch, f.t0, f.c1, f.c2, f.residual, f.n_samples);
            println!("wrote {} and {}", r.fit_path.display(), r.residual_path.display());
        }
        Command::Oracle {
            kind,
            t,
            x_min,
            x_max,
            h,
            params,
            out,
        } => {
            let params = parse_params(&params)?;
            let times = if t.is_empty() { default_oracle_times(&kind) } else { t };
            let grid = SpatialGrid::with_spacing(x_min, x_max, h)?;
            let dir = out.unwrap_or_else(|| root.join(format!("oracle-{kind}")));
            let r = commands::oracle(&kind, &params, &times, &grid, &dir)?;
            for f in &r.files {
                println!("wrote {}", f.display());
            }
            if let Some(t0) = r.t0 {
                println!("t0 = {t0:.16e}");
            }
        }
        Command::Bounds { manifest } => {
            let m = load_manifest(&manifest)?;
            let r = commands::bounds(&m, &root)?;
            println!("class: {:?}", r.class);
            println!("T = {:.16e}", r.bound.t);
            println!("{}", serde_json::to_string_pretty(&r.bound.inputs)?);
        }
        Command::Verify { suite } => {
            let dir = root.join("verify");
            fs::create_dir_all(&dir)?;
            let report = run_suite(suite, &dir, |r| {
                println!("{}", r.line());
                let _ = std::io::stdout().flush();
            });
            fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
            let failed = report.results.iter().filter(|r| !r.passed).count();
            println!("{} of {} criteria passed", report.results.len() - failed, report.results.len());
            if failed > 0 {
                return Err(CliError::Verification(format!("{failed} criteria failed")));
            }
        }
        Command::Preset { name } => match name {
            None => PRESET_NAMES.iter().for_each(|n| println!("{n}")),
            Some(n) => {
                let m = preset(&n).ok_or_else(|| CliError::Config(format!("no preset `{n}`")))?;
                print!("{}", m.to_toml());
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Io(_)) {
                eprintln!("(output root is ${OUTPUT_ROOT_VAR} or ./coalesce-output)");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
