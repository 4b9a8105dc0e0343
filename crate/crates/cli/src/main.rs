use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use slipt_cli::spec::SweepEntry;
use slipt_cli::{run, ExperimentKind, ExperimentSpec, HarnessError, RunContext};
use slipt_core::presets::PresetLibrary;
use slipt_core::safety::SafetyScenario;

const CONFIG_DIR_ENV: &str = "SLIPT_CONFIG_DIR";
const PRESET_FILE: &str = "presets.toml";
const DEFAULT_OUT: &str = "slipt-out";

/// Segmented photovoltaic SLIPT link simulator.
#[derive(Debug, Parser)]
#[command(name = "slipt", version)]
struct Cli {
    /// Preset library replacing the built-in one. Without it,
    /// `$SLIPT_CONFIG_DIR/presets.toml` is used when present.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory [default: the spec's output_dir, else slipt-out].
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Preset name; repeat or comma-separate for several.
    #[arg(long, global = true, value_name = "NAME", value_delimiter = ',')]
    preset: Vec<String>,
    /// Calibration artifact [default: <out>/calibration.toml].
    #[arg(long, global = true, value_name = "FILE")]
    calibration: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment spec file.
    Run {
        /// Looked up under $SLIPT_CONFIG_DIR when not found as given.
        spec: PathBuf,
    },
    /// String I-V curves and maximum power points.
    Iv {
        /// Beam offset [mm].
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        offset: f64,
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long)]
        calibrated: bool,
    },
    /// Small-signal bandwidth per preset.
    Bandwidth {
        /// Load resistance [Ω]; repeatable.
        #[arg(long = "load", value_delimiter = ',', allow_negative_numbers = true)]
        loads: Vec<f64>,
        /// Re-split each cell into this many segments; repeatable.
        #[arg(long, value_delimiter = ',')]
        segments: Vec<usize>,
        #[arg(long)]
        calibrated: bool,
    },
    /// One end-to-end link run for a single preset.
    Link(LinkArgs),
    /// Link runs over several presets [default: every measured preset].
    Sweep(LinkArgs),
    /// Imp/Isc and Pmp against beam offset.
    Mismatch {
        /// Largest offset [mm].
        #[arg(long, default_value_t = 0.95, allow_negative_numbers = true)]
        max_offset: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long)]
        calibrated: bool,
    },
    /// Ocular exposure check for an extended source.
    Safety(SafetyArgs),
    /// Fit device parameters to the preset measurements.
    Calibrate,
    /// Regenerate a reference table or figure from calibrated parameters.
    Reproduce {
        #[arg(value_enum)]
        target: Target,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Target {
    Table1,
    Fig6,
    Fig3,
}

#[derive(Debug, Args)]
struct LinkArgs {
    #[arg(long, default_value_t = 4.7e-3, allow_negative_numbers = true)]
    ber_target: f64,
    /// Beam offset [mm].
    #[arg(long, allow_negative_numbers = true)]
    offset: Option<f64>,
    /// Load resistance [Ω].
    #[arg(long, allow_negative_numbers = true)]
    load: Option<f64>,
    /// Multiplier on the receiver noise PSD.
    #[arg(long, allow_negative_numbers = true)]
    psd_scale: Option<f64>,
    /// Use calibrated device parameters.
    #[arg(long)]
    calibrated: bool,
    /// Apply each preset's calibrated beam offset (implies --calibrated).
    #[arg(long)]
    calibrated_offsets: bool,
}

#[derive(Debug, Args)]
struct SafetyArgs {
    /// [nm]
    #[arg(long, default_value_t = SafetyScenario::default().wavelength, allow_negative_numbers = true)]
    wavelength: f64,
    /// Apparent source diameter [mm].
    #[arg(long, default_value_t = SafetyScenario::default().source_diameter, allow_negative_numbers = true)]
    source_diameter: f64,
    /// Source to eye distance [mm].
    #[arg(long, default_value_t = SafetyScenario::default().evaluation_distance, allow_negative_numbers = true)]
    distance: f64,
    /// [s]
    #[arg(long, default_value_t = SafetyScenario::default().exposure_time, allow_negative_numbers = true)]
    exposure_time: f64,
    /// Power through the pupil [W].
    #[arg(long, default_value_t = SafetyScenario::default().received_power_at_pupil, allow_negative_numbers = true)]
    power: f64,
    /// [mm]
    #[arg(long, default_value_t = SafetyScenario::default().pupil_radius, allow_negative_numbers = true)]
    pupil_radius: f64,
}

fn config_dir() -> Option<PathBuf> {
    std::env::var_os(CONFIG_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn read(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::Spec(format!("{}: {e}", path.display())))
}

fn load_library(explicit: Option<&Path>) -> Result<PresetLibrary, HarnessError> {
    let path = match explicit {
        Some(p) => p.to_path_buf(),
        None => match config_dir().map(|d| d.join(PRESET_FILE)).filter(|p| p.is_file()) {
            Some(p) => p,
            None => return Ok(PresetLibrary::builtin()),
        },
    };
    PresetLibrary::from_toml(&read(&path)?).map_err(|e| HarnessError::Spec(format!("{}: {e}", path.display())))
}

fn locate_spec(path: &Path) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Some(dir) = config_dir() {
            let candidate = dir.join(path);
            if candidate.exists() {
                return candidate;
            }
        }
    }
    path.to_path_buf()
}

fn link_spec(cli: &Cli, args: &LinkArgs, single: bool) -> Result<ExperimentSpec, HarnessError> {
    let mut spec = ExperimentSpec::new(ExperimentKind::Link);
    spec.link.ber_target = args.ber_target;
    spec.link.psd_scale = args.psd_scale;
    spec.link.calibrated_offsets = args.calibrated_offsets;
    spec.calibrated = args.calibrated || args.calibrated_offsets;
    let presets = if single {
        match cli.preset.as_slice() {
            [_] => cli.preset.clone(),
            _ => return Err(HarnessError::Spec(format!("`link` takes exactly one --preset (got {}); use `sweep` for several", cli.preset.len()))),
        }
    } else if cli.preset.is_empty() {
        let lib = load_library(cli.config.as_deref())?;
        lib.devices.iter().filter(|d| d.measured.is_some()).map(|d| d.name.clone()).collect()
    } else {
        cli.preset.clone()
    };
    spec.sweep = presets
        .into_iter()
        .map(|preset| SweepEntry { preset, label: None, load_resistance: args.load, offset: args.offset })
        .collect();
    Ok(spec)
}

/// The spec to run and the text its hash is taken from.
fn build_spec(cli: &Cli) -> Result<(ExperimentSpec, String), HarnessError> {
    let mut spec = match &cli.command {
        Command::Run { spec } => {
            let path = locate_spec(spec);
            let text = read(&path)?;
            let mut parsed = ExperimentSpec::parse(&text).map_err(|e| match e {
                HarnessError::Spec(m) => HarnessError::Spec(format!("{}: {m}", path.display())),
                other => other,
            })?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            for p in [&mut parsed.preset_file, &mut parsed.calibration, &mut parsed.output_dir].into_iter().flatten() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
            if let Some(seed) = cli.seed {
                parsed.seed = seed;
            }
            if !cli.preset.is_empty() {
                parsed.presets = cli.preset.clone();
            }
            return Ok((parsed, text));
        }
        Command::Iv { offset, points, calibrated } => {
            let mut s = ExperimentSpec::new(ExperimentKind::Iv);
            s.iv.offset = *offset;
            s.iv.points = *points;
            s.calibrated = *calibrated;
            s
        }
        Command::Bandwidth { loads, segments, calibrated } => {
            let mut s = ExperimentSpec::new(ExperimentKind::BandwidthSweep);
            s.bandwidth.load_resistances = loads.clone();
            s.bandwidth.segments = segments.clone();
            s.calibrated = *calibrated;
            s
        }
        Command::Link(args) => link_spec(cli, args, true)?,
        Command::Sweep(args) => link_spec(cli, args, false)?,
        Command::Mismatch { max_offset, points, calibrated } => {
            let mut s = ExperimentSpec::new(ExperimentKind::Mismatch);
            s.mismatch.max_offset = *max_offset;
            s.mismatch.points = *points;
            s.calibrated = *calibrated;
            s
        }
        Command::Safety(a) => {
            let mut s = ExperimentSpec::new(ExperimentKind::Safety);
            s.safety = Some(SafetyScenario {
                wavelength: a.wavelength,
                source_diameter: a.source_diameter,
                evaluation_distance: a.distance,
                exposure_time: a.exposure_time,
                received_power_at_pupil: a.power,
                pupil_radius: a.pupil_radius,
            });
            s
        }
        Command::Calibrate => ExperimentSpec::new(ExperimentKind::Calibrate),
        Command::Reproduce { target } => ExperimentSpec::new(match target {
            Target::Table1 => ExperimentKind::ReproduceTable1,
            Target::Fig6 => ExperimentKind::ReproduceFig6,
            Target::Fig3 => ExperimentKind::ReproduceFig3,
        }),
    };
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    if spec.sweep.is_empty() {
        spec.presets = cli.preset.clone();
    }
    spec.validate()?;
    let text = spec.to_toml();
    Ok((spec, text))
}

fn execute(cli: &Cli) -> Result<u8, HarnessError> {
    let (spec, text) = build_spec(cli)?;
    let library = match (&cli.config, &spec.preset_file) {
        (Some(p), _) => load_library(Some(p))?,
        (None, Some(p)) => load_library(Some(p))?,
        (None, None) => load_library(None)?,
    };
    let out = cli.out.clone().or_else(|| spec.output_dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let ctx = RunContext { library, out_dir: out, calibration: cli.calibration.clone() };
    let outcome = run(&spec, &text, &ctx)?;
    for m in &outcome.messages {
        println!("{m}");
    }
    for f in &outcome.failures {
        eprintln!("error: {f}");
    }
    for a in &outcome.artifacts {
        eprintln!("wrote {}", a.display());
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
