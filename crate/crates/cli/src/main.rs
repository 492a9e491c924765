//! `spdflow`: generate, noise, smooth and inspect SPD tensor fields.
//!
//! Exit codes: 0 success, 1 I/O or unreadable file, 2 usage or invalid
//! configuration, 3 numerical failure (including strict-mode SPD violations).

mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use spdflow::flows::{run_flow, ShockPairing};
use spdflow::io::{
    add_noise_with, export_glyphs, generate_synthetic, read_field, write_field, NoiseModel, Pattern,
    PatternKind, SyntheticSpec,
};
use spdflow::metrics::{field_error, spd_violations};
use spdflow::{Dims, Error, FlowConfig, FlowKind, SafeguardPolicy, SpdMatrix, TensorField, Vech};

use manifest::Manifest;

#[derive(Parser)]
#[command(name = "spdflow", version, about = "Curvature flows on SPD tensor fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic ground-truth field.
    Generate(GenerateArgs),
    /// Perturb a field with SPD-preserving noise.
    Noise(NoiseArgs),
    /// Run one of the curvature flows.
    Flow(FlowArgs),
    /// Compare a field against a reference.
    Metrics(MetricsArgs),
    /// Export ellipsoid glyphs as CSV.
    Glyphs(GlyphArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value = "two_region")]
    pattern: PatternKind,
    /// Grid extents, e.g. `32x32` or `16x16x8`.
    #[arg(long, default_value = "32x32")]
    dims: String,
    /// Comma-separated spacing per axis; defaults to 1.
    #[arg(long)]
    spacing: Option<String>,
    /// Base tensor: three diagonal entries or six vech entries (11,22,33,12,23,13).
    #[arg(long, default_value = "3,1,1")]
    tensor: String,
    /// Right-hand tensor of `two_region`; defaults to the quarter turn of `--tensor`.
    #[arg(long)]
    tensor2: Option<String>,
    /// Rotation rate of `smooth_rotation` in radians per voxel.
    #[arg(long, default_value_t = 0.1)]
    rate: f64,
    /// Band width of `crossing` in voxels.
    #[arg(long, default_value_t = 4)]
    width: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NoiseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.3)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "congruence")]
    model: NoiseModel,
}

#[derive(Args)]
struct FlowArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "tv")]
    kind: FlowKind,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 50)]
    steps: usize,
    /// Edge-stopping constant; defaults to the median smoothed gradient magnitude.
    #[arg(long)]
    k: Option<f64>,
    /// Gaussian width of the edge detector in voxels.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value = "clamp")]
    safeguard: SafeguardPolicy,
    #[arg(long, default_value_t = 1e-8)]
    eig_floor: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "metric")]
    shock_pairing: ShockPairing,
    /// Print the volume energy after every step.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    reference: PathBuf,
}

#[derive(Args)]
struct GlyphArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Format(_) => 1,
        Error::Argument(_) | Error::DimensionMismatch(_) | Error::NotPositiveDefinite { .. } => 2,
        Error::SpdViolation { .. } | Error::Numerical(_) => 3,
    }
}

fn parse_dims(s: &str) -> spdflow::Result<Dims> {
    let extents = s
        .split('x')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Error::Argument(format!("cannot parse dims '{s}', expected e.g. 32x32")))?;
    Dims::new(&extents)
}

fn parse_numbers(s: &str, what: &str) -> spdflow::Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Error::Argument(format!("cannot parse {what} '{s}'")))
}

fn parse_tensor(s: &str) -> spdflow::Result<SpdMatrix> {
    match parse_numbers(s, "tensor")?[..] {
        [a, b, c] => SpdMatrix::diagonal(a, b, c),
        [a, b, c, d, e, f] => SpdMatrix::from_vech(&Vech::new(a, b, c, d, e, f)),
        _ => Err(Error::Argument(format!(
            "tensor '{s}' needs 3 diagonal or 6 vech entries"
        ))),
    }
}

fn load(path: &Path) -> spdflow::Result<TensorField> {
    let field = read_field(path)?;
    let v = spd_violations(&field);
    if v.count > 0 {
        eprintln!(
            "warning: {} voxel(s) of {} are not positive definite (min eigenvalue {:e})",
            v.count,
            path.display(),
            v.worst_min_eigenvalue
        );
    }
    Ok(field)
}

fn generate(args: &GenerateArgs) -> spdflow::Result<()> {
    let dims = parse_dims(&args.dims)?;
    let spacing = match &args.spacing {
        Some(s) => parse_numbers(s, "spacing")?,
        None => vec![1.0; dims.m()],
    };
    let tensor = parse_tensor(&args.tensor)?;
    let pattern = match args.pattern {
        PatternKind::Constant => Pattern::Constant { tensor },
        PatternKind::TwoRegion => match &args.tensor2 {
            Some(t) => Pattern::TwoRegion {
                left: tensor,
                right: parse_tensor(t)?,
            },
            None => Pattern::two_region(tensor)?,
        },
        PatternKind::SmoothRotation => Pattern::SmoothRotation {
            tensor,
            rate: args.rate,
        },
        PatternKind::Crossing => Pattern::Crossing {
            tensor,
            width: args.width,
        },
    };
    let spec = SyntheticSpec {
        pattern,
        dims,
        spacing,
    };
    let field = generate_synthetic(&spec)?;
    write_field(&field, &args.out)?;

    let mut m = Manifest::new("generate");
    m.set("pattern", &spec.pattern);
    m.set("dims", &args.dims);
    m.set("spacing", join(field.spacing()));
    m.set("tensor", join(tensor.vech().as_slice()));
    if let Pattern::TwoRegion { right, .. } = &spec.pattern {
        m.set("tensor2", join(right.vech().as_slice()));
    }
    m.set("rate", args.rate);
    m.set("width", args.width);
    m.set("output", args.out.display());
    m.write_for(&args.out)?;
    println!("wrote {}: {} field, dims {}", args.out.display(), spec.pattern, args.dims);
    Ok(())
}

fn noise(args: &NoiseArgs) -> spdflow::Result<()> {
    let field = load(&args.input)?;
    let noisy = add_noise_with(&field, args.sigma, args.seed, args.model)?;
    write_field(&noisy, &args.out)?;

    let mut m = Manifest::new("noise");
    m.set("sigma", args.sigma);
    m.set("seed", args.seed);
    m.set("model", args.model.name());
    m.input(&args.input)?;
    m.set("output", args.out.display());
    m.write_for(&args.out)?;
    println!(
        "wrote {}: {} noise, sigma {}, seed {}",
        args.out.display(),
        args.model.name(),
        args.sigma,
        args.seed
    );
    Ok(())
}

fn flow(args: &FlowArgs) -> spdflow::Result<()> {
    let config = FlowConfig {
        kind: args.kind,
        dt: args.dt,
        steps: args.steps,
        k: args.k,
        sigma: args.sigma,
        safeguard: args.safeguard,
        eig_floor: args.eig_floor,
        seed: args.seed,
        shock_pairing: args.shock_pairing,
    };
    config.validate()?;
    let field = load(&args.input)?;
    let start = Instant::now();
    let (out, diag) = run_flow(&field, &config)?;
    let elapsed = start.elapsed();
    write_field(&out, &args.out)?;

    let mut m = Manifest::new("flow");
    m.set("kind", config.kind);
    m.set("dt", config.dt);
    m.set("steps", config.steps);
    m.set("k", config.k.map_or("auto".to_string(), |k| k.to_string()));
    m.set("k_used", diag.k.map_or("none".to_string(), |k| k.to_string()));
    m.set("sigma", config.sigma);
    m.set("safeguard", config.safeguard);
    m.set("eig_floor", config.eig_floor);
    m.set("seed", config.seed);
    m.set("shock_pairing", config.shock_pairing.name());
    m.input(&args.input)?;
    m.set("output", args.out.display());
    m.set("wall_clock_seconds", elapsed.as_secs_f64());
    m.set("steps_executed", diag.records.len());
    m.set("safeguard_activations", diag.total_activations());
    m.set("initial_energy", diag.initial_energy);
    m.set("final_energy", diag.energies().last().copied().unwrap_or(diag.initial_energy));
    for (i, r) in diag.records.iter().enumerate() {
        m.set(format!("step.{i}.volume_energy"), r.volume_energy);
        m.set(format!("step.{i}.max_curvature"), r.max_curvature);
        m.set(format!("step.{i}.safeguard_activations"), r.safeguard_activations);
        m.set(format!("step.{i}.min_eigenvalue"), r.min_eigenvalue);
    }
    m.write_for(&args.out)?;

    if args.verbose {
        for (i, r) in diag.records.iter().enumerate() {
            println!(
                "step {i}: energy {:.9e}, max |H| {:.3e}, activations {}",
                r.volume_energy, r.max_curvature, r.safeguard_activations
            );
        }
    }
    println!(
        "wrote {}: {} flow, {} steps of {}, {} safeguard activations",
        args.out.display(),
        config.kind,
        diag.records.len(),
        config.dt,
        diag.total_activations()
    );
    Ok(())
}

fn metrics(args: &MetricsArgs) -> spdflow::Result<()> {
    let field = load(&args.field)?;
    let reference = load(&args.reference)?;
    print!("{}", field_error(&field, &reference)?);
    Ok(())
}

fn glyphs(args: &GlyphArgs) -> spdflow::Result<()> {
    let field = load(&args.input)?;
    export_glyphs(&field, &args.out)?;
    println!("wrote {}: {} glyphs", args.out.display(), field.len());
    Ok(())
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Noise(a) => noise(a),
        Command::Flow(a) => flow(a),
        Command::Metrics(a) => metrics(a),
        Command::Glyphs(a) => glyphs(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
