//! `microholo` command-line front end.
//!
//! Every subcommand starts from the built-in defaults, applies `--config`
//! when given, then applies explicit flags on top.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use microholo::config::{FilterRadius, NoiseConfig, PipelineConfig, PortStrategy};
use microholo::enhance::{enhance, structural_fidelity_check, Enhancer, EnhancerKind};
use microholo::field::RealField;
use microholo::hologram::{
    add_noise, combine_ports, record, subtract_background, Hologram, HologramMeta, Port,
};
use microholo::io::{
    export_grayscale, read_complex_grid, read_real_grid, write_complex_grid, write_real_grid, GrayMapping,
};
use microholo::metrics::QualityReport;
use microholo::pipeline::{demodulate, demodulation_gain, load_scene, run_pipeline};
use microholo::reconstruct::reconstruct;
use microholo::reference::synthesize_reference;
use microholo::wave::{simulate_scattered_field, PropagationMode};

#[derive(Parser)]
#[command(name = "microholo", version, about = "Indirect microwave holography toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a scene to the recording plane and write the object field.
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output grid file (default: <output-dir>/object_field.grid).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Record power holograms of an object field against the synthesized reference.
    Record {
        #[command(flatten)]
        config: ConfigArgs,
        /// Complex object field at the recording plane.
        #[arg(long)]
        field: PathBuf,
    },
    /// Centred spectrum of a combined hologram, with the located diffraction orders.
    Spectrum {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        hologram: PathBuf,
    },
    /// Filter the +1 order of a combined hologram and back-propagate it.
    Reconstruct {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        hologram: PathBuf,
    },
    /// Speckle index, SNR and (with --reference) SSIM of a real grid file.
    Metrics {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value_t = microholo::metrics::DEFAULT_WINDOW)]
        window: usize,
        /// SSIM dynamic range (default: range of the reference, or of the image).
        #[arg(long)]
        dynamic_range: Option<f64>,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Upscale an amplitude grid and add a high-frequency residual.
    Enhance {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage and write all artifacts and the report.
    Pipeline {
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Monostatic,
    OneWay,
}

#[derive(Clone, Copy, ValueEnum)]
enum PortArg {
    TwoPort,
    SinglePortBackground,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnhancerArg {
    Bicubic,
    ResidualSharpen,
    External,
}

#[derive(Args, Default)]
struct ConfigArgs {
    /// TOML configuration file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    frequency_ghz: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    dx_mm: Option<f64>,
    #[arg(long)]
    dy_mm: Option<f64>,
    #[arg(long)]
    z0_mm: Option<f64>,
    #[arg(long)]
    phase_step_rad: Option<f64>,
    #[arg(long)]
    e0: Option<f64>,
    #[arg(long, value_enum)]
    propagation_mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    port_strategy: Option<PortArg>,
    /// Window radius in bins, or "auto".
    #[arg(long)]
    filter_radius: Option<String>,
    #[arg(long, value_enum)]
    enhancer: Option<EnhancerArg>,
    #[arg(long)]
    residual_gain: Option<f64>,
    #[arg(long)]
    residual_path: Option<PathBuf>,
    #[arg(long)]
    scale_factor: Option<usize>,
    /// Hologram noise SNR in dB; "inf" disables noise.
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    speckle_window: Option<usize>,
    /// Scene text file (default: built-in crossed strips).
    #[arg(long)]
    scene: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(path) => PipelineConfig::load(path)
                .context("loading config")?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = self.frequency_ghz {
            c.frequency_ghz = v;
        }
        if let Some(v) = self.nx {
            c.grid.nx = v;
        }
        if let Some(v) = self.ny {
            c.grid.ny = v;
        }
        if let Some(v) = self.dx_mm {
            c.grid.dx_mm = v;
        }
        if let Some(v) = self.dy_mm {
            c.grid.dy_mm = v;
        }
        if let Some(v) = self.z0_mm {
            c.z0_mm = v;
        }
        if let Some(v) = self.phase_step_rad {
            c.phase_step_rad = v;
        }
        if let Some(v) = self.e0 {
            c.e0 = v;
        }
        if let Some(v) = self.propagation_mode {
            c.propagation_mode = match v {
                ModeArg::Monostatic => PropagationMode::Monostatic,
                ModeArg::OneWay => PropagationMode::OneWay,
            };
        }
        if let Some(v) = self.port_strategy {
            c.port_strategy = match v {
                PortArg::TwoPort => PortStrategy::TwoPort,
                PortArg::SinglePortBackground => PortStrategy::SinglePortBackground,
            };
        }
        if let Some(v) = &self.filter_radius {
            c.filter_radius = match v.as_str() {
                "auto" => FilterRadius::Auto,
                n => FilterRadius::Bins(
                    n.parse()
                        .with_context(|| format!("--filter-radius expects \"auto\" or an integer, got {n:?}"))?,
                ),
            };
        }
        self.apply_enhancer(&mut c.enhancer)?;
        if self.snr_db.is_some() || self.seed.is_some() {
            let base = c.noise.unwrap_or(NoiseConfig {
                snr_db: f64::INFINITY,
                seed: 0,
            });
            c.noise = Some(NoiseConfig {
                snr_db: self.snr_db.unwrap_or(base.snr_db),
                seed: self.seed.unwrap_or(base.seed),
            });
        }
        if let Some(v) = self.speckle_window {
            c.metrics.speckle_window = v;
        }
        if let Some(v) = &self.scene {
            c.scene = Some(v.clone());
        }
        if let Some(v) = &self.output_dir {
            c.output_dir = v.clone();
        }
        c.check_paths()?;
        Ok(c)
    }

    fn apply_enhancer(&self, e: &mut Enhancer) -> Result<()> {
        if let Some(kind) = self.enhancer {
            e.kind = match kind {
                EnhancerArg::Bicubic => EnhancerKind::Bicubic,
                EnhancerArg::ResidualSharpen => EnhancerKind::ResidualSharpen {
                    residual_gain: match e.kind {
                        EnhancerKind::ResidualSharpen { residual_gain } => residual_gain,
                        _ => 1.0,
                    },
                },
                EnhancerArg::External => match (&self.residual_path, &e.kind) {
                    (Some(p), _) => EnhancerKind::External { residual_path: p.clone() },
                    (None, EnhancerKind::External { residual_path }) => EnhancerKind::External {
                        residual_path: residual_path.clone(),
                    },
                    (None, _) => bail!("--enhancer external needs --residual-path"),
                },
            };
        }
        if let Some(g) = self.residual_gain {
            match &mut e.kind {
                EnhancerKind::ResidualSharpen { residual_gain } => *residual_gain = g,
                _ => bail!("--residual-gain only applies to the residual-sharpen enhancer"),
            }
        }
        if let Some(p) = &self.residual_path {
            if let EnhancerKind::External { residual_path } = &mut e.kind {
                *residual_path = p.clone();
            }
        }
        if let Some(f) = self.scale_factor {
            e.scale_factor = f;
        }
        Ok(())
    }
}

fn hologram_meta(config: &PipelineConfig) -> Result<(HologramMeta, microholo::config::Acquisition)> {
    let acq = config.acquisition().context("validate")?;
    println!("offset check: {}", acq.offset);
    let meta = HologramMeta {
        frequency_ghz: config.frequency_ghz,
        z0_mm: config.z0_mm,
        reference: acq.reference,
    };
    Ok((meta, acq))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn simulate(config: &PipelineConfig, out: Option<PathBuf>) -> Result<()> {
    let acq = config.acquisition().context("validate")?;
    let scene = load_scene(config, &acq.grid).context("scene")?;
    let field = simulate_scattered_field(&scene, &acq.params, None).context("simulate")?;
    let out = match out {
        Some(p) => p,
        None => {
            create_dir(&config.output_dir)?;
            config.output_dir.join("object_field.grid")
        }
    };
    write_complex_grid(&out, &field)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn record_cmd(config: &PipelineConfig, field: &Path) -> Result<()> {
    let (meta, acq) = hologram_meta(config)?;
    let object = read_complex_grid(field)?;
    object.grid().same_as(&acq.grid).then_some(()).with_context(|| {
        format!("{} does not match the configured scan grid", field.display())
    })?;
    let reference = synthesize_reference(&acq.reference);
    let (snr_db, seed) = config
        .noise
        .map(|n| (n.snr_db, n.seed))
        .unwrap_or((f64::INFINITY, 0));

    let sum = add_noise(&record(&object, &reference, Port::Sum, meta)?, snr_db, seed)?;
    let (name, second, combined) = match config.port_strategy {
        PortStrategy::TwoPort => {
            let diff = record(&object, &reference, Port::Difference, meta)?;
            let diff = add_noise(&diff, snr_db, seed.wrapping_add(1))?;
            let combined = combine_ports(&sum, &diff)?;
            ("difference", diff, combined)
        }
        PortStrategy::SinglePortBackground => {
            let empty = microholo::field::ComplexField::zeros(acq.grid);
            let bg = add_noise(&record(&empty, &reference, Port::Sum, meta)?, snr_db, seed.wrapping_add(1))?;
            let combined = subtract_background(&sum, &bg)?;
            ("background", bg, combined)
        }
    };
    let dir = &config.output_dir;
    create_dir(dir)?;
    write_real_grid(dir.join("hologram_sum.grid"), sum.data())?;
    write_real_grid(dir.join(format!("hologram_{name}.grid")), second.data())?;
    write_real_grid(dir.join("hologram.grid"), combined.data())?;
    export_grayscale(combined.data(), GrayMapping::MinMax, dir.join("hologram.png"))?;
    println!("wrote sum, {name} and combined holograms to {}", dir.display());
    Ok(())
}

fn load_combined(config: &PipelineConfig, path: &Path) -> Result<(Hologram, microholo::config::Acquisition)> {
    let (meta, acq) = hologram_meta(config)?;
    let data = read_real_grid(path)?;
    let hologram = Hologram::new(data, Port::Combined, meta)
        .with_context(|| format!("{} does not match the configured acquisition", path.display()))?;
    Ok((hologram, acq))
}

fn spectrum_cmd(config: &PipelineConfig, path: &Path) -> Result<()> {
    let (hologram, acq) = load_combined(config, path)?;
    let gain = demodulation_gain(config.port_strategy, acq.reference.e0());
    let d = demodulate(&hologram, &acq.reference, config.filter_radius, gain)?;
    let dir = &config.output_dir;
    create_dir(dir)?;
    write_complex_grid(dir.join("spectrum.grid"), &d.spectrum)?;
    let magnitude = RealField::new(
        *d.spectrum.grid(),
        d.spectrum.samples().iter().map(|c| c.norm()).collect(),
    )?;
    write_real_grid(dir.join("spectrum_magnitude.grid"), &magnitude)?;
    export_grayscale(&magnitude.map(f64::ln_1p)?, GrayMapping::MinMax, dir.join("spectrum.png"))?;
    println!(
        "+1 order at {:?} (predicted {:.3}, {:.3}), -1 order at {:?}",
        d.orders.plus_one, d.orders.predicted_plus_one[0], d.orders.predicted_plus_one[1], d.orders.minus_one
    );
    println!("wrote spectrum to {}", dir.display());
    Ok(())
}

fn reconstruct_cmd(config: &PipelineConfig, path: &Path) -> Result<()> {
    let (hologram, acq) = load_combined(config, path)?;
    let gain = demodulation_gain(config.port_strategy, acq.reference.e0());
    let d = demodulate(&hologram, &acq.reference, config.filter_radius, gain)?;
    let rec = reconstruct(&d.baseband, config.z0_mm, &acq.params).context("reconstruct")?;
    let dir = &config.output_dir;
    create_dir(dir)?;
    write_complex_grid(dir.join("reconstructed_field.grid"), &rec.field)?;
    write_real_grid(dir.join("amplitude.grid"), &rec.amplitude)?;
    write_real_grid(dir.join("phase.grid"), &rec.wrapped_phase)?;
    export_grayscale(&rec.amplitude, GrayMapping::MinMax, dir.join("amplitude.png"))?;
    export_grayscale(&rec.wrapped_phase, GrayMapping::Phase, dir.join("phase.png"))?;
    let f = d.filter;
    println!(
        "window radius {} bins ({}), shift {:?}, residual carrier ({:.4}, {:.4}) bins, gain {}",
        f.radius_bins,
        f.radius_rule,
        f.integer_shift_bins,
        f.residual_carrier_bins[0],
        f.residual_carrier_bins[1],
        f.demodulation_gain
    );
    println!("wrote reconstruction to {}", dir.display());
    Ok(())
}

fn metrics_cmd(
    image: &Path,
    reference: Option<&Path>,
    window: usize,
    dynamic_range: Option<f64>,
    json: bool,
) -> Result<()> {
    let img = read_real_grid(image)?;
    let reference = reference.map(read_real_grid).transpose()?;
    let dr = dynamic_range.unwrap_or_else(|| {
        let (lo, hi) = reference.as_ref().unwrap_or(&img).range();
        if hi > lo {
            hi - lo
        } else {
            1.0
        }
    });
    let q = QualityReport::evaluate(&img, reference.as_ref(), window, dr)?;
    if json {
        println!("{}", serde_json::to_string(&q)?);
    } else {
        println!("speckle index {:.6}", q.speckle_index);
        println!("snr {}", q.snr);
        if let Some(s) = q.ssim {
            println!("ssim {s:.6}");
        }
        println!("window {}, excluded pixels {}", q.window, q.excluded_pixels);
    }
    Ok(())
}

fn enhance_cmd(config: &PipelineConfig, image: &Path, out: &Path) -> Result<()> {
    let img = read_real_grid(image)?;
    let enhanced = enhance(&img, &config.enhancer)?;
    write_real_grid(out, &enhanced)?;
    println!(
        "wrote {} ({}x{}), structural fidelity {:.4}",
        out.display(),
        enhanced.grid().nx(),
        enhanced.grid().ny(),
        structural_fidelity_check(&img, &enhanced)?
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out } => simulate(&config.resolve()?, out),
        Command::Record { config, field } => record_cmd(&config.resolve()?, &field),
        Command::Spectrum { config, hologram } => spectrum_cmd(&config.resolve()?, &hologram),
        Command::Reconstruct { config, hologram } => reconstruct_cmd(&config.resolve()?, &hologram),
        Command::Metrics {
            image,
            reference,
            window,
            dynamic_range,
            json,
        } => metrics_cmd(&image, reference.as_deref(), window, dynamic_range, json),
        Command::Enhance { config, image, out } => enhance_cmd(&config.resolve()?, &image, &out),
        Command::Pipeline { config } => {
            let config = config.resolve()?;
            let run = run_pipeline(&config)?;
            print!("{}", run.report.to_text());
            println!("artifacts in {}", config.output_dir.display());
            Ok(())
        }
    }
}

fn main() -> std::process::ExitCode {
    match run(Cli::parse()) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            let mut msg = e.to_string();
            for cause in e.chain().skip(1) {
                let cause = cause.to_string();
                if !msg.contains(&cause) {
                    msg = format!("{msg}: {cause}");
                }
            }
            eprintln!("error: {msg}");
            std::process::ExitCode::FAILURE
        }
    }
}
