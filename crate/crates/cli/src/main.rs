//! Batch pipelines for quantum vocal sound processing: feature analysis,
//! stream following, mixed-state sonification, scene generation and
//! audio-domain measurement.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use qvts_core::audio::AudioBuffer;
use qvts_core::evolution::{run_follower, EvolutionConfig, EvolutionTrace, InitialState};
use qvts_core::features::{analyze, FeatureParams, FeatureTrack};
use qvts_core::phon::{basis, BasisState, DensityMatrix};
use qvts_core::sines_noise::{
    measure_phonation, measure_turbulence, noncommutativity_experiment,
};
use qvts_core::synth::{
    add_noise, crossing_glides, fugue_incipit, notes_from_json, render_notes, sonify_trace,
    GlideSpec, Timbre,
};
use qvts_core::wav::{read_wav, write_wav, SampleFormat};
use qvts_core::Error;

#[derive(Parser)]
#[command(
    name = "qvts",
    about = "Quantum vocal theory of sound: analysis, following, and sonification pipelines",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract pitch salience, band noise and onset features to CSV.
    Analyze(AnalyzeArgs),
    /// Follow an auditory stream with a pure phon state; write a trace.
    Follow(FollowArgs),
    /// Evolve a mixed phon state and sonify the density matrix.
    Mixed(MixedArgs),
    /// Generate test scenes.
    #[command(subcommand)]
    Scene(SceneCommand),
    /// Audio-domain measurements through the sines+noise model.
    #[command(subcommand)]
    Measure(MeasureCommand),
}

#[derive(Args)]
struct StftArgs {
    /// Analysis window size in samples.
    #[arg(long, default_value_t = 2048)]
    window: usize,
    /// FFT size in samples.
    #[arg(long, default_value_t = 4096)]
    fft: usize,
    /// Hop size in samples.
    #[arg(long, default_value_t = 1024)]
    hop: usize,
}

impl StftArgs {
    fn feature_params(&self) -> FeatureParams {
        FeatureParams {
            window_size: self.window,
            fft_size: self.fft,
            hop: self.hop,
            ..FeatureParams::default()
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input WAV file.
    input: PathBuf,
    /// Output CSV path.
    #[arg(short, long, default_value = "features.csv")]
    output: PathBuf,
    /// Also dump the magnitude spectrogram as a CSV matrix.
    #[arg(long)]
    dump_spectrogram: Option<PathBuf>,
    #[command(flatten)]
    stft: StftArgs,
}

/// Follower parameters shared by `follow` and `mixed`; every flag falls back
/// to the config file, then to the built-in default.
#[derive(Args)]
struct EvolutionArgs {
    /// Frames per segment (decimation factor M).
    #[arg(long)]
    decimation: Option<usize>,
    /// Exponential damping rate k inside a segment.
    #[arg(long)]
    damping: Option<f64>,
    /// Pitchiness threshold for measuring along z.
    #[arg(long)]
    threshold: Option<f64>,
    /// Collapse on every Nth measurement.
    #[arg(long)]
    collapse_every: Option<usize>,
    /// Hamiltonian energy scale.
    #[arg(long)]
    omega: Option<f64>,
    /// Gain on the onset feature in the potential (0 disables the y axis).
    #[arg(long)]
    onset_weight: Option<f64>,
    /// Random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON config file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    decimation: Option<usize>,
    damping: Option<f64>,
    threshold: Option<f64>,
    collapse_every: Option<usize>,
    omega: Option<f64>,
    onset_weight: Option<f64>,
    seed: Option<u64>,
    initial: Option<String>,
    p_up: Option<f64>,
    mixedness: Option<f64>,
}

impl EvolutionArgs {
    fn load_config(&self) -> Result<ConfigFile, Error> {
        match &self.config {
            None => Ok(ConfigFile::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                Ok(serde_json::from_str(&text)?)
            }
        }
    }

    fn resolve(&self, file: &ConfigFile, initial: InitialState) -> EvolutionConfig {
        let defaults = EvolutionConfig::default();
        EvolutionConfig {
            frame_decimation: self
                .decimation
                .or(file.decimation)
                .unwrap_or(defaults.frame_decimation),
            damping: self.damping.or(file.damping).unwrap_or(defaults.damping),
            pitchiness_threshold: self
                .threshold
                .or(file.threshold)
                .unwrap_or(defaults.pitchiness_threshold),
            collapse_decimation: self
                .collapse_every
                .or(file.collapse_every)
                .unwrap_or(defaults.collapse_decimation),
            initial,
            seed: self.seed.or(file.seed).unwrap_or(defaults.seed),
            omega: self.omega.or(file.omega).unwrap_or(defaults.omega),
            mixedness_threshold: defaults.mixedness_threshold,
            onset_weight: self
                .onset_weight
                .or(file.onset_weight)
                .unwrap_or(defaults.onset_weight),
        }
    }
}

#[derive(Args)]
struct FollowArgs {
    /// Input WAV file.
    input: PathBuf,
    /// Output trace CSV path.
    #[arg(short, long, default_value = "trace.csv")]
    output: PathBuf,
    /// Also write the trace as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Sonify the trace into a WAV file.
    #[arg(long)]
    sonify: Option<PathBuf>,
    /// Initial basis state: u, d, r, l, f or s.
    #[arg(long, default_value = "u")]
    initial: String,
    #[command(flatten)]
    evolution: EvolutionArgs,
    #[command(flatten)]
    stft: StftArgs,
}

#[derive(Args)]
struct MixedArgs {
    /// Input WAV file.
    input: PathBuf,
    /// Output trace CSV path.
    #[arg(short, long, default_value = "trace.csv")]
    output: PathBuf,
    /// Output WAV path for the sonified density evolution.
    #[arg(long, default_value = "out.wav")]
    out: PathBuf,
    /// Also write the trace as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Initial pitch-up probability of the diagonal mixture.
    #[arg(long)]
    p_up: Option<f64>,
    /// Mixedness threshold for switching to pulsation measurements.
    #[arg(long)]
    mixedness: Option<f64>,
    #[command(flatten)]
    evolution: EvolutionArgs,
    #[command(flatten)]
    stft: StftArgs,
}

#[derive(Subcommand)]
enum SceneCommand {
    /// Two crossing glides interrupted by a white-noise burst.
    Glides(GlidesArgs),
    /// The fugue-opening fixture rendered with the additive timbre.
    Fugue(FugueArgs),
    /// Add white noise to an existing recording.
    NoiseAdd(NoiseAddArgs),
}

#[derive(Args)]
struct GlidesArgs {
    #[arg(short, long, default_value = "out.wav")]
    output: PathBuf,
    #[arg(long, default_value_t = 400.0)]
    f1_start: f64,
    #[arg(long, default_value_t = 800.0)]
    f1_end: f64,
    #[arg(long, default_value_t = 800.0)]
    f2_start: f64,
    #[arg(long, default_value_t = 400.0)]
    f2_end: f64,
    /// Total duration in seconds.
    #[arg(long, default_value_t = 3.0)]
    duration: f64,
    /// Burst onset time in seconds.
    #[arg(long, default_value_t = 1.5)]
    noise_start: f64,
    /// Burst duration in seconds.
    #[arg(long, default_value_t = 0.2)]
    noise_dur: f64,
    /// Burst amplitude.
    #[arg(long, default_value_t = 0.8)]
    noise_amp: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 44100)]
    sr: u32,
}

#[derive(Args)]
struct FugueArgs {
    #[arg(short, long, default_value = "out.wav")]
    output: PathBuf,
    #[arg(long, default_value_t = 100.0)]
    bpm: f64,
    #[arg(long, default_value_t = 44100)]
    sr: u32,
    /// Note list JSON (defaults to the embedded fugue opening).
    #[arg(long)]
    notes: Option<PathBuf>,
    /// Number of additive partials per note. Two keeps every partial of the
    /// fixture below 1 kHz, clear of the noise-tracking bands.
    #[arg(long, default_value_t = 6)]
    harmonics: usize,
    /// Disable the broadband key click at each onset.
    #[arg(long)]
    no_click: bool,
}

#[derive(Args)]
struct NoiseAddArgs {
    /// Input WAV file.
    input: PathBuf,
    #[arg(short, long, default_value = "out.wav")]
    output: PathBuf,
    /// Noise amplitude.
    #[arg(long, default_value_t = 0.1)]
    amp: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum MeasureCommand {
    /// Extract the sinusoidal (phonation) component.
    Phonation(MeasureArgs),
    /// Extract the residual (turbulence) component.
    Turbulence(MeasureArgs),
    /// Apply both measurement orders and print their spectral distance.
    BothOrders(BothOrdersArgs),
}

#[derive(Args)]
struct MeasureArgs {
    /// Input WAV file.
    input: PathBuf,
    #[arg(short, long, default_value = "out.wav")]
    output: PathBuf,
}

#[derive(Args)]
struct BothOrdersArgs {
    /// Input WAV file.
    input: PathBuf,
    /// Output for phonation-after-turbulence.
    #[arg(long, default_value = "phonation_after_turbulence.wav")]
    out_a: PathBuf,
    /// Output for turbulence-after-phonation.
    #[arg(long, default_value = "turbulence_after_phonation.wav")]
    out_b: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// 2 for usage and I/O problems, 1 for anything internal.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_)
        | Error::AudioFormat(_)
        | Error::InvalidArgument(_)
        | Error::UnknownBasis(_)
        | Error::Serialize(_) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Follow(args) => cmd_follow(args),
        Command::Mixed(args) => cmd_mixed(args),
        Command::Scene(SceneCommand::Glides(args)) => cmd_scene_glides(args),
        Command::Scene(SceneCommand::Fugue(args)) => cmd_scene_fugue(args),
        Command::Scene(SceneCommand::NoiseAdd(args)) => cmd_scene_noise_add(args),
        Command::Measure(MeasureCommand::Phonation(args)) => {
            cmd_measure_channel(args, true)
        }
        Command::Measure(MeasureCommand::Turbulence(args)) => {
            cmd_measure_channel(args, false)
        }
        Command::Measure(MeasureCommand::BothOrders(args)) => cmd_measure_both(args),
    }
}

fn load_features(
    input: &Path,
    stft_args: &StftArgs,
) -> Result<(AudioBuffer, FeatureTrack), Error> {
    let audio = read_wav(input)?;
    let features = analyze(&audio, &stft_args.feature_params())?;
    Ok((audio, features))
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), Error> {
    let audio = read_wav(&args.input)?;
    let params = args.stft.feature_params();
    if let Some(path) = &args.dump_spectrogram {
        let spec = qvts_core::features::stft(
            &audio,
            params.window_size,
            params.fft_size,
            params.hop,
        )?;
        std::fs::write(path, spec.magnitude_csv())?;
    }
    let features = analyze(&audio, &params)?;
    std::fs::write(&args.output, features.to_csv())?;
    println!(
        "analyzed {} frames -> {}",
        features.len(),
        args.output.display()
    );
    Ok(())
}

fn write_trace(
    trace: &EvolutionTrace,
    csv_path: &Path,
    json_path: Option<&Path>,
) -> Result<(), Error> {
    std::fs::write(csv_path, trace.to_csv())?;
    if let Some(path) = json_path {
        std::fs::write(path, trace.to_json()?)?;
    }
    Ok(())
}

fn cmd_follow(args: FollowArgs) -> Result<(), Error> {
    let file = args.evolution.load_config()?;
    let initial_name = if args.initial != "u" {
        args.initial.clone()
    } else {
        file.initial.clone().unwrap_or_else(|| args.initial.clone())
    };
    let initial = InitialState::Pure(basis(BasisState::from_str(&initial_name)?));
    let config = args.evolution.resolve(&file, initial);
    let (_, features) = load_features(&args.input, &args.stft)?;
    let trace = run_follower(&features, &config)?;
    write_trace(&trace, &args.output, args.json.as_deref())?;
    if let Some(path) = &args.sonify {
        let audio = sonify_trace(&trace, &features, 44100, config.seed)?;
        write_wav(path, &audio, SampleFormat::Float32)?;
    }
    println!(
        "followed {} segments (seed {}) -> {}",
        trace.len(),
        config.seed,
        args.output.display()
    );
    Ok(())
}

fn cmd_mixed(args: MixedArgs) -> Result<(), Error> {
    let file = args.evolution.load_config()?;
    let p_up = args.p_up.or(file.p_up).unwrap_or(1.0 / 3.0);
    if !(0.0..=1.0).contains(&p_up) {
        return Err(Error::InvalidArgument("p-up must be in [0, 1]".into()));
    }
    let initial = InitialState::Mixed(DensityMatrix::diagonal_mixture(p_up)?);
    let mut config = args.evolution.resolve(&file, initial);
    if let Some(m) = args.mixedness.or(file.mixedness) {
        config.mixedness_threshold = m;
    }
    let (_, features) = load_features(&args.input, &args.stft)?;
    let trace = run_follower(&features, &config)?;
    write_trace(&trace, &args.output, args.json.as_deref())?;
    let audio = sonify_trace(&trace, &features, 44100, config.seed)?;
    write_wav(&args.out, &audio, SampleFormat::Float32)?;
    println!(
        "mixed evolution over {} segments (p_up {p_up:.4}, seed {}) -> {}, {}",
        trace.len(),
        config.seed,
        args.output.display(),
        args.out.display()
    );
    Ok(())
}

fn cmd_scene_glides(args: GlidesArgs) -> Result<(), Error> {
    let audio = crossing_glides(
        GlideSpec::new(args.f1_start, args.f1_end),
        GlideSpec::new(args.f2_start, args.f2_end),
        args.duration,
        args.noise_start,
        args.noise_dur,
        args.noise_amp,
        args.seed,
        args.sr,
    )?;
    write_wav(&args.output, &audio, SampleFormat::Float32)?;
    println!(
        "glides scene: {:.2}s at {} Hz -> {}",
        audio.duration(),
        args.sr,
        args.output.display()
    );
    Ok(())
}

fn cmd_scene_fugue(args: FugueArgs) -> Result<(), Error> {
    let notes = match &args.notes {
        Some(path) => notes_from_json(&std::fs::read_to_string(path)?)?,
        None => fugue_incipit(),
    };
    let timbre = Timbre {
        harmonics: args.harmonics,
        key_click: !args.no_click,
        ..Timbre::default()
    };
    let audio = render_notes(&notes, args.bpm, args.sr, &timbre)?;
    write_wav(&args.output, &audio, SampleFormat::Float32)?;
    println!(
        "fugue scene: {} notes, {:.2}s -> {}",
        notes.len(),
        audio.duration(),
        args.output.display()
    );
    Ok(())
}

fn cmd_scene_noise_add(args: NoiseAddArgs) -> Result<(), Error> {
    let audio = read_wav(&args.input)?;
    let noisy = add_noise(&audio, args.amp, args.seed)?;
    write_wav(&args.output, &noisy, SampleFormat::Float32)?;
    println!(
        "added noise (amplitude {}) -> {}",
        args.amp,
        args.output.display()
    );
    Ok(())
}

fn cmd_measure_channel(args: MeasureArgs, phonation: bool) -> Result<(), Error> {
    let audio = read_wav(&args.input)?;
    let out = if phonation {
        measure_phonation(&audio)?
    } else {
        measure_turbulence(&audio)?
    };
    write_wav(&args.output, &out, SampleFormat::Float32)?;
    println!(
        "{} component -> {}",
        if phonation { "phonation" } else { "turbulence" },
        args.output.display()
    );
    Ok(())
}

fn cmd_measure_both(args: BothOrdersArgs) -> Result<(), Error> {
    let audio = read_wav(&args.input)?;
    let experiment = noncommutativity_experiment(&audio)?;
    write_wav(
        &args.out_a,
        &experiment.phonation_after_turbulence,
        SampleFormat::Float32,
    )?;
    write_wav(
        &args.out_b,
        &experiment.turbulence_after_phonation,
        SampleFormat::Float32,
    )?;
    println!("spectral_distance {:.6}", experiment.spectral_distance);
    Ok(())
}
