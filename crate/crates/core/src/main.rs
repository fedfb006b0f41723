use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sonoscape::analysis::{build_report, write_tables};
use sonoscape::config::Config;
use sonoscape::mapping::{dump_params, Ecology};
use sonoscape::process_sim::{default_level_set, generate_trajectory, write_frame_log, Scenario};
use sonoscape::records::Export;
use sonoscape::robot::{Profile, Robot, RobotOptions};
use sonoscape::service::{bind, serve, AppState};
use sonoscape::synth::{mix_level, write_wav, AssetLibrary};

#[derive(Parser)]
#[command(name = "sonoscape", version, about = "Soundscape sonification of a simulated printing process, and the experiment around it")]
struct Cli {
    /// Log more (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the seeded main level set and the frame log of every level.
    Simulate {
        /// Level-set seed.
        #[arg(long = "levels", value_name = "SEED")]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10.0)]
        frame_rate: f64,
    },
    /// Render levels to WAV.
    Render(RenderArgs),
    /// Run the experiment service.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the configured port.
        #[arg(long)]
        port: Option<u16>,
        /// Overrides the configured data directory.
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
    /// Play sessions as a scripted participant.
    Robot(RobotArgs),
    /// Score an export and write the report and CSV tables.
    Analyze {
        /// Export JSON as served by `/api/export`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RenderArgs {
    /// MIXED, SYNTH, NATURE, or ALL. Repeatable.
    #[arg(long, required = true, value_name = "ECOLOGY")]
    ecology: Vec<String>,
    /// Level or scenario JSON (as written by `simulate`).
    #[arg(long)]
    level: PathBuf,
    /// A `.wav` file for one level and ecology, otherwise a directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10.0)]
    frame_rate: f64,
    #[arg(long, default_value_t = 44_100)]
    sample_rate: u32,
    /// Recorded samples replacing the procedural sounds, as `<dir>/<stimulus>/<name>.wav`.
    #[arg(long)]
    assets: Option<PathBuf>,
    /// Also write the mapped parameters per frame as JSON lines.
    #[arg(long, value_name = "FILE")]
    dump_params: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileKind {
    Perfect,
    Sloppy,
}

#[derive(Args)]
struct RobotArgs {
    #[arg(long, default_value_t = 1)]
    sessions: usize,
    #[arg(long, value_enum, default_value = "perfect")]
    profile: ProfileKind,
    /// Seconds from anomaly onset to the check.
    #[arg(long, default_value_t = 0.5)]
    delay: f64,
    /// Miss probability (sloppy only).
    #[arg(long, default_value_t = 0.2)]
    pmiss: f64,
    /// False-alarm probability per anomaly-free checkbox (sloppy only).
    #[arg(long, default_value_t = 0.1)]
    pfa: f64,
    /// Service to play against. Without it an in-process service is started.
    #[arg(long)]
    server: Option<String>,
    /// Config of the in-process service; also supplies the level seed.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Level seed of the service, when it differs from the config.
    #[arg(long)]
    level_seed: Option<u64>,
    /// Data directory of the in-process service (default: a temporary one).
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip downloading level audio.
    #[arg(long)]
    no_audio: bool,
    /// Write the export after the run.
    #[arg(long, value_name = "FILE")]
    export: Option<PathBuf>,
    /// Analyze the export into this directory after the run.
    #[arg(long, value_name = "DIR")]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => tracing::Level::WARN,
        1 => tracing::Level::INFO,
        _ => tracing::Level::DEBUG,
    };
    tracing_subscriber::fmt().with_max_level(level).with_writer(std::io::stderr).init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate { seed, out, frame_rate } => simulate(seed, &out, frame_rate),
        Command::Render(args) => render(args),
        Command::Serve { config, port, data_dir } => {
            let mut cfg = Config::load(config.as_deref())?;
            if let Some(p) = port {
                cfg.port = p;
            }
            if let Some(d) = data_dir {
                cfg.data_dir = d;
            }
            runtime()?.block_on(serve_until_signal(cfg))
        }
        Command::Robot(args) => runtime()?.block_on(robot(args)),
        Command::Analyze { input, out } => analyze(&input, &out),
    }
}

fn runtime() -> Result<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("starting the async runtime")
}

fn simulate(seed: u64, out: &Path, frame_rate: f64) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let levels = default_level_set(seed);
    for level in &levels {
        let frames = generate_trajectory(level, frame_rate)?;
        let path = out.join(format!("{}.frames.jsonl", level.id));
        let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_frame_log(BufWriter::new(file), &frames)?;
        let path = out.join(format!("{}.json", level.id));
        fs::write(&path, serde_json::to_string_pretty(level)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    let scenario = Scenario { levels };
    fs::write(out.join("levels.json"), scenario.to_json() + "\n")?;
    println!("wrote {} levels to {}", scenario.levels.len(), out.display());
    Ok(())
}

fn parse_ecologies(names: &[String]) -> Result<Vec<Ecology>> {
    let mut out = Vec::new();
    for name in names {
        let named = if name.eq_ignore_ascii_case("all") {
            Ecology::ALL.to_vec()
        } else {
            vec![name.parse::<Ecology>()?]
        };
        for e in named {
            if !out.contains(&e) {
                out.push(e);
            }
        }
    }
    Ok(out)
}

fn render(args: RenderArgs) -> Result<()> {
    let ecologies = parse_ecologies(&args.ecology)?;
    let text = fs::read_to_string(&args.level).with_context(|| format!("reading {}", args.level.display()))?;
    let scenario = Scenario::from_json(&text).with_context(|| format!("parsing {}", args.level.display()))?;
    let assets = args.assets.as_deref().map_or_else(AssetLibrary::empty, AssetLibrary::load);
    let single = args.out.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav"));
    if single && scenario.levels.len() * ecologies.len() != 1 {
        bail!(
            "{} is a single file but {} levels x {} ecologies were requested; pass a directory",
            args.out.display(),
            scenario.levels.len(),
            ecologies.len()
        );
    }
    if !single {
        fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    }
    let mut dump = match &args.dump_params {
        Some(p) => Some(BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => None,
    };
    for level in &scenario.levels {
        let frames = generate_trajectory(level, args.frame_rate)?;
        for &ecology in &ecologies {
            let mix = mix_level(level, &frames, ecology, level.seed, args.sample_rate, &assets);
            let path = if single {
                args.out.clone()
            } else {
                args.out.join(format!("{}_{}.wav", level.id, ecology))
            };
            write_wav(&path, &mix.mix).with_context(|| format!("writing {}", path.display()))?;
            if let Some(d) = dump.as_mut() {
                dump_params(d, &frames, ecology)?;
            }
            println!("{}", path.display());
        }
    }
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
    tracing::info!("shutting down");
}

async fn serve_until_signal(cfg: Config) -> Result<()> {
    let state = AppState::open(cfg.clone())?;
    let listener = bind(&cfg).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    serve(state, listener, shutdown_signal()).await?;
    Ok(())
}

async fn robot(args: RobotArgs) -> Result<()> {
    let profile = match args.profile {
        ProfileKind::Perfect => Profile::Perfect { delay: args.delay },
        ProfileKind::Sloppy => Profile::Sloppy {
            pmiss: args.pmiss,
            pfa: args.pfa,
            delay: args.delay,
        },
    };
    for (name, p) in [("pmiss", args.pmiss), ("pfa", args.pfa)] {
        if !(0.0..=1.0).contains(&p) {
            bail!("--{name} must be within [0, 1], got {p}");
        }
    }
    if !(args.delay >= 0.0 && args.delay.is_finite()) {
        bail!("--delay must be a non-negative number of seconds");
    }
    let mut cfg = Config::load(args.config.as_deref())?;
    let level_seed = args.level_seed.unwrap_or(cfg.level_seed);

    // Without --server, host the service in-process on a free port.
    let mut _tmp = None;
    let mut local = None;
    let base_url = match &args.server {
        Some(url) => url.clone(),
        None => {
            cfg.port = 0;
            cfg.data_dir = match &args.data_dir {
                Some(d) => d.clone(),
                None => {
                    let t = tempfile::Builder::new().prefix("sonoscape-robot-").tempdir()?;
                    let p = t.path().to_path_buf();
                    _tmp = Some(t);
                    p
                }
            };
            let state = AppState::open(cfg.clone())?;
            let listener = bind(&cfg).await?;
            let url = format!("http://{}", listener.local_addr()?);
            let (tx, rx) = tokio::sync::oneshot::channel::<()>();
            let task = tokio::spawn(serve(state, listener, async {
                rx.await.ok();
            }));
            local = Some((tx, task));
            url
        }
    };

    let bot = Robot::new(RobotOptions {
        base_url,
        sessions: args.sessions,
        profile,
        level_seed,
        frame_rate: cfg.frame_rate,
        seed: args.seed,
        fetch_audio: !args.no_audio,
    })?;
    let played = bot.run().await?;
    for s in &played {
        println!(
            "{}  {:<6}  qualifiers {}  levels {}  checks {}  sequences {}",
            s.session_id, s.ecology, s.qualify_attempts, s.levels, s.annotations, s.sequences
        );
    }
    let export = bot.export().await?;
    if let Some((tx, task)) = local {
        let _ = tx.send(());
        task.await??;
    }
    if let Some(path) = &args.export {
        fs::write(path, serde_json::to_string_pretty(&export)?).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(dir) = &args.report {
        report(&export, dir)?;
    }
    Ok(())
}

fn analyze(input: &Path, out: &Path) -> Result<()> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let export: Export = serde_json::from_str(&text).with_context(|| format!("parsing {}", input.display()))?;
    report(&export, out)
}

fn report(export: &Export, out: &Path) -> Result<()> {
    let report = build_report(export);
    write_tables(&report, out).with_context(|| format!("writing tables to {}", out.display()))?;
    if report.no_sessions {
        println!("no sessions with completed levels");
    }
    for o in &report.overall {
        println!("{:<6}  sessions {}  overall d' {:.3}", o.ecology, report.sessions[&o.ecology], o.d_prime);
    }
    println!("report written to {}", out.display());
    Ok(())
}
