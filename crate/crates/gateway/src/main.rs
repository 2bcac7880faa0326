use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use park_anpr::{ClassicalDetector, ExternalDetector, NormalizedPlate, PlateDetector};
use park_gateway::pipeline::{evaluate, read_scene};
use park_gateway::simulate::{generate_scenario, run_embedded, run_scenario, Scenario};
use park_gateway::Config;
use park_imaging::{read_image, to_grayscale, Rect};
use park_ocr::{build_atlas, recognize_plate};
use park_synth::{generate_corpus, read_manifest, NoiseTier};

#[derive(Parser)]
#[command(name = "smartpark", version, about = "Plate recognition and parking back end")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic scene corpus with a manifest.
    GenCorpus {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value = "clean")]
        tier: NoiseTier,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print plate detections in a scene as JSON lines.
    Detect {
        image: PathBuf,
        /// Shell command of an out-of-process detector to use instead.
        #[arg(long)]
        detector_cmd: Option<String>,
    },
    /// Read a plate image, or a region of a scene given by --bbox x,y,w,h.
    Ocr {
        image: PathBuf,
        #[arg(long, value_delimiter = ',')]
        bbox: Option<Vec<u32>>,
    },
    /// Detect, rectify and read the plate in a scene.
    Pipeline {
        image: PathBuf,
        #[arg(long)]
        detector_cmd: Option<String>,
    },
    /// Score detection and recognition over a corpus manifest.
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        /// Where to write the confusion matrix (default: next to the manifest).
        #[arg(long)]
        confusion_out: Option<PathBuf>,
        #[arg(long)]
        detector_cmd: Option<String>,
    },
    /// Run the HTTP gateway.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Write a scripted gate scenario.
    Scenario {
        #[arg(long, default_value_t = 50)]
        vehicles: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a scenario against a running gateway, or an embedded one when --url is absent.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        url: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn detector(cmd: Option<String>) -> Box<dyn PlateDetector> {
    match cmd {
        Some(cmd) => Box::new(ExternalDetector { name: "external".into(), program: "sh".into(), args: vec!["-c".into(), cmd] }),
        None => Box::new(ClassicalDetector::default()),
    }
}

fn load_config(path: Option<&Path>) -> anyhow::Result<Config> {
    path.map_or_else(|| Ok(Config::default()), Config::load)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::GenCorpus { seed, count, tier, out } => {
            let entries = generate_corpus(&out, seed, count, tier)?;
            eprintln!("wrote {} scenes to {}", entries.len(), out.display());
        }
        Command::Detect { image, detector_cmd } => {
            let img = read_image(&image).with_context(|| format!("reading {}", image.display()))?;
            for d in detector(detector_cmd).detect(&img)? {
                println!("{}", serde_json::to_string(&d)?);
            }
        }
        Command::Ocr { image, bbox } => {
            let img = read_image(&image).with_context(|| format!("reading {}", image.display()))?;
            let plate = match bbox.as_deref() {
                Some(&[x, y, w, h]) => {
                    let det = park_anpr::Detection { bbox: Rect::new(x, y, w, h), angle: 0.0, score: 1.0 };
                    park_anpr::rectify_and_normalize(&img, &det)?
                }
                Some(_) => bail!("--bbox takes x,y,w,h"),
                None => NormalizedPlate::from_plate_image(&to_grayscale(&img))?,
            };
            println!("{}", recognize_plate(&plate, &build_atlas())?);
        }
        Command::Pipeline { image, detector_cmd } => {
            let img = read_image(&image).with_context(|| format!("reading {}", image.display()))?;
            let scene = read_scene(&img, detector(detector_cmd).as_ref(), &build_atlas())?;
            let Some(text) = scene.text() else {
                bail!("no readable plate among {} detections", scene.detections.len());
            };
            println!("time: {}\n{text}", scene.elapsed_seconds);
        }
        Command::Evaluate { manifest, confusion_out, detector_cmd } => {
            let entries = read_manifest(&manifest).with_context(|| format!("reading {}", manifest.display()))?;
            let report = evaluate(&manifest, &entries, detector(detector_cmd).as_ref(), &build_atlas())?;
            print!("{}", report.to_json_lines());
            let csv_path = confusion_out.unwrap_or_else(|| manifest.with_file_name("confusion.csv"));
            std::fs::write(&csv_path, report.confusion.to_csv())?;
            eprintln!("confusion matrix written to {}", csv_path.display());
        }
        Command::Serve { config, port, data } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(p) = port {
                cfg.port = p;
            }
            if let Some(d) = data {
                cfg.data_dir = d;
            }
            tokio::runtime::Runtime::new()?.block_on(park_gateway::server::serve(&cfg))?;
        }
        Command::Scenario { vehicles, seed, config, out } => {
            let cfg = load_config(config.as_deref())?;
            let scenario = generate_scenario(vehicles, seed, &cfg.schedule);
            std::fs::write(&out, serde_json::to_string_pretty(&scenario)?)?;
        }
        Command::Simulate { scenario, url, config } => {
            let text = std::fs::read_to_string(&scenario).with_context(|| format!("reading {}", scenario.display()))?;
            let scenario: Scenario = serde_json::from_str(&text).context("parsing scenario")?;
            let cfg = load_config(config.as_deref())?;
            let rt = tokio::runtime::Runtime::new()?;
            let report = rt.block_on(async {
                match url {
                    Some(url) => run_scenario(&url, &scenario).await,
                    None => run_embedded(&scenario, cfg.schedule).await,
                }
            })?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
