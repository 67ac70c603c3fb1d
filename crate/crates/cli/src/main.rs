use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use afterimage::color::label;
use afterimage::experiment::{aggregate_scores, load_sessions, ScoreTable, Session, SessionStore};
use afterimage::model::{predict, predict_with, ModelParams};
use afterimage::reference::{compare_reference, format_comparisons, reference_cases, Comparison};
use afterimage::render::{render_figure, DEFAULT_RADIUS, DEFAULT_SIGMA, DEFAULT_SIZE};
use afterimage::{BaselineScheme, BlurSettings, Geometry, Rgb, StimulusSpec};
use afterimage_server::AppState;
use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Predicts negative afterimage colors and reproduces the published comparison figures.
#[derive(Debug, Parser)]
#[command(name = "afterimage", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Print the modified test color and both afterimage colors for one stimulus.
    Predict(PredictArgs),
    /// Render the four comparison panels for one stimulus or for every published figure.
    Figure(FigureArgs),
    /// Compare computed colors with the published ones and tabulate session scores.
    Report(ReportArgs),
    /// Host the trial service and the UI assets.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct StimulusArgs {
    /// Test field color: a name (red, green, blue, cyan, magenta, yellow, white, black) or `r,g,b`.
    #[arg(long = "test", value_name = "COLOR")]
    test: Rgb,
    /// Inducing (surround) field color.
    #[arg(long, value_name = "COLOR")]
    inducing: Rgb,
    /// New stimulating field color.
    #[arg(long = "new", value_name = "COLOR")]
    new_field: Rgb,
}

impl StimulusArgs {
    fn spec(&self) -> StimulusSpec {
        StimulusSpec::new(self.test, self.inducing, self.new_field)
    }
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[command(flatten)]
    stimulus: StimulusArgs,
    /// Override the selected weights, each in (0, 1); needs all three.
    #[arg(long, value_parser = open_unit_interval, requires_all = ["beta_t", "beta_i"])]
    alpha: Option<f64>,
    #[arg(long, value_parser = open_unit_interval, requires_all = ["alpha", "beta_i"])]
    beta_t: Option<f64>,
    #[arg(long, value_parser = open_unit_interval, requires_all = ["alpha", "beta_t"])]
    beta_i: Option<f64>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct FigureArgs {
    #[arg(long = "test", value_name = "COLOR", required_unless_present = "all_paper_figures")]
    test: Option<Rgb>,
    #[arg(long, value_name = "COLOR", required_unless_present = "all_paper_figures")]
    inducing: Option<Rgb>,
    #[arg(long = "new", value_name = "COLOR", required_unless_present = "all_paper_figures")]
    new_field: Option<Rgb>,
    /// Render the eight published cases instead of one stimulus.
    #[arg(long, conflicts_with_all = ["test", "inducing", "new_field", "name"])]
    all_paper_figures: bool,
    /// Complement used for panel (c).
    #[arg(long, default_value = "group2")]
    scheme: BaselineScheme,
    #[arg(long, env = "AFTERIMAGE_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    /// File stem for a single stimulus.
    #[arg(long, default_value = "figure")]
    name: String,
    /// Fail instead of creating a missing output directory.
    #[arg(long)]
    no_create: bool,
    #[arg(long, default_value_t = DEFAULT_SIZE)]
    width: u32,
    #[arg(long, default_value_t = DEFAULT_SIZE)]
    height: u32,
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius: f64,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Session event logs to aggregate.
    #[arg(long = "log", value_name = "FILE")]
    logs: Vec<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    listen: String,
    /// Directory holding `events.jsonl`.
    #[arg(long, env = "AFTERIMAGE_DATA_DIR", default_value = "afterimage-data")]
    data_dir: PathBuf,
    /// Built UI assets; a placeholder page is served without it.
    #[arg(long)]
    ui_dir: Option<PathBuf>,
}

fn open_unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1)"))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Cmd::Predict(a) => cmd_predict(&a),
        Cmd::Figure(a) => cmd_figure(&a),
        Cmd::Report(a) => cmd_report(&a),
        Cmd::Serve(a) => cmd_serve(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[derive(Serialize)]
struct PredictOutput {
    stimulus: StimulusSpec,
    #[serde(flatten)]
    prediction: afterimage::AfterimagePrediction,
}

fn cmd_predict(a: &PredictArgs) -> Result<()> {
    let spec = a.stimulus.spec();
    let prediction = match (a.alpha, a.beta_t, a.beta_i) {
        (Some(alpha), Some(beta_t), Some(beta_i)) => {
            predict_with(&spec, &ModelParams::manual(alpha, beta_t, beta_i)?)
        }
        _ => predict(&spec),
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&PredictOutput { stimulus: spec, prediction })?);
        return Ok(());
    }
    let p = prediction.params;
    println!(
        "stimulus  test={} inducing={} new={}",
        label(spec.c_ot),
        label(spec.c_oi),
        label(spec.c_n)
    );
    println!(
        "params    alpha={} beta_t={} beta_i={} ({})",
        p.alpha(),
        p.beta_t(),
        p.beta_i(),
        p.provenance()
    );
    println!("C_MT      {:.6}", prediction.c_mt);
    println!("C_AT      {:.6}", prediction.c_at);
    println!("C_AI      {:.6}", prediction.c_ai);
    Ok(())
}

fn prepare_dir(dir: &Path, no_create: bool) -> Result<()> {
    if dir.is_dir() {
        return Ok(());
    }
    if no_create {
        bail!("output directory {} does not exist", dir.display());
    }
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn cmd_figure(a: &FigureArgs) -> Result<()> {
    let g = Geometry::new(
        a.width,
        a.height,
        a.width as f64 / 2.0,
        a.height as f64 / 2.0,
        a.radius,
    )?;
    let blur = BlurSettings::new(a.sigma)?;
    let jobs: Vec<(String, StimulusSpec)> = if a.all_paper_figures {
        reference_cases().into_iter().map(|c| (c.id.clone(), c.spec())).collect()
    } else {
        let (Some(t), Some(i), Some(n)) = (a.test, a.inducing, a.new_field) else {
            unreachable!("clap enforces the stimulus flags")
        };
        vec![(a.name.clone(), StimulusSpec::new(t, i, n))]
    };
    prepare_dir(&a.out_dir, a.no_create)?;
    for (stem, spec) in &jobs {
        let panels = render_figure(spec, a.scheme, &g, &blur)?;
        for path in panels.write_pngs(&a.out_dir, stem)? {
            println!("{}", path.display());
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ReportOutput {
    comparisons: Vec<Comparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scores: Option<SchemeScores>,
}

#[derive(Serialize)]
struct SchemeScores {
    sessions: usize,
    group1: ScoreTable,
    group2: ScoreTable,
}

fn cmd_report(a: &ReportArgs) -> Result<()> {
    let comparisons = compare_reference();
    let scores = if a.logs.is_empty() {
        None
    } else {
        let mut sessions: Vec<Session> = Vec::new();
        for path in &a.logs {
            sessions.extend(
                load_sessions(path).with_context(|| format!("reading {}", path.display()))?,
            );
        }
        let table = |scheme| aggregate_scores(sessions.iter().filter(|s| s.scheme == scheme));
        Some(SchemeScores {
            sessions: sessions.len(),
            group1: table(BaselineScheme::Group1),
            group2: table(BaselineScheme::Group2),
        })
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&ReportOutput { comparisons, scores })?);
        return Ok(());
    }
    println!("Published vs computed colors");
    print!("{}", format_comparisons(&comparisons));
    let mismatches = comparisons.iter().filter(|c| !c.matches).count();
    println!("{mismatches} of {} published values not reproduced", comparisons.len());
    if let Some(s) = scores {
        println!();
        println!("Scores over {} session(s), cells are S1/S2 totals", s.sessions);
        for (scheme, table) in [(BaselineScheme::Group1, &s.group1), (BaselineScheme::Group2, &s.group2)] {
            println!();
            println!("{scheme} baseline");
            print!("{table}");
        }
    }
    Ok(())
}

fn cmd_serve(a: &ServeArgs) -> Result<()> {
    let log = a.data_dir.join("events.jsonl");
    let store = SessionStore::open(&log).with_context(|| format!("opening {}", log.display()))?;
    let mut state = AppState::new(Arc::new(store));
    state.ui_dir = a.ui_dir.clone();
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(&a.listen)
            .await
            .with_context(|| format!("binding {}", a.listen))?;
        log::info!("listening on http://{}", listener.local_addr()?);
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
            log::info!("shutting down");
        };
        afterimage_server::serve(listener, state, shutdown).await?;
        Ok(())
    })
}
