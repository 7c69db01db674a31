//! The `starstar` command line.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 when the input data or
//! the requested operation on it is invalid.

use std::ffi::OsString;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use starstar_core::bench::{run_bench, BenchConfig, MAX_RATIO};
use starstar_core::filter::{apply_view_filter, edge_drill_filter, FilterSpec, ViewParams, DEFAULT_WEIGHT_THRESHOLD};
use starstar_core::graphs::{a2a_json, to_dot};
use starstar_core::ingest::{parse, write_jsonl, write_xoc, Format, ValidationReport};
use starstar_core::projection::{
    case_notion, project, write_csv, write_xes, ProjectionParams, ProjectionSummary, DEFAULT_OMEGA, DEFAULT_WINDOW,
};
use starstar_core::{DbEventLog, Metric, ModelSnapshot, ObjectClass};
use starstar_service::{AppState, ServiceConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "starstar", version, about = "Build, filter and project StarStar models of database event logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a log for duplicate ids, dangling references and other issues.
    Validate {
        #[command(flatten)]
        input: Input,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Build the model and write the A2A multigraph as JSON or DOT.
    Build {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        view: ViewArgs,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write Graphviz DOT instead of JSON.
        #[arg(long)]
        dot: bool,
        /// Metric used to label and scale DOT edges.
        #[arg(long, default_value = "count")]
        metric: Metric,
    },
    /// Apply a filter spec and write the resulting A2A multigraph.
    Filter {
        #[command(flatten)]
        input: Input,
        /// Filter spec as inline JSON or a path to a JSON file.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// For edge drill-downs, also write the reduced log (.xoc or .jsonl).
        #[arg(long)]
        log_out: Option<PathBuf>,
    },
    /// Project onto a classic event log for one object class.
    Project {
        #[command(flatten)]
        input: Input,
        /// Object class used as the perspective.
        #[arg(long)]
        class: String,
        /// Connection weight threshold in (0, 1].
        #[arg(long, default_value_t = DEFAULT_OMEGA, value_parser = parse_omega)]
        omega: f64,
        /// Number of refinement rounds.
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        /// Write the projected log as XES.
        #[arg(long)]
        xes: Option<PathBuf>,
        /// Write the projected log as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Time model construction over synthetic logs of doubling size.
    Bench {
        /// Event-object pair counts, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [10_000usize, 20_000, 40_000])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 9)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        batch: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        json: bool,
        /// Exit with status 2 when a ratio exceeds the linearity bound.
        #[arg(long)]
        check: bool,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Directory in which uploaded logs are kept across restarts.
        #[arg(long)]
        state_dir: Option<PathBuf>,
        /// Projection request timeout.
        #[arg(long, default_value_t = 60)]
        timeout_secs: u64,
        /// Browser origin allowed by CORS; any when omitted.
        #[arg(long)]
        cors_origin: Option<String>,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Log file in XOC (.xoc, .xml) or JSONL (.jsonl, .ndjson).
    path: PathBuf,
    /// Input format; overrides detection by extension.
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct ViewArgs {
    #[arg(long, default_value_t = 0)]
    min_activity_count: u64,
    #[arg(long, default_value_t = 0)]
    min_path_count: u64,
    #[arg(long, default_value_t = DEFAULT_WEIGHT_THRESHOLD, value_parser = parse_unit)]
    weight_threshold: f64,
}

fn parse_unit(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is not in [0, 1]"))
    }
}

fn parse_omega(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not in (0, 1]"))
    }
}

impl Input {
    fn format(&self) -> Result<Format> {
        match self.format {
            Some(f) => Ok(f),
            None => Format::from_path(&self.path)
                .ok_or_else(|| anyhow!("cannot tell the format of {}; pass --format", self.path.display())),
        }
    }

    fn load(&self) -> Result<(DbEventLog, ValidationReport)> {
        let format = self.format()?;
        let bytes = std::fs::read(&self.path).with_context(|| format!("reading {}", self.path.display()))?;
        let (log, report) = parse(&bytes, format).with_context(|| format!("loading {}", self.path.display()))?;
        for w in &report.warnings {
            log::warn!("{}: {}", self.path.display(), w);
        }
        Ok((log, report))
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => out.write_all(text.as_bytes()).context("writing output"),
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn read_spec(spec: &str) -> Result<FilterSpec> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).with_context(|| format!("reading filter spec {spec}"))?
    };
    serde_json::from_str(&text).context("parsing filter spec")
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Validate { input, json } => {
            let format = input.format()?;
            let bytes = std::fs::read(&input.path).with_context(|| format!("reading {}", input.path.display()))?;
            let raw = match format {
                Format::Xoc => starstar_core::ingest::parse_xoc_raw(&bytes),
                Format::Jsonl => starstar_core::ingest::parse_jsonl_raw(&bytes),
            }
            .with_context(|| format!("loading {}", input.path.display()))?;
            let report = starstar_core::ingest::validate(&raw);
            if json {
                emit(out, None, &with_newline(serde_json::to_string_pretty(&report)?))?;
            } else {
                for issue in report.errors.iter().chain(&report.warnings) {
                    writeln!(out, "{issue}")?;
                }
                writeln!(
                    out,
                    "{}: {} events, {} objects, {} errors, {} warnings",
                    input.path.display(),
                    raw.events.len(),
                    raw.objects.len(),
                    report.errors.len(),
                    report.warnings.len()
                )?;
            }
            if !report.is_ok() {
                bail!("{} is not a valid log", input.path.display());
            }
        }
        Command::Build {
            input,
            view,
            out: path,
            dot,
            metric,
        } => {
            let (log, _) = input.load()?;
            let snapshot = ModelSnapshot::build(log);
            log::info!("snapshot {}", snapshot.id());
            let params = ViewParams {
                min_activity_count: view.min_activity_count,
                min_path_count: view.min_path_count,
                weight_threshold: view.weight_threshold,
            };
            let graph = params.apply(snapshot.a2a());
            let text = if dot {
                to_dot(&graph, metric)
            } else {
                with_newline(a2a_json(&graph))
            };
            emit(out, path.as_deref(), &text)?;
        }
        Command::Filter {
            input,
            spec,
            out: path,
            log_out,
        } => {
            let spec = read_spec(&spec)?;
            let (log, _) = input.load()?;
            let snapshot = ModelSnapshot::build(log);
            let graph = match &spec {
                FilterSpec::EdgeDrill { edges } => {
                    let derived = edge_drill_filter(&snapshot, edges)?;
                    log::info!("snapshot {} -> {}", snapshot.id(), derived.id());
                    if let Some(p) = &log_out {
                        let text = match Format::from_path(p) {
                            Some(Format::Xoc) => write_xoc(derived.log()),
                            Some(Format::Jsonl) => write_jsonl(derived.log()),
                            None => bail!("cannot tell the format of {}; use .xoc or .jsonl", p.display()),
                        };
                        std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
                    }
                    derived.a2a().clone()
                }
                view => {
                    if log_out.is_some() {
                        bail!("--log-out only applies to edgeDrill filters");
                    }
                    apply_view_filter(&snapshot, view)?
                }
            };
            emit(out, path.as_deref(), &with_newline(a2a_json(&graph)))?;
        }
        Command::Project {
            input,
            class,
            omega,
            window,
            xes,
            csv,
        } => {
            let params = ProjectionParams::new(ObjectClass::new(class)?, omega, window)?;
            let (log, _) = input.load()?;
            let cases = case_notion(&log, &params)?;
            let clog = project(&log, cases)?;
            if let Some(p) = &xes {
                std::fs::write(p, write_xes(&clog)).with_context(|| format!("writing {}", p.display()))?;
            }
            if let Some(p) = &csv {
                std::fs::write(p, write_csv(&clog)).with_context(|| format!("writing {}", p.display()))?;
            }
            let summary = ProjectionSummary::of(&clog);
            emit(out, None, &with_newline(serde_json::to_string(&summary)?))?;
        }
        Command::Bench {
            sizes,
            samples,
            batch,
            seed,
            json,
            check,
        } => {
            let report = run_bench(&BenchConfig {
                sizes,
                samples,
                batch,
                seed,
            });
            if json {
                emit(out, None, &with_newline(serde_json::to_string_pretty(&report)?))?;
            } else {
                writeln!(out, "{:>10} {:>10} {:>10} {:>10} {:>12} {:>7}", "pairs", "events", "objects", "e2e", "median ms", "ratio")?;
                for (i, p) in report.points.iter().enumerate() {
                    let ratio = if i == 0 {
                        "-".to_string()
                    } else {
                        format!("{:.2}", report.ratios[i - 1])
                    };
                    writeln!(
                        out,
                        "{:>10} {:>10} {:>10} {:>10} {:>12.3} {:>7}",
                        p.eo_pairs, p.events, p.objects, p.e2e_edges, p.median_ms, ratio
                    )?;
                }
                writeln!(out, "total {:.2} s, max ratio {:.2} (bound {MAX_RATIO})", report.total_secs, report.max_ratio())?;
            }
            if check && !report.is_linear() {
                bail!("build time grew faster than the linearity bound");
            }
        }
        Command::Serve {
            addr,
            state_dir,
            timeout_secs,
            cors_origin,
        } => {
            let config = ServiceConfig {
                projection_timeout: Duration::from_secs(timeout_secs),
                state_dir,
                cors_origin,
                ..ServiceConfig::default()
            };
            let state = AppState::new(config).context("opening state directory")?;
            let runtime = tokio::runtime::Runtime::new().context("starting runtime")?;
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::bind(addr)
                    .await
                    .with_context(|| format!("binding {addr}"))?;
                eprintln!("starstar listening on http://{}", listener.local_addr()?);
                starstar_service::serve(listener, state, async {
                    let _ = tokio::signal::ctrl_c().await;
                })
                .await
                .context("serving")
            })?;
        }
    }
    Ok(())
}

/// Runs the command line with `argv` (program name first), writing data to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_DATA
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut io::stdout().lock(), &mut io::stderr().lock())
}
