use std::io::Read;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use partact_cli::manifest::{parse_gamma_file, parse_glue_manifest, parse_manifest, resolve};
use partact_cli::report::{envelope, pretty};
use partact_cli::{
    cmd_confluence, cmd_distance, cmd_glue, cmd_homogenize, cmd_topology, cmd_truncation,
    cmd_validate, CommandOutput, DistanceOpts, GammaSource, Outcome,
};

/// Analyze globalizations of confluent partial monoid actions described by
/// JSON manifests.
#[derive(Parser)]
#[command(name = "partact", version, about)]
struct Cli {
    /// Render the report as indented text instead of JSON
    #[arg(long, global = true)]
    pretty: bool,
    /// Include wall-clock timing in the report (breaks byte-identical output)
    #[arg(long, global = true)]
    timing: bool,
    /// Worker threads for distance matrices
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Accept presentations without a termination certificate, giving up
    /// after this many reduction steps
    #[arg(long, global = true)]
    force_max_steps: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the presentation certificate and the structures on the space
    Validate { manifest: String },
    /// Word-level and action-level confluence, with counterexamples
    Confluence {
        manifest: String,
        /// Also report violations of the orbit-covering triple condition over
        /// normal words up to this length
        #[arg(long)]
        triples: Option<usize>,
    },
    /// Globalized distance between two elements written as word@point
    Distance {
        manifest: String,
        el1: String,
        el2: String,
        /// Cross-check against the bounded-segment oracle
        #[arg(long)]
        oracle: bool,
        /// Segment bound for the oracle (default: lg(el1)+lg(el2)+2)
        #[arg(long)]
        max_segments: Option<usize>,
        /// Cross-check against the group-action distance formula
        #[arg(long)]
        group_formula: bool,
        /// Extract a distance-realizing path with its form tag
        #[arg(long)]
        geodesic: bool,
        /// Replace infinite distances by this value in the report
        #[arg(long)]
        cap_infinite_at: Option<f64>,
    },
    /// Enumerate the globalization up to a word-length bound
    Truncation {
        manifest: String,
        n: usize,
        /// Include the pairwise distance matrix
        #[arg(long)]
        with_metric: bool,
        /// Replace infinite distances by this value in the report
        #[arg(long)]
        cap_infinite_at: Option<f64>,
    },
    /// Final-topology checks for a finite monoid action
    Topology {
        manifest: String,
        /// Check that the base space embeds topologically
        #[arg(long)]
        embedding: bool,
        /// Check the two T1 criteria
        #[arg(long)]
        t1: bool,
        /// Report closed/open status of every translation
        #[arg(long)]
        maps: bool,
    },
    /// Glue two metric spaces along an isometric identification
    Glue {
        manifest: String,
        /// Replace infinite distances by this value in the report
        #[arg(long)]
        cap_infinite_at: Option<f64>,
    },
    /// One homogenization step: close partial isometries into a groupoid and
    /// globalize
    Homogenize {
        manifest: String,
        n: usize,
        /// `singletons` or a path to a JSON list of partial isometries
        #[arg(long, default_value = "singletons")]
        gamma: String,
    },
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn load(path: &str, force: Option<u64>) -> Result<partact_cli::manifest::Loaded, String> {
    let text = read_input(path)?;
    let doc = parse_manifest(&text)?;
    resolve(&doc, force)
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();

    // a violated step budget surfaces as a panic deep in the reduction
    // engine; report it as a precondition failure
    let dispatched =
        std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(&cli)));
    let (name, inputs, out) = dispatched.unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| panic.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "computation aborted".into());
        (
            "aborted",
            serde_json::json!({}),
            CommandOutput {
                payload: serde_json::json!({ "error": msg }),
                outcome: Outcome::Precondition,
            },
        )
    });

    let timing = cli
        .timing
        .then(|| (started.elapsed().as_secs_f64() * 1000.0 * 1000.0).round() / 1000.0);
    let report = envelope(name, inputs, out.outcome.status(), out.payload, timing);
    if cli.pretty {
        print!("{}", pretty(&report));
    } else {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serialize")
        );
    }
    std::process::exit(out.outcome.code());
}

fn dispatch(cli: &Cli) -> (&'static str, serde_json::Value, CommandOutput) {
    let forced = cli.force_max_steps.is_some();
    match &cli.command {
        Command::Validate { manifest } => {
            let inputs = json!({ "manifest": manifest });
            let out = match load(manifest, cli.force_max_steps) {
                Ok(l) => cmd_validate(&l),
                Err(e) => input_error(e),
            };
            ("validate", inputs, out)
        }
        Command::Confluence { manifest, triples } => {
            let inputs = json!({ "manifest": manifest, "triples": triples });
            let out = match load(manifest, cli.force_max_steps) {
                Ok(l) => cmd_confluence(&l, forced, *triples),
                Err(e) => input_error(e),
            };
            ("confluence", inputs, out)
        }
        Command::Distance {
            manifest,
            el1,
            el2,
            oracle,
            max_segments,
            group_formula,
            geodesic,
            cap_infinite_at,
        } => {
            let inputs = json!({
                "manifest": manifest, "el1": el1, "el2": el2,
                "oracle": oracle, "max_segments": max_segments,
                "group_formula": group_formula, "geodesic": geodesic,
                "cap_infinite_at": cap_infinite_at,
            });
            let opts = DistanceOpts {
                oracle: *oracle,
                max_segments: *max_segments,
                group_formula: *group_formula,
                geodesic: *geodesic,
                cap_infinite_at: *cap_infinite_at,
            };
            let out = match load(manifest, cli.force_max_steps) {
                Ok(l) => cmd_distance(&l, forced, el1, el2, &opts),
                Err(e) => input_error(e),
            };
            ("distance", inputs, out)
        }
        Command::Truncation {
            manifest,
            n,
            with_metric,
            cap_infinite_at,
        } => {
            let inputs = json!({
                "manifest": manifest, "n": n,
                "with_metric": with_metric, "cap_infinite_at": cap_infinite_at,
            });
            let out = match load(manifest, cli.force_max_steps) {
                Ok(l) => {
                    cmd_truncation(&l, forced, *n, *with_metric, cli.threads, *cap_infinite_at)
                }
                Err(e) => input_error(e),
            };
            ("truncation", inputs, out)
        }
        Command::Topology {
            manifest,
            embedding,
            t1,
            maps,
        } => {
            let inputs =
                json!({ "manifest": manifest, "embedding": embedding, "t1": t1, "maps": maps });
            let out = match load(manifest, cli.force_max_steps) {
                Ok(l) => cmd_topology(&l, *embedding, *t1, *maps),
                Err(e) => input_error(e),
            };
            ("topology", inputs, out)
        }
        Command::Glue {
            manifest,
            cap_infinite_at,
        } => {
            let inputs = json!({ "manifest": manifest, "cap_infinite_at": cap_infinite_at });
            let out = match read_input(manifest).and_then(|t| parse_glue_manifest(&t)) {
                Ok(doc) => cmd_glue(&doc, *cap_infinite_at),
                Err(e) => input_error(e),
            };
            ("glue", inputs, out)
        }
        Command::Homogenize { manifest, n, gamma } => {
            let inputs = json!({ "manifest": manifest, "n": n, "gamma": gamma });
            let out = (|| {
                let text = read_input(manifest)?;
                let doc = parse_manifest(&text)?;
                let source = if gamma == "singletons" {
                    GammaSource::Singletons
                } else {
                    GammaSource::File(parse_gamma_file(&read_input(gamma)?)?)
                };
                Ok::<CommandOutput, String>(cmd_homogenize(&doc, *n, &source))
            })()
            .unwrap_or_else(input_error);
            ("homogenize", inputs, out)
        }
    }
}

fn input_error(msg: String) -> CommandOutput {
    CommandOutput {
        payload: json!({ "error": msg }),
        outcome: Outcome::InputError,
    }
}
