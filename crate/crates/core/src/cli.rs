//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a negative domain result (invalid models, no
//! surviving trace, invalid product), 2 usage, I/O or parse errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::behavior::{project, validate_triple, FeaturedTransitionSystem, ModelError, UsageModel};
use crate::derivation::{generate_tests, prune_usage_model, DerivationError, GenerationParams};
use crate::family::{build_fts_prime, prioritize, Order};
use crate::feature_model::{FeatureDiagram, Product};
use crate::report::{round_significant, to_pretty};
use crate::selection::{dfs_select_with, trace_json, SelectOptions, Selection, SelectionParams};

#[derive(Debug, Parser)]
#[command(name = "splprio", version, about = "Usage-model driven test prioritization for product lines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a feature diagram, FTS and usage model form a consistent triple.
    Validate(ModelArgs),
    /// Extract probability-bounded i-to-i traces from the usage model.
    Traces {
        #[command(flatten)]
        models: ModelArgs,
        #[command(flatten)]
        selection: SelectionArgs,
    },
    /// Extract traces, filter them through the FTS and emit the pruned FTS.
    FtsPrime {
        #[command(flatten)]
        models: ModelArgs,
        #[command(flatten)]
        selection: SelectionArgs,
    },
    /// Run the whole family-based pipeline and write the prioritized report.
    Prioritize {
        #[command(flatten)]
        models: ModelArgs,
        #[command(flatten)]
        selection: SelectionArgs,
        #[arg(long, default_value = "DESC")]
        order: Order,
        /// Also write the pruned FTS to this file.
        #[arg(long)]
        emit_fts_prime: Option<PathBuf>,
    },
    /// Project onto one product, prune the usage model and generate random-walk tests.
    ProductTests {
        #[command(flatten)]
        models: ModelArgs,
        /// Comma-separated feature list, e.g. `v,b,cur,t,c,eur,f`.
        #[arg(long)]
        product: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 50)]
        max_len: usize,
        /// Keep walks truncated at --max-len.
        #[arg(long)]
        include_partial: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Directory holding fd.json, fts.json and um.json; explicit paths override it.
    #[arg(long)]
    pub models: Option<PathBuf>,
    #[arg(long)]
    pub fd: Option<PathBuf>,
    #[arg(long)]
    pub fts: Option<PathBuf>,
    #[arg(long)]
    pub um: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SelectionArgs {
    #[arg(long)]
    pub lmax: usize,
    #[arg(long, default_value_t = 0.0)]
    pub pmin: f64,
    #[arg(long, default_value_t = 1.0)]
    pub pmax: f64,
    /// Record rejected traces and search counters in the output.
    #[arg(long)]
    pub audit: bool,
}

#[derive(Debug)]
enum Failure {
    /// Exit 2.
    Usage(String),
    /// Exit 1, with an optional JSON document for standard output.
    Domain(String, Option<serde_json::Value>),
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Models {
    diagram: FeatureDiagram,
    fts: FeaturedTransitionSystem,
    usage: UsageModel,
}

impl ModelArgs {
    fn path(&self, explicit: &Option<PathBuf>, file: &str, flag: &str) -> Result<PathBuf, Failure> {
        explicit
            .clone()
            .or_else(|| self.models.as_ref().map(|d| d.join(file)))
            .ok_or_else(|| Failure::Usage(format!("missing --{flag} (or --models)")))
    }

    fn load(&self) -> Result<Models, Failure> {
        let diagram = FeatureDiagram::from_json(&read(&self.path(&self.fd, "fd.json", "fd")?)?)
            .map_err(|e| Failure::Usage(format!("feature diagram: {e}")))?;
        let fts = FeaturedTransitionSystem::from_json(&read(&self.path(&self.fts, "fts.json", "fts")?)?, diagram.clone())
            .map_err(|e| Failure::Usage(format!("FTS: {e}")))?;
        let usage = UsageModel::from_json(&read(&self.path(&self.um, "um.json", "um")?)?)
            .map_err(|e| Failure::Usage(format!("usage model: {e}")))?;
        Ok(Models { diagram, fts, usage })
    }

    /// Loads the triple and refuses to go on unless it validates.
    fn load_valid(&self) -> Result<Models, Failure> {
        let m = self.load()?;
        let report = validate_triple(&m.diagram, &m.fts, &m.usage);
        if !report.valid {
            let doc = serde_json::to_value(&report).expect("report serializes");
            return Err(Failure::Domain("models do not form a valid triple".into(), Some(doc)));
        }
        Ok(m)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

impl SelectionArgs {
    fn params(&self) -> Result<SelectionParams, Failure> {
        SelectionParams::new(self.lmax, self.pmin, self.pmax).map_err(|e| Failure::Usage(e.to_string()))
    }

    fn select(&self, um: &UsageModel, params: &SelectionParams) -> Selection {
        dfs_select_with(um, params, SelectOptions { prune: true, audit: self.audit })
            .expect("parameters were validated")
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return e.exit_code();
        }
    };
    match execute(&cli.command, stdout) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Domain(msg, doc)) => {
            if let Some(doc) = doc {
                let _ = stdout.write_all(to_pretty(&doc).as_bytes());
            }
            let _ = writeln!(stderr, "{msg}");
            1
        }
    }
}

fn emit(out: &Option<PathBuf>, doc: &serde_json::Value, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = to_pretty(doc);
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn execute(command: &Command, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Validate(models) => {
            let m = models.load()?;
            let report = validate_triple(&m.diagram, &m.fts, &m.usage);
            emit(&models.out, &serde_json::to_value(&report).expect("report serializes"), stdout)?;
            Ok(if report.valid { 0 } else { 1 })
        }
        Command::Traces { models, selection } => {
            let params = selection.params()?;
            let m = models.load_valid()?;
            let sel = selection.select(&m.usage, &params);
            let mut doc = json!({ "traces": sel.traces.to_json() });
            if let Some(audit) = &sel.audit {
                doc["audit"] = audit.to_json();
            }
            emit(&models.out, &doc, stdout)?;
            Ok(0)
        }
        Command::FtsPrime { models, selection } => {
            let params = selection.params()?;
            let m = models.load_valid()?;
            let sel = selection.select(&m.usage, &params);
            let (prime, kept) = build_fts_prime(&m.fts, &sel.traces);
            let mut doc = json!({ "ftsPrime": prime.to_json(), "traces": kept.to_json() });
            if selection.audit {
                doc["audit"] = audit_json(&sel, &kept);
            }
            emit(&models.out, &doc, stdout)?;
            Ok(0)
        }
        Command::Prioritize { models, selection, order, emit_fts_prime } => {
            let params = selection.params()?;
            let m = models.load_valid()?;
            let sel = selection.select(&m.usage, &params);
            let (prime, kept) = build_fts_prime(&m.fts, &sel.traces);
            if let Some(path) = emit_fts_prime {
                fs::write(path, to_pretty(&prime.to_json()))
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
            let report = prioritize(&prime, &kept, *order).expect("surviving traces are accepted and carry probabilities");
            let mut doc = report.to_json();
            if selection.audit {
                doc["audit"] = audit_json(&sel, &kept);
            }
            if report.entries.is_empty() {
                return Err(Failure::Domain("no trace survives selection and filtering".into(), Some(doc)));
            }
            emit(&models.out, &doc, stdout)?;
            Ok(0)
        }
        Command::ProductTests { models, product, seed, count, max_len, include_partial } => {
            let params = GenerationParams { count: *count, max_len: *max_len, include_partial: *include_partial };
            if params.count == 0 || params.max_len == 0 {
                return Err(Failure::Usage("--count and --max-len must be positive".into()));
            }
            let m = models.load_valid()?;
            let product = Product::from_list(product);
            let ts = match project(&m.fts, &product) {
                Ok(ts) => ts,
                Err(e @ ModelError::InvalidProduct(_)) => {
                    return Err(Failure::Domain(format!("INVALID_PRODUCT: {e}"), None))
                }
                Err(e) => return Err(e.into()),
            };
            let pruned = prune_usage_model(&m.usage, &ts).map_err(|e| match e {
                DerivationError::InitialDead => Failure::Domain(format!("INITIAL_DEAD: {e}"), None),
                other => Failure::Usage(other.to_string()),
            })?;
            let suite = generate_tests(&pruned, params, *seed).map_err(|e| Failure::Usage(e.to_string()))?;
            emit(&models.out, &suite.to_json(), stdout)?;
            Ok(0)
        }
    }
}

/// Interval rejections from the search followed by traces no product accepts.
fn audit_json(sel: &Selection, kept: &crate::selection::TraceSet) -> serde_json::Value {
    let audit = sel.audit.clone().unwrap_or_default();
    let mut doc = audit.to_json();
    let rejected = doc["rejected"].as_array_mut().expect("rejected is an array");
    for t in &sel.traces {
        if kept.get(&t.actions.iter().map(String::as_str).collect::<Vec<_>>()).is_none() {
            let mut j = trace_json(t);
            j["reason"] = "accept".into();
            if let Some(p) = t.probability {
                j["probability"] = json!(round_significant(p));
            }
            rejected.push(j);
        }
    }
    doc
}
