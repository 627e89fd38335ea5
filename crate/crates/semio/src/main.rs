use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use semio::cmd::{self, Failure, DEFAULT_CAP};

#[derive(Parser)]
#[command(
    name = "semio",
    version,
    about = "Workbench for fuzzy sign systems: algebras, omega-sets, diagrams, pools"
)]
struct Cli {
    /// Comparison tolerance (also SEMIO_EPSILON)
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Enumeration cap in tuples (also SEMIO_CAP)
    #[arg(long, global = true)]
    cap: Option<u64>,

    /// Write the data artifact here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate the workspace: sketch bindings, requirements, rules
    Check { file: PathBuf },
    /// Limit of a diagram as CSV (projected to its declared sources)
    Limit {
        file: PathBuf,
        #[arg(long)]
        diagram: String,
    },
    /// Colimit of a diagram as CSV (projected to its declared sources)
    Colimit {
        file: PathBuf,
        #[arg(long)]
        diagram: String,
    },
    /// Degree to which a diagram commutes over the given source vertices
    Commutes {
        file: PathBuf,
        #[arg(long)]
        diagram: String,
        /// Source vertex ids; defaults to the diagram's declared sources
        #[arg(long, value_delimiter = ',')]
        sources: Vec<String>,
    },
    /// Conditioned table for one vertex given observed elements elsewhere
    Classify {
        file: PathBuf,
        #[arg(long)]
        diagram: String,
        /// Vertex to classify
        #[arg(long)]
        vertex: String,
        /// Observations VERTEX=ELEMENT, comma separated
        #[arg(long, value_delimiter = ',')]
        obs: Vec<String>,
    },
    /// Conditional of a total component (extent ⇒ entry)
    Bayes {
        file: PathBuf,
        #[arg(long)]
        comp: String,
    },
    /// Best structural match of two tables and its quality
    Gamma {
        file: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// λ-consistency of a diagram against an interpretation
    Consistent {
        file: PathBuf,
        #[arg(long)]
        diagram: String,
        /// Interpretation table (comp or diagram name)
        #[arg(long)]
        against: String,
        #[arg(long)]
        lambda: String,
        /// Ask for one witness tuple instead of all
        #[arg(long)]
        exists: bool,
        /// Restrict the check to a domain table's full-truth tuples
        #[arg(long)]
        domain: Option<String>,
    },
    /// Pool concepts answering a diagram at threshold λ
    Answers {
        file: PathBuf,
        #[arg(long)]
        pool: String,
        #[arg(long)]
        diagram: String,
        #[arg(long)]
        lambda: String,
    },
    /// Does a premise set entail a diagram over a pool at λ
    Infer {
        file: PathBuf,
        #[arg(long)]
        pool: String,
        #[arg(long, value_delimiter = ',')]
        premises: Vec<String>,
        #[arg(long)]
        conclusion: String,
        #[arg(long)]
        lambda: String,
    },
    /// Evaluate a connective formula at a concept and threshold
    Rl {
        file: PathBuf,
        #[arg(long)]
        pool: String,
        /// Formula over diagram names: * & | -> [I] [C] and parentheses
        #[arg(long)]
        formula: String,
        /// Concept the formula is tested at (comp or diagram name)
        #[arg(long)]
        concept: String,
        #[arg(long)]
        lambda: String,
    },
    /// Merge several .sem files into one product-algebra file
    Integrate {
        files: Vec<PathBuf>,
        /// One label per file; defaults to the file stems
        #[arg(long, value_delimiter = ',')]
        names: Vec<String>,
    },
    /// Turn a CSV of rows into a dataset component and configuration
    EncodeDataset {
        file: PathBuf,
        #[arg(long)]
        csv: PathBuf,
        /// Name for the new component
        #[arg(long)]
        name: String,
        /// Sign per CSV column; defaults to the column headers
        #[arg(long, value_delimiter = ',')]
        signs: Vec<String>,
    },
}

fn env_f64(name: &str) -> Result<Option<f64>, Failure> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|_| Failure::new(2, format!("{} is not a number: '{}'", name, v))),
        Err(_) => Ok(None),
    }
}

fn env_u64(name: &str) -> Result<Option<u64>, Failure> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Failure::new(2, format!("{} is not a whole number: '{}'", name, v))),
        Err(_) => Ok(None),
    }
}

fn run(cli: &Cli) -> Result<i32, Failure> {
    let epsilon = match cli.epsilon {
        Some(e) => Some(e),
        None => env_f64("SEMIO_EPSILON")?,
    };
    let cap = match cli.cap {
        Some(c) => c,
        None => env_u64("SEMIO_CAP")?.unwrap_or(DEFAULT_CAP),
    };
    let outcome = match &cli.cmd {
        Cmd::Check { file } => cmd::run_check(&cmd::load(file, epsilon)?, cap)?,
        Cmd::Limit { file, diagram } => {
            cmd::run_limit(&cmd::load(file, epsilon)?, diagram, cap, false)?
        }
        Cmd::Colimit { file, diagram } => {
            cmd::run_limit(&cmd::load(file, epsilon)?, diagram, cap, true)?
        }
        Cmd::Commutes { file, diagram, sources } => {
            cmd::run_commutes(&cmd::load(file, epsilon)?, diagram, sources, cap)?
        }
        Cmd::Classify { file, diagram, vertex, obs } => {
            cmd::run_classify(&cmd::load(file, epsilon)?, diagram, vertex, obs, cap)?
        }
        Cmd::Bayes { file, comp } => cmd::run_bayes(&cmd::load(file, epsilon)?, comp)?,
        Cmd::Gamma { file, left, right } => {
            cmd::run_gamma(&cmd::load(file, epsilon)?, left, right, cap)?
        }
        Cmd::Consistent { file, diagram, against, lambda, exists, domain } => {
            cmd::run_consistent(
                &cmd::load(file, epsilon)?,
                diagram,
                against,
                lambda,
                *exists,
                domain.as_deref(),
                cap,
            )?
        }
        Cmd::Answers { file, pool, diagram, lambda } => {
            cmd::run_answers(&cmd::load(file, epsilon)?, pool, diagram, lambda, cap)?
        }
        Cmd::Infer { file, pool, premises, conclusion, lambda } => cmd::run_infer(
            &cmd::load(file, epsilon)?,
            pool,
            premises,
            conclusion,
            lambda,
            cap,
        )?,
        Cmd::Rl { file, pool, formula, concept, lambda } => cmd::run_rl(
            &cmd::load(file, epsilon)?,
            pool,
            formula,
            concept,
            lambda,
            cap,
        )?,
        Cmd::Integrate { files, names } => cmd::run_integrate(files, names, epsilon)?,
        Cmd::EncodeDataset { file, csv, name, signs } => {
            cmd::run_encode_dataset(&cmd::load(file, epsilon)?, csv, name, signs)?
        }
    };
    print!("{}", outcome.report);
    if let Some(data) = outcome.data {
        match &cli.out {
            Some(path) => std::fs::write(path, &data)
                .map_err(|e| Failure::new(2, format!("{}: {}", path.display(), e)))?,
            None => {
                use std::io::Write as _;
                std::io::stdout()
                    .write_all(&data)
                    .map_err(|e| Failure::new(2, e.to_string()))?;
            }
        }
    }
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code.clamp(0, 255) as u8),
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code.clamp(0, 255) as u8)
        }
    }
}
