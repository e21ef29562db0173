//! `netclust`: cluster, audit and compare dissimilarity networks from the
//! command line.
//!
//! Exit codes: 0 success or property holds, 1 property violated, 2 usage
//! error, 3 data error, 4 resource cap exceeded. Errors are reported on one
//! stderr line as `error[CODE]: message`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netclust::io::{ingest, to_matrix_csv, IngestionSpec, InputFormat, ZeroPolicy};
use netclust::metric::{
    network_distance_exact_with_cap, network_distance_upper, DEFAULT_EXACT_CAP,
};
use netclust::network::format_sig;
use netclust::properties::{run_audit, AuditOptions};
use netclust::{Error, MethodSpec, Network, Property};

#[derive(Parser, Debug)]
#[command(
    name = "netclust",
    version,
    about = "Hierarchical clustering of directed networks"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Input network file.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Matrix)]
    format: Format,
    /// Field delimiter for all input files.
    #[arg(long, global = true, default_value_t = ',')]
    delimiter: char,
    /// Similarity tables: invert raw similarities instead of column shares.
    #[arg(long, global = true)]
    no_normalize: bool,
    /// Similarity tables: how to treat zero entries.
    #[arg(long, global = true, value_enum, default_value_t = Zero::Sentinel)]
    zero_policy: Zero,
    /// Write the main artifact here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    out_format: OutFormat,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest network accepted by exact distance searches.
    #[arg(long, global = true, default_value_t = DEFAULT_EXACT_CAP)]
    cap: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cluster the input network and export the dendrogram.
    Cluster {
        /// reciprocal | nonreciprocal | semi:<t> | graft:<beta> | representable:<file>
        #[arg(long)]
        method: String,
        /// Also write the output ultrametric as a matrix CSV.
        #[arg(long)]
        ultra_csv: Option<PathBuf>,
    },
    /// Audit a method for one property on the input network.
    Audit {
        /// excisive | scale | idempotent | value | transform | sandwich | stability
        property: String,
        #[arg(long)]
        method: String,
        /// Random probes for value, transform and stability.
        #[arg(long, default_value_t = 25)]
        probes: usize,
    },
    /// Network distance between two networks.
    Distance {
        first: PathBuf,
        second: PathBuf,
        /// Exact branch-and-bound search (the default).
        #[arg(long, conflicts_with = "upper")]
        exact: bool,
        /// Randomized upper bound.
        #[arg(long)]
        upper: bool,
        #[arg(long, default_value_t = 50, requires = "upper")]
        trials: usize,
    },
    /// Parse the input and print a summary.
    IngestCheck,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Matrix,
    Edges,
    Similarity,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Zero {
    Sentinel,
    Error,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum OutFormat {
    Json,
    Newick,
    UltraCsv,
}

/// A failure with its exit status.
struct Failure {
    status: u8,
    code: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            _ if e.is_resource_cap() => 4,
            Error::InvalidMethod(_)
            | Error::UnknownProperty(_)
            | Error::InvalidArgument(_)
            | Error::InvalidHopBound(_) => 2,
            _ => 3,
        };
        Failure {
            status,
            code: e.code(),
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        status: 2,
        code: "USAGE",
        message: message.into(),
    }
}

impl Global {
    fn load(&self, path: &Path) -> Result<Network, Failure> {
        let mut spec = IngestionSpec::new(
            path,
            match self.format {
                Format::Matrix => InputFormat::Matrix,
                Format::Edges => InputFormat::Edges,
                Format::Similarity => InputFormat::Similarity,
            },
        );
        spec.delimiter = self.delimiter;
        spec.normalize = !self.no_normalize;
        spec.zero_policy = match self.zero_policy {
            Zero::Sentinel => ZeroPolicy::Sentinel,
            Zero::Error => ZeroPolicy::Error,
        };
        Ok(ingest(&spec)?)
    }

    fn input(&self) -> Result<Network, Failure> {
        let path = self
            .input
            .as_deref()
            .ok_or_else(|| usage("--input is required"))?;
        self.load(path)
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.output {
            Some(path) => write(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())).into())
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let g = &cli.global;
    match cli.command {
        Command::Cluster { method, ultra_csv } => {
            let method = MethodSpec::parse(&method)?;
            let net = g.input()?;
            let u = method.run(&net)?;
            let text = match g.out_format {
                OutFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&u.to_dendrogram())
                        .expect("dendrogram serializes");
                    s.push('\n');
                    s
                }
                OutFormat::Newick => format!("{}\n", u.to_dendrogram().to_newick()),
                OutFormat::UltraCsv => to_matrix_csv(&u),
            };
            g.emit(&text)?;
            if let Some(path) = ultra_csv {
                write(&path, &to_matrix_csv(&u))?;
            }
            Ok(0)
        }
        Command::Audit {
            property,
            method,
            probes,
        } => {
            let property: Property = property.parse()?;
            let method = MethodSpec::parse(&method)?;
            let net = g.input()?;
            let opts = AuditOptions {
                seed: g.seed,
                probes,
                cap: g.cap,
                ..AuditOptions::default()
            };
            let report = run_audit(property, &method, &net, &opts)?;
            g.emit(&format!("{}\n", report.to_json()))?;
            Ok(if report.is_holds() { 0 } else { 1 })
        }
        Command::Distance {
            first,
            second,
            upper,
            trials,
            ..
        } => {
            let x = g.load(&first)?;
            let y = g.load(&second)?;
            let line = if upper {
                let d = network_distance_upper(&x, &y, trials, g.seed)?;
                format!(
                    "{} upper bound ({trials} trials, seed {})\n",
                    format_sig(d),
                    g.seed
                )
            } else {
                let d = network_distance_exact_with_cap(&x, &y, g.cap)?;
                format!("{} exact\n", format_sig(d))
            };
            g.emit(&line)?;
            Ok(0)
        }
        Command::IngestCheck => {
            let net = g.input()?;
            if g.output.is_some() {
                g.emit(&to_matrix_csv(&net))?;
            }
            let n = net.size();
            let off: Vec<f64> = (0..n * n)
                .filter(|k| k / n != k % n)
                .map(|k| net.values()[k])
                .collect();
            let min = off.iter().copied().fold(f64::INFINITY, f64::min);
            println!("nodes: {n}");
            println!("labels: {}", net.labels().join(", "));
            println!("symmetric: {}", net.is_symmetric());
            if n > 1 {
                println!("min dissimilarity: {}", format_sig(min));
                println!("max dissimilarity: {}", format_sig(net.max_value()));
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let rendered = e.to_string();
            let head = rendered.split("\n\n").next().unwrap_or("invalid usage");
            eprintln!(
                "error[USAGE]: {}",
                one_line(head.trim_start_matches("error: "))
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status),
        Err(f) => {
            eprintln!("error[{}]: {}", f.code, one_line(&f.message));
            ExitCode::from(f.status)
        }
    }
}
