use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::net::UdpSocket;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cyclone::baselines::Codec;
use cyclone::net::{self, RecvOptions, SendOptions};
use cyclone::rng::{mix, SymbolRng};
use cyclone::simlab::{self, ExperimentGrid, PresetOptions};
use cyclone::stream::{read_record, FileDecoder, FileEncoder, StreamHeader};
use cyclone::{DistributionKind, Error};

const EXIT_INCOMPLETE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_CORRUPT: u8 = 4;

#[derive(Parser)]
#[command(name = "cyclone", version, about = "Cyclone rateless erasure codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a file into a symbol stream file.
    Encode {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
        /// Number of code symbols to write.
        #[arg(long, conflicts_with = "overhead")]
        m: Option<u64>,
        /// Extra symbols as a fraction of n.
        #[arg(long, default_value_t = 0.5)]
        overhead: f64,
    },
    /// Decode a symbol stream file.
    Decode {
        input: PathBuf,
        output: PathBuf,
        /// Discard each record with this probability before decoding.
        #[arg(long, default_value_t = 0.0)]
        drop: f64,
        #[arg(long, default_value_t = 0)]
        drop_seed: u64,
    },
    /// Run simulations and write CSV files.
    Simulate(SimulateArgs),
    /// Send a file over UDP.
    Send {
        input: PathBuf,
        /// Receiver address.
        #[arg(long)]
        to: String,
        #[arg(long, default_value = "0.0.0.0:0")]
        bind: String,
        #[command(flatten)]
        code: CodeArgs,
        /// Synthetic loss applied before sending.
        #[arg(long, default_value_t = 0.0)]
        drop: f64,
        #[arg(long, default_value_t = 0)]
        drop_seed: u64,
        /// Delay between symbol datagrams, in microseconds.
        #[arg(long, default_value_t = 20)]
        pace_us: u64,
    },
    /// Receive a file over UDP.
    Recv {
        output: PathBuf,
        #[arg(long)]
        listen: String,
        /// Seconds without traffic before giving up.
        #[arg(long, default_value_t = 10)]
        timeout: u64,
    },
}

#[derive(Args)]
struct CodeArgs {
    /// Symbol width in bits; a multiple of 8.
    #[arg(long, default_value_t = 256)]
    w: u32,
    #[arg(long, value_enum, default_value_t = Dist::Robust)]
    dist: Dist,
    #[arg(long, default_value_t = 0.01)]
    c: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl CodeArgs {
    fn kind(&self) -> DistributionKind {
        match self.dist {
            Dist::Ideal => DistributionKind::Ideal,
            Dist::Robust => DistributionKind::Robust { c: self.c, delta: self.delta },
            Dist::Pair => DistributionKind::FixedPair,
            Dist::One => DistributionKind::FixedOne,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    Ideal,
    Robust,
    Pair,
    One,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct SimulateArgs {
    #[command(subcommand)]
    kind: Option<Simulation>,
    /// Write every figure grid: coverage, overhead and histograms.
    #[arg(long, alias = "paper-figures")]
    figures: bool,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Largest overhead sweep size as a power of two.
    #[arg(long, default_value_t = 13)]
    max_log_n: u32,
    /// Coverage and histogram sizes.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = simlab::DEFAULT_W)]
    w: u32,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Simulation {
    /// Mean and 90% decoded counts after each symbol.
    Coverage {
        #[arg(long, value_delimiter = ',', default_value = "cyclone-robust")]
        codecs: Vec<String>,
        #[arg(long)]
        n: usize,
        /// Last symbol count; defaults to 3n.
        #[arg(long)]
        m_max: Option<u64>,
        #[command(flatten)]
        common: GridArgs,
    },
    /// Overhead statistics over a grid of sizes.
    Overhead {
        #[arg(long, value_delimiter = ',', default_value = "cyclone-robust,lt-robust")]
        codecs: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        cutoff: Option<u64>,
        #[command(flatten)]
        common: GridArgs,
    },
    /// Histograms of the symbols needed to decode.
    Histogram {
        #[arg(long, value_delimiter = ',', default_value = "cyclone-robust,lt-robust")]
        codecs: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        cutoff: Option<u64>,
        #[command(flatten)]
        common: GridArgs,
    },
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = simlab::DEFAULT_W)]
    w: u32,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

enum Failure {
    Incomplete(String),
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let (code, msg) = match failure {
                Failure::Incomplete(m) => (EXIT_INCOMPLETE, m),
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Lib(e) => {
                    let code = match e {
                        Error::Io(_) => EXIT_IO,
                        Error::Corruption(_) | Error::Format(_) => EXIT_CORRUPT,
                        _ => EXIT_USAGE,
                    };
                    (code, e.to_string())
                }
            };
            eprintln!("cyclone: {msg}");
            ExitCode::from(code)
        }
    }
}

fn parse_codecs(ids: &[String]) -> Result<Vec<Codec>, Failure> {
    ids.iter().map(|s| s.parse().map_err(|e: Error| Failure::Usage(e.to_string()))).collect()
}

fn check_width(w: u32) -> Result<(), Failure> {
    if w % 8 != 0 || w == 0 {
        return Err(Failure::Usage(format!("--w {w} must be a positive multiple of 8")));
    }
    cyclone::split(w).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(())
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Encode { input, output, code, m, overhead } => {
            check_width(code.w)?;
            let bytes = fs::read(&input)?;
            let enc = FileEncoder::new(&bytes, code.w, code.kind(), code.seed)?;
            let n = enc.n() as u64;
            let m = m.unwrap_or_else(|| (n as f64 * (1.0 + overhead)).ceil() as u64);
            let mut out = BufWriter::new(fs::File::create(&output)?);
            enc.write_stream(&mut out, m)?;
            out.flush()?;
            eprintln!("encoded {} bytes into {n} data symbols, wrote {m} code symbols", bytes.len());
            Ok(())
        }
        Command::Decode { input, output, drop, drop_seed } => {
            let mut reader = BufReader::new(fs::File::open(&input)?);
            let header = StreamHeader::read_from(&mut reader)?;
            let mut dec = FileDecoder::new(header.clone())?;
            let mut drops = SymbolRng::from_state(mix(drop_seed));
            let (mut read, mut used) = (0u64, 0u64);
            loop {
                let record = match read_record(&mut reader, &header) {
                    Ok(r) => r,
                    Err(Error::Format(msg)) => {
                        eprintln!("cyclone: warning: {msg}; ignoring it");
                        None
                    }
                    Err(e) => return Err(e.into()),
                };
                let Some((ell, y)) = record else { break };
                read += 1;
                if drops.chance(drop) {
                    continue;
                }
                used += 1;
                dec.receive(ell, &y)?;
            }
            let Some(bytes) = dec.bytes() else {
                return Err(Failure::Incomplete(format!(
                    "decoded {} of {} data symbols from {used} of {read} records",
                    dec.decoded_count(),
                    header.n
                )));
            };
            fs::write(&output, &bytes)?;
            eprintln!("decoded {} bytes from {used} of {read} records", bytes.len());
            Ok(())
        }
        Command::Simulate(args) => simulate(args),
        Command::Send { input, to, bind, code, drop, drop_seed, pace_us } => {
            check_width(code.w)?;
            if code.w > net::MAX_W {
                return Err(Failure::Usage(format!("--w must not exceed {}", net::MAX_W)));
            }
            let bytes = fs::read(&input)?;
            let enc = FileEncoder::new(&bytes, code.w, code.kind(), code.seed)?;
            let sock = UdpSocket::bind(&bind)?;
            let opts = SendOptions {
                drop_rate: drop,
                drop_seed,
                pace: Duration::from_micros(pace_us),
                ..SendOptions::default()
            };
            let report = net::serve_send(&sock, to.as_str(), &enc, &opts)?;
            eprintln!(
                "n={} generated={} dropped={} sent={} in {:.2?}",
                report.n, report.generated, report.dropped, report.sent, report.elapsed
            );
            if !report.completed {
                return Err(Failure::Incomplete("receiver did not confirm completion".into()));
            }
            Ok(())
        }
        Command::Recv { output, listen, timeout } => {
            let sock = UdpSocket::bind(&listen)?;
            let opts = RecvOptions {
                idle_timeout: Duration::from_secs(timeout),
                ..RecvOptions::default()
            };
            let report = net::serve_recv(&sock, &opts)?;
            fs::write(&output, &report.bytes)?;
            eprintln!(
                "received {} bytes (n={}) from {} symbols in {:.2?}",
                report.bytes.len(),
                report.n,
                report.received,
                report.elapsed
            );
            Ok(())
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    if args.figures {
        let opts = PresetOptions {
            trials: args.trials,
            base_seed: args.seed,
            w: args.w,
            max_log_n: args.max_log_n,
            sizes: args.sizes,
            ..PresetOptions::default()
        };
        let files = simlab::figure_grids(&args.out, &opts)?;
        eprintln!("wrote {} files to {}", files.len(), args.out.display());
        return Ok(());
    }
    let Some(kind) = args.kind else {
        return Err(Failure::Usage("choose coverage, overhead, histogram or --figures".into()));
    };
    match kind {
        Simulation::Coverage { codecs, n, m_max, common } => {
            for codec in parse_codecs(&codecs)? {
                let m_max = m_max.unwrap_or(3 * n as u64);
                let points = simlab::coverage_curve(&codec, n, common.w, m_max, common.trials, common.seed)?;
                let path = simlab::coverage_file(&common.out, &codec.id(), n);
                simlab::write_coverage_csv(&path, &points)?;
                eprintln!("wrote {}", path.display());
            }
        }
        Simulation::Overhead { codecs, n, cutoff, common } => {
            let grid = grid(parse_codecs(&codecs)?, n, cutoff, &common)?;
            let rows = simlab::overhead_experiment(&grid)?;
            let path = common.out.join("overhead.csv");
            simlab::write_overhead_csv(&path, &rows)?;
            eprintln!("wrote {}", path.display());
        }
        Simulation::Histogram { codecs, n, cutoff, common } => {
            let grid = grid(parse_codecs(&codecs)?, n, cutoff, &common)?;
            for h in simlab::histogram_experiment(&grid)? {
                let path = simlab::hist_file(&common.out, &h.codec, h.n);
                simlab::write_hist_csv(&path, &h)?;
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn grid(codecs: Vec<Codec>, ns: Vec<usize>, cutoff: Option<u64>, common: &GridArgs) -> Result<ExperimentGrid, Failure> {
    if ns.is_empty() {
        return Err(Failure::Usage("--n needs at least one size".into()));
    }
    let mut grid = ExperimentGrid::new(codecs, ns, common.trials);
    grid.cutoff = cutoff;
    grid.w = common.w;
    grid.base_seed = common.seed;
    Ok(grid)
}
