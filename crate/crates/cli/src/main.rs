mod commands;
mod inputs;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "castle-polar", version, about = "Polar-code kernels from evaluation codes on pointed curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Kernel source: a single curve, or a Kronecker product of curve kernels.
#[derive(Args, Clone, Debug)]
pub struct KernelArgs {
    /// rational, hermitian or custom:<path to curve JSON>
    #[arg(long)]
    pub curve: Option<String>,
    /// Field as p=<p>,r=<r> (optional for custom curves)
    #[arg(long)]
    pub field: Option<String>,
    /// Comma-separated curve kernels to multiply, e.g. hermitian,rational
    #[arg(long, conflicts_with = "curve")]
    pub kron: Option<String>,
}

#[derive(Args, Clone, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

/// A set of multi-indices, from a set JSON file or a list of monomials.
#[derive(Args, Clone, Debug)]
pub struct SetArgs {
    /// Set JSON file: {"n":…, "l":…, "members":[[k_n,…,k_1],…]}
    #[arg(long, conflicts_with = "members")]
    pub set: Option<PathBuf>,
    /// Comma-separated monomials such as "y₁x₂,x_2,1"
    #[arg(long)]
    pub members: Option<String>,
    /// Number of variables when using --members
    #[arg(long, default_value_t = 1)]
    pub n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the kernel matrix with row labels
    Kernel {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Partial distances and exponent of a kernel
    Exponent {
        #[command(flatten)]
        kernel: KernelArgs,
        /// Enumerate the partial distances of a Kronecker product directly
        #[arg(long)]
        brute: bool,
        /// Search budget for each partial distance
        #[arg(long)]
        budget: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Upper-triangular standard form and the polarization criterion
    StandardForm {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Shorten a curve kernel at named points, or list the shortening sequence
    Shorten {
        #[command(flatten)]
        kernel: KernelArgs,
        /// Comma-separated point names, e.g. 00,01
        #[arg(long, required_unless_present = "sequence")]
        points: Option<String>,
        /// Print the nested kernels obtained from the first coordinate
        #[arg(long)]
        sequence: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Kronecker product of curve kernels
    Kron {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bhattacharyya parameter, capacity and symmetry of a channel
    ChannelInfo {
        /// Field as p=<p>,r=<r>
        #[arg(long)]
        field: String,
        /// qsc:<p> or table:<path to channel JSON>
        #[arg(long)]
        channel: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact one-step split channels of a kernel
    Split {
        #[command(flatten)]
        kernel: KernelArgs,
        /// qsc:<p> or table:<path to channel JSON>
        #[arg(long)]
        channel: String,
        /// Only this row (0 is the top row)
        #[arg(long)]
        index: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo Bhattacharyya parameters of the synthetic channels
    Polarize {
        #[command(flatten)]
        kernel: KernelArgs,
        /// qsc:<p> or table:<path to channel JSON>
        #[arg(long)]
        channel: String,
        /// Number of kernel factors; the block length is l^n
        #[arg(long)]
        n: usize,
        /// Monte Carlo samples
        #[arg(long)]
        samples: u64,
        /// RNG seed
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Information set of the given size from Monte Carlo estimates
    Select {
        #[command(flatten)]
        kernel: KernelArgs,
        /// qsc:<p> or table:<path to channel JSON>
        #[arg(long)]
        channel: String,
        /// Number of kernel factors; the block length is l^n
        #[arg(long)]
        n: usize,
        /// Number of information positions
        #[arg(long)]
        dim: usize,
        /// Monte Carlo samples
        #[arg(long)]
        samples: u64,
        /// RNG seed
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Degradation order licensed by the curve
    Order {
        #[command(flatten)]
        kernel: KernelArgs,
        /// Number of kernel factors; the block length is l^n
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Minimum-distance bounds of a decreasing code, checked by enumeration
    DistanceBound {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Index set of the dual code
    Dual {
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Block error rate of SC decoding; the information set is chosen from
    /// Monte Carlo estimates seeded with --seed, trials use --seed + 1
    Simulate {
        #[command(flatten)]
        kernel: KernelArgs,
        /// qsc:<p> or table:<path to channel JSON>
        #[arg(long)]
        channel: String,
        /// Number of kernel factors; the block length is l^n
        #[arg(long)]
        n: usize,
        /// Number of information positions
        #[arg(long)]
        dim: usize,
        /// Monte Carlo samples
        #[arg(long)]
        samples: u64,
        /// Decoding trials
        #[arg(long)]
        trials: u64,
        /// RNG seed
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the worked examples (exit 1 on any failure)
    Verify {
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Why a command failed, mapped to the exit code.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Cap(String),
}

impl From<castle_polar::Error> for Failure {
    fn from(e: castle_polar::Error) -> Self {
        match e {
            castle_polar::Error::TooLarge(_) => Failure::Cap(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (output, result) = match cli.command {
        Command::Kernel { kernel, output } => (output, commands::kernel(&kernel)),
        Command::Exponent { kernel, brute, budget, output } => (output, commands::exponent(&kernel, brute, budget)),
        Command::StandardForm { kernel, output } => (output, commands::standard_form(&kernel)),
        Command::Shorten { kernel, points, sequence, output } => {
            (output, commands::shorten(&kernel, points.as_deref(), sequence))
        }
        Command::Kron { kernel, output } => (output, commands::kron(&kernel)),
        Command::ChannelInfo { field, channel, output } => (output, commands::channel_info(&field, &channel)),
        Command::Split { kernel, channel, index, output } => (output, commands::split(&kernel, &channel, index)),
        Command::Polarize { kernel, channel, n, samples, seed, output } => {
            (output, commands::polarize(&kernel, &channel, n, samples, seed))
        }
        Command::Select { kernel, channel, n, dim, samples, seed, output } => {
            (output, commands::select(&kernel, &channel, n, dim, samples, seed))
        }
        Command::Order { kernel, n, output } => (output, commands::order(&kernel, n)),
        Command::DistanceBound { kernel, set, output } => (output, commands::distance_bound(&kernel, &set)),
        Command::Dual { kernel, set, output } => (output, commands::dual(&kernel, &set)),
        Command::Simulate { kernel, channel, n, dim, samples, trials, seed, output } => {
            (output, commands::simulate(&kernel, &channel, n, dim, samples, trials, seed))
        }
        Command::Verify { output } => (output, Ok(verify::run())),
    };
    let value = match result {
        Ok(v) => v,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(3);
        }
    };
    let failed_verify = value.get("passed") == Some(&serde_json::Value::Bool(false));
    if let Err(msg) = report::emit(value, &output) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    if failed_verify {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
