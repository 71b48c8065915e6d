use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod manifest;

/// Toy ciphers, differential / genetic / neural key-recovery attacks and
/// the I-CRYPT cipher.
#[derive(Debug, Parser)]
#[command(name = "cryptbench", version, about)]
pub struct Cli {
    /// key=value file whose entries act as default flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Threads for attack sweeps; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Table format.
    #[arg(long, global = true, default_value = "csv")]
    format: String,

    /// Write outputs and manifest.json here instead of stdout.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print S-box tables.
    Sbox {
        #[command(subcommand)]
        action: SboxAction,
    },
    /// Encrypt one block.
    Encrypt(BlockArgs),
    /// Decrypt one block.
    Decrypt(BlockArgs),
    /// Run a mode of operation over a byte string.
    Modes(ModesArgs),
    /// Difference distribution table of an SPN S-box.
    Ddt {
        /// S-box id `S<round><box>`, e.g. S11.
        #[arg(long)]
        sbox: String,
    },
    /// Propagate the built-in differential characteristic.
    Char {
        #[arg(long, default_value = "spn")]
        cipher: String,
    },
    /// Classical counting attack on the last round key.
    DiffAttack(DiffArgs),
    /// Genetic algorithm on the two-variable benchmark function.
    GaDemo(GaDemoArgs),
    /// Genetic-algorithm search for the last round key.
    GaAttack(DiffArgs),
    /// Neural-network key ranking against HypCipher.
    NnAttack(NnArgs),
    /// Interpolation attack on the cube-core Feistel cipher.
    InterpAttack(InterpArgs),
    /// I-CRYPT operations.
    Icrypt {
        #[command(subcommand)]
        action: IcryptAction,
    },
    /// Avalanche / SAC / BIC report for a block cipher.
    Quality(QualityArgs),
}

#[derive(Debug, Subcommand)]
pub enum SboxAction {
    /// Rijndael S-box (or an SPN box with --spn).
    Dump {
        #[arg(long)]
        inverse: bool,
        /// SPN box id such as S11 instead of Rijndael.
        #[arg(long)]
        spn: Option<String>,
    },
}

#[derive(Debug, Args, Clone)]
pub struct CipherArgs {
    /// spn, feistel32, hyp, cube or icrypt.
    #[arg(long, default_value = "spn")]
    pub cipher: String,
    /// Comma-separated hex subkeys (one 64-bit key for icrypt).
    #[arg(long)]
    pub key: Option<String>,
    #[command(flatten)]
    pub icrypt: IcryptOpts,
}

#[derive(Debug, Args, Clone)]
pub struct IcryptOpts {
    /// Key injection: bias or input.
    #[arg(long, default_value = "bias")]
    pub variant: String,
    /// Restrict weights to +-1.
    #[arg(long)]
    pub simplified: bool,
    #[arg(long, default_value_t = 10)]
    pub rounds: usize,
}

#[derive(Debug, Args)]
pub struct BlockArgs {
    #[command(flatten)]
    pub cipher: CipherArgs,
    /// Hex block.
    #[arg(long)]
    pub input: String,
}

#[derive(Debug, Args)]
pub struct ModesArgs {
    #[command(flatten)]
    pub cipher: CipherArgs,
    /// ecb, cbc, cfb, ofb or ctr.
    #[arg(long)]
    pub mode: String,
    #[arg(long)]
    pub iv: Option<String>,
    /// Segment size r for CFB, OFB and CTR (default: block size).
    #[arg(long, alias = "segment")]
    pub segment_bits: Option<u32>,
    /// Hex byte string; without it raw bytes are read from stdin and
    /// written to stdout.
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long)]
    pub decrypt: bool,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    /// spn or feistel32.
    #[arg(long, default_value = "spn")]
    pub cipher: String,
    /// True subkeys; drawn from the seed when omitted.
    #[arg(long)]
    pub key: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pair count N = ceil(c / P_D).
    #[arg(long, default_value_t = 15)]
    pub rule_c: u64,
    /// Explicit pair count, overriding --rule-c.
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Rows of the key ranking to print.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
}

#[derive(Debug, Args)]
pub struct GaDemoArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 50)]
    pub population: usize,
    #[arg(long, default_value_t = 200)]
    pub generations: usize,
    #[arg(long, default_value_t = 0.25)]
    pub pc: f64,
    #[arg(long, default_value_t = 0.1)]
    pub pm: f64,
}

#[derive(Debug, Args)]
pub struct NnArgs {
    #[arg(long, default_value_t = 2)]
    pub rounds: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Use two hidden layers (implied for three or more rounds).
    #[arg(long)]
    pub hidden2: bool,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub hidden_size: Option<usize>,
    /// Comma-separated 8-bit hex round keys; drawn from the seed when omitted.
    #[arg(long)]
    pub key: Option<String>,
}

#[derive(Debug, Args)]
pub struct InterpArgs {
    #[arg(long, default_value_t = 2)]
    pub rounds: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub key: Option<String>,
    /// Degree bound; probed from the true key when omitted.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Fixed left half of the chosen plaintexts (hex).
    #[arg(long, default_value = "00")]
    pub left: String,
}

#[derive(Debug, Subcommand)]
pub enum IcryptAction {
    Enc(IcryptBlock),
    Dec(IcryptBlock),
    /// Print the round keys.
    Schedule {
        #[arg(long)]
        key: String,
        #[command(flatten)]
        opts: IcryptOpts,
    },
    /// Quality report for the core or the full cipher.
    Quality {
        /// core or cipher.
        #[arg(long, default_value = "cipher")]
        target: String,
        #[arg(long, default_value = "0123456789ABCDEF")]
        key: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        opts: IcryptOpts,
    },
    /// Known-answer vectors `key,plaintext,ciphertext`.
    Kat {
        #[arg(long, default_value_t = 8)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        opts: IcryptOpts,
    },
}

#[derive(Debug, Args)]
pub struct IcryptBlock {
    #[arg(long)]
    pub key: String,
    #[arg(long)]
    pub input: String,
    #[command(flatten)]
    pub opts: IcryptOpts,
}

#[derive(Debug, Args)]
pub struct QualityArgs {
    #[command(flatten)]
    pub cipher: CipherArgs,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match config::merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
