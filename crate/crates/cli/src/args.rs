use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shadowvc::Seed;

#[derive(Debug, Parser)]
#[command(
    name = "shadowvc",
    version,
    about = "Split images into noise-like shadow shares and XOR them back together"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split an image into N shares (share_0.png .. share_{N-1}.png)
    Split(SplitArgs),
    /// XOR shares back into the original image
    Combine(CombineArgs),
    /// Bit-plane balance of an image, or share indistinguishability of two
    Analyze(AnalyzeArgs),
    /// Known-randomness attack against the scheme and against plain XOR
    AttackDemo(AttackArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    pub input: PathBuf,
    /// Number of shares (at least 2)
    #[arg(long, default_value_t = 2)]
    pub shares: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// 64 hex characters; makes the split reproducible (testing only)
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<Seed>,
    /// Stamp all manifests with a shared random group id
    #[arg(long)]
    pub link: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CombineArgs {
    #[arg(required = true)]
    pub shares: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    pub image: PathBuf,
    /// Second image: compare share distributions of the two
    pub other: Option<PathBuf>,
    /// Write a JSON report here, plus CSV tables beside it
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Splits per image for the two-image comparison
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Seed for the two-image comparison; OS entropy otherwise
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<Seed>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeldArg {
    First,
    Second,
}

#[derive(Debug, Clone, Args)]
pub struct AttackArgs {
    pub input: PathBuf,
    #[arg(long, value_parser = parse_seed)]
    pub seed: Seed,
    #[arg(long, value_enum, default_value_t = HeldArg::First)]
    pub held: HeldArg,
    /// The attacker knows which share it holds
    #[arg(long)]
    pub knows_which: bool,
    /// Write a JSON report here
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn parse_seed(text: &str) -> Result<Seed, String> {
    Seed::from_hex(text).map_err(|e| e.to_string())
}
