//! Command-line argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use geo2seq_core::canon::OrderStrategy;
use geo2seq_core::codec::TokenizeMode;

#[derive(Debug, Parser)]
#[command(
    name = "geo2seq",
    version,
    about = "SE(3)-invariant molecular geometry ↔ token sequence toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// XYZ file(s) → one token sequence per line.
    Encode(EncodeArgs),
    /// Sequence file → XYZ file (coordinates in the encoding frame).
    Decode(DecodeArgs),
    /// Encode + decode + align each molecule and check the rounding bound.
    RoundtripCheck(RoundtripArgs),
    /// Collect the token vocabulary of a sequence file.
    BuildVocab(BuildVocabArgs),
    /// Train the counting model on a sequence file.
    Train(TrainArgs),
    /// Sample sequences from a trained model.
    Sample(SampleArgs),
    /// Compare a generated set against a reference set.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct CodecOpts {
    /// Decimal places for distance tokens.
    #[arg(long, default_value_t = 2)]
    pub decimals_dist: u32,
    /// Decimal places for angle tokens.
    #[arg(long, default_value_t = 2)]
    pub decimals_angle: u32,
    /// Atom ordering strategy.
    #[arg(long, default_value = "canonical-locality")]
    pub order: OrderStrategy,
    /// Numeric token layout in sequence files.
    #[arg(long, default_value = "whole")]
    pub tokenize: TokenizeMode,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Input XYZ file(s), concatenated in argument order.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output sequence file (stdout if omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub codec: CodecOpts,
    /// Master seed (random ordering draws a per-molecule stream from it).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
    /// Prefix each sequence with a bucket token for this molecule property
    /// (read from `key=value` entries on XYZ comment lines).
    #[arg(long)]
    pub property: Option<String>,
    /// Number of quantile buckets for --property.
    #[arg(long, default_value_t = 10)]
    pub buckets: usize,
    /// Write the computed bucket edges to this file (one edge per line).
    #[arg(long)]
    pub edges_out: Option<PathBuf>,
    /// Override the built-in bond length table.
    #[arg(long)]
    pub bond_table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    pub input: PathBuf,
    /// Output XYZ file (stdout if omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    /// Input XYZ file(s).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub codec: CodecOpts,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub json_out: Option<PathBuf>,
    #[arg(long)]
    pub bond_table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildVocabArgs {
    pub input: PathBuf,
    /// Output vocabulary file.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Maximum vocabulary size including the four specials.
    #[arg(long, default_value_t = 16_000)]
    pub cap: usize,
    #[arg(long, default_value = "whole")]
    pub tokenize: TokenizeMode,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub vocab: PathBuf,
    /// Output model file.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Model order (context length k).
    #[arg(long, default_value_t = 6)]
    pub order: usize,
    /// Stupid-backoff factor λ.
    #[arg(long, default_value_t = 0.4)]
    pub backoff: f64,
    #[arg(long, default_value = "whole")]
    pub tokenize: TokenizeMode,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub vocab: PathBuf,
    /// Output sequence file (stdout if omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Number of sequences to sample.
    #[arg(short, long, default_value_t = 1000)]
    pub num: usize,
    #[arg(long, default_value_t = 80)]
    pub top_k: usize,
    #[arg(long, default_value_t = 0.7)]
    pub temperature: f64,
    #[arg(long, default_value_t = 512)]
    pub max_len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Conditioning token, e.g. `prop:alpha=3`.
    #[arg(long)]
    pub condition: Option<String>,
    /// Exit 1 when more than this fraction of samples fails the grammar
    /// validator.
    #[arg(long, default_value_t = 0.05)]
    pub max_invalid_frac: f64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Generated set: `.xyz` is parsed as geometries, anything else as a
    /// sequence file (decoded before scoring).
    #[arg(long)]
    pub generated: PathBuf,
    /// Reference XYZ set (geometry distributions target).
    #[arg(long)]
    pub reference: PathBuf,
    /// Training XYZ set for novelty; defaults to the reference set.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Write the JSON report here (the text table always goes to stdout).
    #[arg(long)]
    pub json_out: Option<PathBuf>,
    #[arg(long)]
    pub bond_table: Option<PathBuf>,
    /// Override the built-in valency table.
    #[arg(long)]
    pub valency_table: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
}
