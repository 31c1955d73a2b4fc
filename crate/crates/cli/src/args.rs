use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cayley_srg::arith::exact_log;
use cayley_srg::constructions::Side;

#[derive(Parser, Debug)]
#[command(name = "cayley-srg", version, about = "Strongly regular Cayley graphs from cyclotomy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for cached field tables (overrides CAYLEY_CACHE_DIR).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Write the report or exported graph here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build F_{p^f} and describe it.
    Field(FieldArgs),
    /// Gauss sums of the characters of order dividing N, against closed forms.
    Gauss(GaussArgs),
    /// Subdifference set I of the Singer difference set.
    Subdiff(SubdiffArgs),
    /// Build a connection set.
    Construct(ConstructArgs),
    /// Verify a construct report read from --input or stdin.
    Verify(InputArgs),
    /// Check the halving condition for a partition.
    CheckCondition(ConditionArgs),
    /// Enumerate every partition satisfying the halving condition.
    Search(SearchArgs),
    /// Compare a character-sum formula with direct summation.
    LemmaCheck(LemmaArgs),
    /// Parameters of every family.
    Catalog,
    /// Write the graph of a construct report.
    Export(ExportArgs),
}

/// q^m = p^f, with q = p^e. q defaults to p.
#[derive(Args, Debug, Clone, Serialize)]
pub struct FieldArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub f: Option<u32>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Degrees {
    pub p: u64,
    pub q: u64,
    /// q = p^e.
    pub e: u32,
    pub m: u32,
    /// q^m = p^f.
    pub f: u32,
}

impl FieldArgs {
    pub fn degrees(&self) -> Result<Degrees, String> {
        let p = self.p;
        let q = self.q.unwrap_or(p);
        let e = exact_log(q, p).filter(|&e| e > 0).ok_or(format!("q = {q} is not a power of p = {p}"))?;
        let (m, f) = match (self.m, self.f) {
            (Some(m), Some(f)) if e * m != f => return Err(format!("q^m = {q}^{m} is not p^f = {p}^{f}")),
            (Some(m), _) => (m, e * m),
            (None, Some(f)) if f % e == 0 => (f / e, f),
            (None, Some(f)) => return Err(format!("p^f = {p}^{f} is not a power of q = {q}")),
            (None, None) => return Err("give --f or --m".into()),
        };
        if m == 0 {
            return Err("the extension degree must be positive".into());
        }
        Ok(Degrees { p, q, e, m, f })
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GaussArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SubdiffArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Elliptic,
    Hyperbolic,
    EllipticHalf,
    HyperbolicHalf,
}

impl Family {
    pub fn is_elliptic(self) -> bool {
        matches!(self, Family::Elliptic | Family::EllipticHalf)
    }

    pub fn is_half(self) -> bool {
        matches!(self, Family::EllipticHalf | Family::HyperbolicHalf)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionKind {
    Canonical,
    Conic,
    Quadric,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Defaults to (q^m - 1)/(q - 1) for the conic and quadric partitions.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, value_enum)]
    pub partition: Option<PartitionKind>,
    #[arg(long, default_value = "subdiff")]
    pub side: Side,
    /// Add the two axes minus the origin to product sets.
    #[arg(long)]
    pub axes: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct InputArgs {
    /// Report or connection-set JSON; stdin when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConditionArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    #[arg(long, default_value = "subdiff")]
    pub side: Side,
    #[arg(long, value_enum, default_value = "canonical")]
    pub partition: PartitionKind,
    /// Require one sign of G for every c.
    #[arg(long)]
    pub global: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SearchArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
    #[arg(long, default_value = "subdiff")]
    pub side: Side,
    #[arg(long)]
    pub global: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    EllipticHalf,
    EllipticComplement,
    HyperbolicHalf,
    HyperbolicComplement,
    QuadricTangent,
    QuadricFlat,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LemmaArgs {
    #[arg(long, value_enum)]
    pub which: Lemma,
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    /// Partition of the halved set; the whole target set by default.
    #[arg(long, value_enum)]
    pub partition: Option<PartitionKind>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportFormat {
    Edgelist,
    Graph6,
    Json,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "edgelist")]
    pub format: ExportFormat,
    /// Export graphs with more than 10^5 vertices.
    #[arg(long)]
    pub force: bool,
}
