//! Command-line front end: argument handling, JSON reports and graph export.

pub mod args;
pub mod export;
pub mod report;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use cayley_srg::arith::divisors;
use cayley_srg::chars::{gauss_sum_closed, gauss_sum_direct, rel_deviation, ClosedForm, MultChar};
use cayley_srg::constructions::{
    additive_connection, build_halving_sets, canonical_partition, catalog, catalog_params, conic_partition_m3,
    elliptic_halving, hyperbolic_halving, hyperbolic_lift, quadric_complement_partition, ConnectionSet, Geometry,
    Halving, PartitionSpec, QuadricGeometry, Side,
};
use cayley_srg::cyclotomy::{classify_cyclotomic, subdifference_set, IndexSet};
use cayley_srg::field::CachePolicy;
use cayley_srg::verify::{
    condition_check, elliptic_half_check, hyperbolic_half_check, partition_search, quadric_flat_check,
    quadric_tangent_check, srg_verify, HalvingTable, SignMode,
};
use cayley_srg::{build_field_with, Error, FieldCtx, FieldOptions};

use args::{
    Cli, Command, ConditionArgs, ConstructArgs, Degrees, ExportArgs, ExportFormat, FieldArgs, GaussArgs, InputArgs,
    Lemma, LemmaArgs, PartitionKind, SearchArgs, SubdiffArgs,
};
use export::{check_size, write_edgelist, write_graph6, write_json, CayleyGraph};
use report::RunReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MATH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Relative tolerance for Gauss sums against their closed forms.
const GAUSS_TOL: f64 = 1e-9;
/// Relative tolerance for the subdifference-set Gauss identity.
const SUBDIFF_TOL: f64 = 1e-6;

#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit 2.
    Usage(String),
    /// A mathematical hypothesis or verification failed: exit 1.
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::NotSemiprimitive { .. }
            | Error::NotTwoValued(_)
            | Error::BadModulusCongruence(_)
            | Error::GcdConditionViolated { .. }
            | Error::HypothesisFailed(_)
            | Error::FrameSelectionFailed(_)
            | Error::NotSymmetric(_)
            | Error::IrrationalSpectrumValue(_) => Failure::Math(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Failure {
        if e.is_io() {
            Failure::Usage(format!("write failed: {e}"))
        } else {
            Failure::Usage(format!("malformed JSON: {e}"))
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

type Outcome = Result<(bool, Value), Failure>;

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("serializable")
}

struct Env {
    opts: FieldOptions,
}

impl Env {
    fn field(&self, p: u64, f: u32) -> Result<FieldCtx, Failure> {
        Ok(build_field_with(p, f, None, self.opts.clone())?)
    }

    fn field_of(&self, set: &ConnectionSet) -> Result<FieldCtx, Failure> {
        let spec = set.field();
        Ok(build_field_with(spec.p, spec.f, Some(&spec.modulus), self.opts.clone())?)
    }

    /// F_{q^m}, and F_{q^2m} when `elliptic`, with F_{q^m} generated by
    /// gamma^{q^m+1} for the generator gamma of F_{q^2m}.
    fn fields(&self, d: &Degrees, elliptic: bool) -> Result<(Option<FieldCtx>, FieldCtx), Failure> {
        if elliptic {
            let big = self.field(d.p, 2 * d.f)?;
            let small = big.subfield(d.f)?.ctx;
            Ok((Some(big), small))
        } else {
            Ok((None, self.field(d.p, d.f)?))
        }
    }
}

fn degrees(f: &FieldArgs) -> Result<Degrees, Failure> {
    f.degrees().map_err(Failure::Usage)
}

/// N, defaulting to the number of points of PG(m-1, q) for the geometric partitions.
fn modulus(n: Option<u64>, d: &Degrees, kind: Option<PartitionKind>) -> Result<u64, Failure> {
    let points = (d.q.pow(d.m) - 1) / (d.q - 1);
    match (n, kind) {
        (Some(n), Some(PartitionKind::Conic | PartitionKind::Quadric)) if n != points => {
            usage(format!("the conic and quadric partitions need N = (q^m - 1)/(q - 1) = {points}"))
        }
        (Some(n), _) => Ok(n),
        (None, Some(PartitionKind::Conic | PartitionKind::Quadric)) => Ok(points),
        (None, _) => usage("give --N"),
    }
}

fn resolve_partition(
    kind: Option<PartitionKind>,
    side: Side,
    small: &FieldCtx,
    d: &Degrees,
    i: &IndexSet,
) -> Result<PartitionSpec, Failure> {
    let found = match kind {
        None => PartitionSpec::new(side, side.target(i), IndexSet::empty(i.modulus()))?,
        Some(PartitionKind::Canonical) => {
            let family = classify_cyclotomic(d.p, d.f, i.modulus())?;
            canonical_partition(family, side, d.p, d.f, i)?
        }
        Some(PartitionKind::Conic) => {
            if side != Side::Subdiff {
                return usage("the conic partition is a partition of I (--side subdiff)");
            }
            conic_partition_m3(small, d.q)?.halving.partition
        }
        Some(PartitionKind::Quadric) => {
            if side != Side::Complement {
                return usage("the quadric partition is a partition of Z_N minus I (--side complement)");
            }
            quadric_complement_partition(small, d.q)?.halving.partition
        }
    };
    Ok(found)
}

fn field_cmd(env: &Env, a: &FieldArgs) -> Outcome {
    let d = degrees(a)?;
    let ctx = env.field(d.p, d.f)?;
    let subfields: Vec<u64> = divisors(d.f as u64).into_iter().filter(|&s| s < d.f as u64).collect();
    Ok((
        true,
        json!({
            "degrees": d,
            "spec": ctx.spec(),
            "order": ctx.q(),
            "tables": ctx.has_tables(),
            "proper_subfield_degrees": subfields,
        }),
    ))
}

#[derive(Serialize)]
struct GaussEntry {
    j: u64,
    order: u64,
    direct: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    closed: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deviation: Option<f64>,
}

fn gauss_cmd(env: &Env, a: &GaussArgs) -> Outcome {
    let d = degrees(&a.field)?;
    let ctx = env.field(d.p, d.f)?;
    let mut entries = Vec::new();
    for j in 1..a.n {
        let chi = MultChar::new(&ctx, a.n, j)?;
        let g = gauss_sum_direct(&ctx, &chi);
        let order = chi.order();
        let kind = match order {
            2 => ClosedForm::Quadratic { p: d.p, s: d.f },
            _ => ClosedForm::Semiprimitive { p: d.p, n: order, f: d.f },
        };
        let closed = gauss_sum_closed(kind).ok();
        entries.push(GaussEntry {
            j,
            order,
            direct: [g.re, g.im],
            closed: closed.map(|c| [c.re, c.im]),
            deviation: closed.map(|c| rel_deviation(g, c)),
        });
    }
    let pass = entries.iter().all(|e| e.deviation.is_none_or(|x| x <= GAUSS_TOL));
    Ok((pass, json!({ "degrees": d, "N": a.n, "tolerance": GAUSS_TOL, "sums": entries })))
}

fn subdiff_cmd(env: &Env, a: &SubdiffArgs) -> Outcome {
    let d = degrees(&a.field)?;
    let ctx = env.field(d.p, d.f)?;
    let r = subdifference_set(&ctx, d.q, a.n)?;
    let dev = r.gauss_identity_deviation(&ctx)?;
    let family = classify_cyclotomic(d.p, d.f, a.n).ok();
    Ok((
        dev <= SUBDIFF_TOL,
        json!({
            "degrees": d,
            "subdiff": r,
            "family": family,
            "gauss_identity_deviation": dev,
            "tolerance": SUBDIFF_TOL,
        }),
    ))
}

fn construct_cmd(env: &Env, a: &ConstructArgs) -> Outcome {
    let d = degrees(&a.field)?;
    let n = modulus(a.n, &d, a.partition)?;
    let (big, small) = env.fields(&d, a.family.is_elliptic())?;
    let i = subdifference_set(&small, d.q, n)?.index_set();
    let geometry = if a.family.is_elliptic() {
        Geometry::Elliptic
    } else {
        Geometry::Hyperbolic
    };
    let (set, halving_sets, halving) = if a.family.is_half() {
        let partition = resolve_partition(a.partition, a.side, &small, &d, &i)?;
        partition.validate(&i)?;
        let sets = build_halving_sets(&partition)?;
        let set = match &big {
            Some(big) => elliptic_halving(big, &sets)?,
            None => hyperbolic_halving(&small, &sets, a.axes)?,
        };
        (set, Some(sets), Halving::Half(a.side))
    } else {
        if a.partition.is_some() {
            return usage("--partition applies to the halved families only");
        }
        let set = match &big {
            Some(big) => additive_connection(big, i.clone())?,
            None => hyperbolic_lift(&small, i.clone(), a.axes)?,
        };
        (set, None, Halving::Full)
    };
    // The parameter templates assume no axes.
    let predicted = if a.axes {
        None
    } else {
        catalog_params(geometry, halving, d.p, d.f, n, i.len() as u64).ok()
    };
    Ok((
        true,
        json!({
            "degrees": d,
            "N": n,
            "family": a.family,
            "partition": a.partition,
            "side": a.side,
            "I": i,
            "halving": halving_sets,
            "cardinality": set.cardinality().to_string(),
            "set_hash": set.content_hash(),
            "predicted": predicted,
            "set": set,
        }),
    ))
}

fn read_input(a: &InputArgs) -> Result<Value, Failure> {
    let mut text = String::new();
    match &a.input {
        Some(path) => {
            File::open(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
                .read_to_string(&mut text)?;
        }
        None => {
            io::stdin().read_to_string(&mut text)?;
        }
    }
    Ok(serde_json::from_str(&text)?)
}

/// The connection set of a construct report, or a bare connection set.
fn input_set(v: &Value) -> Result<ConnectionSet, Failure> {
    let raw = v.pointer("/result/set").unwrap_or(v);
    serde_json::from_value(raw.clone()).map_err(|e| Failure::Usage(format!("input holds no connection set: {e}")))
}

fn predicted_tuple(v: &Value) -> Option<[u64; 4]> {
    let p = v.pointer("/result/predicted")?;
    let get = |k: &str| p.get(k)?.as_str()?.parse::<u64>().ok();
    Some([get("v")?, get("k")?, get("lambda")?, get("mu")?])
}

fn verify_cmd(env: &Env, a: &InputArgs) -> Outcome {
    let input = read_input(a)?;
    let set = input_set(&input)?;
    let ctx = env.field_of(&set)?;
    let ver = srg_verify(&ctx, &set)?;
    let (v, k, l, m) = ver.params.tuple();
    let predicted = predicted_tuple(&input);
    let matches = predicted.map(|p| p == [v, k, l, m]);
    let pass = ver.dense_agrees != Some(false) && matches != Some(false);
    Ok((
        pass,
        json!({
            "set_hash": set.content_hash(),
            "params": ver.params,
            "spectrum": ver.spectrum,
            "dense_agrees": ver.dense_agrees,
            "predicted": predicted,
            "matches_prediction": matches,
        }),
    ))
}

fn sign_mode(global: bool) -> SignMode {
    if global {
        SignMode::Global
    } else {
        SignMode::PerC
    }
}

fn condition_cmd(env: &Env, a: &ConditionArgs) -> Outcome {
    let d = degrees(&a.field)?;
    let n = modulus(a.n, &d, Some(a.partition))?;
    let small = env.field(d.p, d.f)?;
    let i = subdifference_set(&small, d.q, n)?.index_set();
    let partition = resolve_partition(Some(a.partition), a.side, &small, &d, &i)?;
    let sets = build_halving_sets(&partition)?;
    let table = HalvingTable::build(&small, n)?;
    let report = condition_check(&table, &sets, &i, sign_mode(a.global))?;
    Ok((
        report.pass,
        json!({ "degrees": d, "I": i, "partition": partition, "X": sets.x, "report": report }),
    ))
}

fn search_cmd(env: &Env, a: &SearchArgs) -> Outcome {
    let d = degrees(&a.field)?;
    let small = env.field(d.p, d.f)?;
    let i = subdifference_set(&small, d.q, a.n)?.index_set();
    let table = HalvingTable::build(&small, a.n)?;
    let report = partition_search(&table, &i, a.side, sign_mode(a.global))?;
    Ok((true, json!({ "degrees": d, "I": i, "report": report })))
}

fn lemma_cmd(env: &Env, a: &LemmaArgs) -> Outcome {
    let d = degrees(&a.field)?;
    let report = match a.which {
        Lemma::QuadricTangent | Lemma::QuadricFlat => {
            let ctx = env.field(d.p, d.f)?;
            let geo = QuadricGeometry::new(&ctx, d.q)?;
            if a.which == Lemma::QuadricTangent {
                quadric_tangent_check(&ctx, &geo)?
            } else {
                quadric_flat_check(&ctx, &geo)?
            }
        }
        which => {
            let elliptic = matches!(which, Lemma::EllipticHalf | Lemma::EllipticComplement);
            let side = match which {
                Lemma::EllipticHalf | Lemma::HyperbolicHalf => Side::Subdiff,
                _ => Side::Complement,
            };
            let n = modulus(a.n, &d, a.partition)?;
            let (big, small) = env.fields(&d, elliptic)?;
            let i = subdifference_set(&small, d.q, n)?.index_set();
            let partition = resolve_partition(a.partition, side, &small, &d, &i)?;
            let sets = build_halving_sets(&partition)?;
            match big {
                Some(big) => elliptic_half_check(&big, &sets, &i)?,
                None => hyperbolic_half_check(&small, &sets, &i)?,
            }
        }
    };
    Ok((report.pass, json!({ "degrees": d, "report": report })))
}

fn export_cmd(env: &Env, a: &ExportArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let input = read_input(&a.input)?;
    let set = input_set(&input)?;
    let v = u64::try_from(set.vertex_count()).map_err(|_| Failure::Usage("graph too large".into()))?;
    check_size(v, a.force)?;
    let ctx = env.field_of(&set)?;
    let graph = CayleyGraph::new(&ctx, &set)?;
    let hash = set.content_hash();
    let mut out = BufWriter::new(out);
    match a.format {
        ExportFormat::Edgelist => write_edgelist(&graph, &hash, &mut out)?,
        ExportFormat::Graph6 => write_graph6(&graph, &mut out)?,
        ExportFormat::Json => write_json(&graph, &hash, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn dispatch(env: &Env, command: &Command) -> (String, Value, Outcome) {
    let (name, args, outcome) = match command {
        Command::Field(a) => ("field", to_value(a), field_cmd(env, a)),
        Command::Gauss(a) => ("gauss", to_value(a), gauss_cmd(env, a)),
        Command::Subdiff(a) => ("subdiff", to_value(a), subdiff_cmd(env, a)),
        Command::Construct(a) => ("construct", to_value(a), construct_cmd(env, a)),
        Command::Verify(a) => ("verify", to_value(a), verify_cmd(env, a)),
        Command::CheckCondition(a) => ("check-condition", to_value(a), condition_cmd(env, a)),
        Command::Search(a) => ("search", to_value(a), search_cmd(env, a)),
        Command::LemmaCheck(a) => ("lemma-check", to_value(a), lemma_cmd(env, a)),
        Command::Catalog => ("catalog", Value::Null, Ok((true, to_value(catalog())))),
        Command::Export(_) => unreachable!("export writes a graph, not a report"),
    };
    (name.to_string(), args, outcome)
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    let mut opts = FieldOptions::default();
    if let Some(dir) = &cli.cache_dir {
        opts.cache = CachePolicy::Dir(dir.clone());
    }
    let env = Env { opts };

    if let Command::Export(a) = &cli.command {
        let result = open_out(cli.out.as_deref()).and_then(|mut out| export_cmd(&env, a, &mut out));
        return match result {
            Ok(()) => EXIT_OK,
            Err(Failure::Usage(m)) => {
                eprintln!("error: {m}");
                EXIT_USAGE
            }
            Err(Failure::Math(m)) => {
                eprintln!("error: {m}");
                EXIT_MATH
            }
        };
    }

    let start = Instant::now();
    let (name, args, outcome) = dispatch(&env, &cli.command);
    let elapsed = start.elapsed().as_millis();
    let (report, code) = match outcome {
        Ok((pass, result)) => (
            RunReport::new(&name, args, pass, None, result, elapsed),
            if pass { EXIT_OK } else { EXIT_MATH },
        ),
        Err(Failure::Math(m)) => (RunReport::new(&name, args, false, Some(m), Value::Null, elapsed), EXIT_MATH),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return EXIT_USAGE;
        }
    };
    let written = open_out(cli.out.as_deref()).and_then(|mut out| {
        serde_json::to_writer_pretty(&mut out, &report)?;
        writeln!(out)?;
        Ok(out.flush()?)
    });
    match written {
        Ok(()) => code,
        Err(Failure::Usage(m) | Failure::Math(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
    }
}
