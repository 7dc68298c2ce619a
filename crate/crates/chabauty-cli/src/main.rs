//! Command line front end for the chabauty library.
//!
//! Subcommands mirror the library layers: `field` and `jacobian` report
//! invariants, `bcp` enumerates torus classes over a tower, `obstruction`
//! renders a verdict for a curve or a bare (dim, rank) pair, `verify`
//! runs the certificate checks, and `sunit` drives the desk solver.
//!
//! Exit codes: 0 when the run succeeded and every verdict came back
//! affirmative, 1 when the run succeeded but a verdict was inconclusive
//! or negative, 2 for usage and computation errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chabauty::bcp::{
    delta_ledger, obstruction_verdict, subtorus_verdict, BcpChain, VerdictKind, VerdictMode,
};
use chabauty::cache::Cache;
use chabauty::charrank::{
    classical_chabauty_verdict, verify_main_rank_bound, verify_no_subgroup_obstruction,
    ClassicalVerdict, SubgroupVerdict, VerifierInstance,
};
use chabauty::cmwitness::cm_bcp_witness;
use chabauty::config::{Config, ConfigBlock};
use chabauty::error::{Error, Result};
use chabauty::numfield::{parse_number_field, KPoly, NumberField, SSpec, SubfieldTower};
use chabauty::puncture::{
    build_x_alpha_q, curve_from_divisor, jacobian_profile, GenJacobianProfile, PuncturedCurve,
};
use chabauty::report::{parse_q, q_string};
use chabauty::sieve::{skolem_sieve_with, solve_sunit_desk, DeskConfig, DeskStatus};
use chabauty::{Poly, Q, Z};

const PRECISION_ENV: &str = "CHABAUTY_PRECISION";

#[derive(Parser)]
#[command(
    name = "chabauty",
    about = "Rank and obstruction computations for restriction-of-scalars Chabauty",
    version
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to a file instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Cache directory (overrides CHABAUTY_CACHE_DIR)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Disable the disk cache for this run
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invariants of a number field: signature, ranks, splitting
    Field(FieldArgs),
    /// Dimension and rank of the generalized Jacobian of a punctured line
    Jacobian(JacobianArgs),
    /// Enumerate torus classes over a subfield tower
    Bcp(BcpArgs),
    /// Obstruction verdict for a curve or a bare (dim, rank) pair
    Obstruction(ObstructionArgs),
    /// Certificate checks
    Verify(VerifyArgs),
    /// Solve x + y = 1 in S-units over the rationals
    Sunit(SunitArgs),
}

#[derive(Args)]
struct FieldArgs {
    /// Defining polynomial coefficients, constant first, or "Q"
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Primes of S0, comma separated
    #[arg(long)]
    s0: Option<String>,
    /// Primes to report splitting profiles for
    #[arg(long)]
    primes: Option<String>,
    /// Configuration file with a [field] block
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct CurveFlags {
    /// Base field: "Q" or defining polynomial coefficients, constant first
    #[arg(long, allow_hyphen_values = true)]
    field: Option<String>,
    /// Primes of S0, comma separated; omit or leave empty for none
    #[arg(long)]
    s0: Option<String>,
    /// Puncture divisor coefficients over the base, constant first
    #[arg(long, allow_hyphen_values = true)]
    divisor: Option<String>,
    /// Include the point at infinity among the punctures
    #[arg(long)]
    include_infinity: bool,
    /// Kummer parameter: punctures at the roots of x^q - alpha
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Kummer exponent q (odd prime)
    #[arg(long)]
    q: Option<u64>,
    /// Curve label for reports
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args)]
struct JacobianArgs {
    #[command(flatten)]
    curve: CurveFlags,
    /// Configuration file with [curve] blocks, one instance each
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BcpArgs {
    #[command(flatten)]
    curve: CurveFlags,
    /// Tower member above the rationals: polynomial coefficients, repeatable
    #[arg(long = "member", allow_hyphen_values = true)]
    members: Vec<String>,
    /// Image of the previous member's generator, one per member, repeatable
    #[arg(long = "embed", allow_hyphen_values = true)]
    embeds: Vec<String>,
    /// Maximum chain length
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Configuration file with [member] blocks, a [curve] block, and an
    /// optional [bcp] block carrying depth
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ObstructionArgs {
    #[command(flatten)]
    curve: CurveFlags,
    /// Torus dimension, for a bare verdict without a curve
    #[arg(long, allow_hyphen_values = true)]
    dim: Option<i64>,
    /// Rank of the integral points, for a bare verdict
    #[arg(long, allow_hyphen_values = true)]
    rank: Option<i64>,
    #[arg(long, value_enum, default_value_t = Mode::Unconditional)]
    mode: Mode,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Unconditional,
    Leopoldt,
}

impl Mode {
    fn verdict_mode(self) -> VerdictMode {
        match self {
            Mode::Unconditional => VerdictMode::Unconditional,
            Mode::Leopoldt => VerdictMode::LeopoldtAssumed,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(subcommand)]
    verb: VerifyVerb,
}

#[derive(Subcommand)]
enum VerifyVerb {
    /// Check the main rank inequality for a Kummer curve instance
    MainBound(MainBoundArgs),
    /// Check that no proper subgroup class obstructs the counting step
    NoSubgroup(NoSubgroupArgs),
    /// Classical single-factor finiteness criterion
    Classical(ClassicalArgs),
    /// Construct the CM witness torus and judge it
    CmWitness(CmWitnessArgs),
}

#[derive(Args)]
struct MainBoundArgs {
    /// Base field: "Q" or coefficients
    #[arg(long, default_value = "Q", allow_hyphen_values = true)]
    field: String,
    #[arg(long)]
    s0: Option<String>,
    #[arg(long)]
    q: u64,
    /// Rational alpha for the curve x^q = alpha
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    alpha: String,
    /// Slack in the inequality, exact rational
    #[arg(long, default_value = "1/4")]
    epsilon: String,
    /// Tower member above the rationals, repeatable
    #[arg(long = "member")]
    members: Vec<String>,
    #[arg(long = "embed")]
    embeds: Vec<String>,
    /// Index of the tower member K' used on the right-hand side
    #[arg(long, default_value_t = 0)]
    subfield: usize,
}

#[derive(Args)]
struct NoSubgroupArgs {
    #[arg(long, default_value = "Q", allow_hyphen_values = true)]
    field: String,
    #[arg(long)]
    s0: Option<String>,
    #[arg(long)]
    q: u64,
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    #[arg(long, default_value = "1/4")]
    epsilon: String,
}

#[derive(Args)]
struct ClassicalArgs {
    #[command(flatten)]
    curve: CurveFlags,
}

#[derive(Args)]
struct CmWitnessArgs {
    /// CM field over the rationals: defining polynomial coefficients
    #[arg(long, allow_hyphen_values = true)]
    field: String,
    #[arg(long)]
    q: u64,
    #[arg(long, value_enum, default_value_t = Mode::Leopoldt)]
    mode: Mode,
}

#[derive(Args)]
struct SunitArgs {
    /// Primes of S0, comma separated; omit or leave empty for none
    #[arg(long)]
    s0: Option<String>,
    /// Kummer exponent for the coset certificates (default: chosen from S0)
    #[arg(long)]
    q: Option<u64>,
    /// Auxiliary odd prime for the sieve (default: chosen outside S0)
    #[arg(long)]
    p: Option<u64>,
    /// p-adic working precision (default: CHABAUTY_PRECISION or 10)
    #[arg(long)]
    n: Option<u32>,
    /// Exponent box radius for the exact search
    #[arg(long)]
    box_radius: Option<u32>,
    /// Largest residue class set the sieve may enumerate
    #[arg(long)]
    budget: Option<u64>,
    /// Slack for the per-coset certificates
    #[arg(long, default_value = "1/4")]
    epsilon: String,
    /// Run only the congruence sieve and report its classes
    #[arg(long)]
    sieve_only: bool,
    /// Configuration file with a [sieve] block
    #[arg(long)]
    config: Option<PathBuf>,
}

struct Grid {
    title: String,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

struct Outcome {
    instance: serde_json::Value,
    results: serde_json::Value,
    affirmative: bool,
    kv: Vec<(String, String)>,
    grids: Vec<Grid>,
    csv_headers: Vec<String>,
    csv_rows: Vec<Vec<String>>,
    warnings: Vec<String>,
}

impl Outcome {
    fn new(instance: serde_json::Value, results: serde_json::Value) -> Outcome {
        Outcome {
            instance,
            results,
            affirmative: true,
            kv: Vec::new(),
            grids: Vec::new(),
            csv_headers: Vec::new(),
            csv_rows: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let started = Instant::now();
    let mut cache = if cli.no_cache {
        Cache::disabled()
    } else if let Some(dir) = &cli.cache_dir {
        Cache::at_dir(dir)
    } else {
        Cache::from_env()
    };
    let (name, mut outcome) = match &cli.cmd {
        Cmd::Field(a) => ("field", run_field(a, &mut cache)?),
        Cmd::Jacobian(a) => ("jacobian", run_jacobian(a, &mut cache)?),
        Cmd::Bcp(a) => ("bcp", run_bcp(a)?),
        Cmd::Obstruction(a) => ("obstruction", run_obstruction(a)?),
        Cmd::Verify(a) => match &a.verb {
            VerifyVerb::MainBound(v) => ("verify main-bound", run_main_bound(v)?),
            VerifyVerb::NoSubgroup(v) => ("verify no-subgroup", run_no_subgroup(v)?),
            VerifyVerb::Classical(v) => ("verify classical", run_classical(v)?),
            VerifyVerb::CmWitness(v) => ("verify cm-witness", run_cm_witness(v)?),
        },
        Cmd::Sunit(a) => ("sunit", run_sunit(a)?),
    };
    outcome.warnings.extend(cache.take_warnings());
    outcome.warnings.sort();
    outcome.warnings.dedup();

    let report = serde_json::json!({
        "schema_version": 1,
        "subcommand": name,
        "instance": outcome.instance,
        "results": outcome.results,
        "warnings": outcome.warnings,
        "timing": {"elapsed_ms": started.elapsed().as_millis() as u64},
    });
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Table => render_table(&outcome),
        Format::Csv => render_csv(&outcome.csv_headers, &outcome.csv_rows),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(e.to_string()))?,
        None => print!("{text}"),
    }
    Ok(if outcome.affirmative { 0 } else { 1 })
}

// parsing helpers

fn parse_i64_list(raw: &str) -> Result<Vec<i64>> {
    raw.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| Error::Config(format!("`{raw}` is not an integer list")))
        })
        .collect()
}

fn parse_u64_list(raw: &str) -> Result<Vec<u64>> {
    raw.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::Config(format!("`{raw}` is not a list of nonnegative integers")))
        })
        .collect()
}

fn parse_q_list(raw: &str) -> Result<Vec<Q>> {
    raw.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_q)
        .collect()
}

fn parse_field_spec(raw: &str) -> Result<NumberField> {
    let t = raw.trim();
    if t.eq_ignore_ascii_case("q") {
        return Ok(NumberField::rationals());
    }
    parse_number_field(&parse_i64_list(t)?)
}

fn parse_s0(raw: Option<&str>) -> Result<SSpec> {
    match raw {
        None => Ok(SSpec::empty()),
        Some(s) => SSpec::new(parse_u64_list(s)?),
    }
}

fn load_config(path: &PathBuf) -> Result<Config> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Config::parse(&text)
}

/// One curve description, from flags or a [curve] block.
#[derive(Clone, Default)]
struct CurveInput {
    field: Option<String>,
    s0: Option<String>,
    divisor: Option<String>,
    infinity: bool,
    alpha: Option<String>,
    q: Option<u64>,
    label: Option<String>,
}

impl CurveInput {
    fn from_flags(f: &CurveFlags) -> CurveInput {
        CurveInput {
            field: f.field.clone(),
            s0: f.s0.clone(),
            divisor: f.divisor.clone(),
            infinity: f.include_infinity,
            alpha: f.alpha.clone(),
            q: f.q,
            label: f.label.clone(),
        }
    }

    fn from_block(b: &ConfigBlock) -> Result<CurveInput> {
        let infinity = match b.get("infinity") {
            None => false,
            Some("true") => true,
            Some("false") => false,
            Some(other) => {
                return Err(Error::Config(format!(
                    "block [{}]: infinity = `{other}` is not true/false",
                    b.name
                )))
            }
        };
        let q = match b.get("q") {
            None => None,
            Some(_) => Some(b.u64_value("q")?),
        };
        Ok(CurveInput {
            field: b.get("field").map(str::to_string),
            s0: b.get("s0").map(str::to_string),
            divisor: b.get("divisor").map(str::to_string),
            infinity,
            alpha: b.get("alpha").map(str::to_string),
            q,
            label: b.get("label").map(str::to_string),
        })
    }

    fn build(&self) -> Result<(NumberField, SSpec, PuncturedCurve, serde_json::Value)> {
        let base = parse_field_spec(self.field.as_deref().unwrap_or("Q"))?;
        let s0 = parse_s0(self.s0.as_deref())?;
        let mut echo = serde_json::json!({
            "field": base.label(),
            "field_poly": base.defining_poly().coeff_strings(),
            "s0": s0.primes().collect::<Vec<_>>(),
        });
        let curve = match (&self.alpha, &self.divisor) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either alpha and q, or a divisor, not both".into(),
                ))
            }
            (Some(alpha), None) => {
                let q = self
                    .q
                    .ok_or_else(|| Error::Config("alpha needs q as well".into()))?;
                let alpha = parse_q(alpha)?;
                let kummer = build_x_alpha_q(&base, &s0, &Poly::constant(alpha.clone()), q)?;
                echo["alpha"] = serde_json::json!(q_string(&alpha));
                echo["q"] = serde_json::json!(q);
                echo["routed_to_one"] = serde_json::json!(kummer.routed_to_one);
                kummer.curve
            }
            (None, Some(divisor)) => {
                let coeffs = parse_q_list(divisor)?;
                if coeffs.is_empty() {
                    return Err(Error::Config("empty divisor".into()));
                }
                let div = KPoly::from_q_poly(&Poly::from_coeffs(coeffs.clone()));
                let label = self.label.clone().unwrap_or_else(|| {
                    format!("P1 minus roots of divisor over {}", base.label())
                });
                echo["divisor"] = serde_json::json!(
                    coeffs.iter().map(q_string).collect::<Vec<_>>()
                );
                echo["infinity"] = serde_json::json!(self.infinity);
                curve_from_divisor(&base, &s0, &div, self.infinity, label)?
            }
            (None, None) => {
                return Err(Error::Config(
                    "a curve needs either alpha and q, or a divisor".into(),
                ))
            }
        };
        echo["curve"] = serde_json::json!(curve.label());
        Ok((base, s0, curve, echo))
    }
}

/// Tower members above the rationals, from repeated flags or [member]
/// blocks: polynomial coefficients plus the image of the previous
/// member's generator.
fn build_tower(members: &[(Vec<i64>, Option<String>, Vec<i64>)]) -> Result<SubfieldTower> {
    let mut chain = vec![NumberField::rationals()];
    let mut embeds = Vec::new();
    for (coeffs, label, embed) in members {
        let mut f = parse_number_field(coeffs)?;
        if let Some(l) = label {
            f = f.with_label(l.clone());
        }
        chain.push(f);
        embeds.push(Poly::from_int(embed));
    }
    SubfieldTower::new(chain, embeds)
}

fn tower_from_flags(members: &[String], embeds: &[String]) -> Result<SubfieldTower> {
    if embeds.len() > members.len() {
        return Err(Error::Config("more --embed values than --member values".into()));
    }
    let mut specs = Vec::new();
    for (i, m) in members.iter().enumerate() {
        let embed = match embeds.get(i) {
            Some(e) => parse_i64_list(e)?,
            None => vec![0],
        };
        specs.push((parse_i64_list(m)?, None, embed));
    }
    build_tower(&specs)
}

fn tower_from_config(cfg: &Config) -> Result<Option<SubfieldTower>> {
    let blocks: Vec<&ConfigBlock> = cfg.named("member").collect();
    if blocks.is_empty() {
        return Ok(None);
    }
    let mut specs = Vec::new();
    for b in blocks {
        let coeffs = b.int_list("poly")?;
        let label = b.get("label").map(str::to_string);
        let embed = match b.get("embed") {
            Some(_) => b.int_list("embed")?,
            None => vec![0],
        };
        specs.push((coeffs, label, embed));
    }
    Ok(Some(build_tower(&specs)?))
}

fn tower_echo(t: &SubfieldTower) -> serde_json::Value {
    serde_json::json!(t
        .members()
        .iter()
        .map(|m| m.label().to_string())
        .collect::<Vec<_>>())
}

// subcommands

fn run_field(a: &FieldArgs, cache: &mut Cache) -> Result<Outcome> {
    let (poly_raw, s0_raw, primes_raw) = if let Some(path) = &a.config {
        let cfg = load_config(path)?;
        let b = cfg.single("field")?;
        (
            b.require("poly")?.to_string(),
            b.get("s0").map(str::to_string),
            b.get("primes").map(str::to_string),
        )
    } else {
        let poly = a
            .poly
            .clone()
            .ok_or_else(|| Error::Config("field needs --poly or --config".into()))?;
        (poly, a.s0.clone(), a.primes.clone())
    };
    let field = parse_field_spec(&poly_raw)?;
    let s0 = parse_s0(s0_raw.as_deref())?;
    let primes = match &primes_raw {
        Some(p) => parse_u64_list(p)?,
        None => Vec::new(),
    };
    let instance = serde_json::json!({
        "poly": field.defining_poly().coeff_strings(),
        "s0": s0.primes().collect::<Vec<_>>(),
        "primes": primes,
    });

    let key = Cache::content_key(&["field.v1", &instance.to_string()]);
    let results = cache.lookup_or_compute(&key, || {
        let (r1, r2) = field.signature();
        let mut splitting = Vec::new();
        for &p in &primes {
            let prof = field.splitting_profile(p)?;
            splitting.push(serde_json::json!({
                "p": p,
                "residue_degrees": prof.residue_degrees,
                "exact": prof.exact,
                "places": prof.residue_degrees.len(),
            }));
        }
        Ok(serde_json::json!({
            "label": field.label(),
            "defining_poly": field.defining_poly().display(),
            "degree": field.degree(),
            "signature": [r1, r2],
            "totally_real": field.is_totally_real(),
            "totally_complex": field.is_totally_complex(),
            "poly_discriminant": field.poly_discriminant().to_string(),
            "s_unit_rank": field.s_unit_rank(&s0)?,
            "splitting": splitting,
        }))
    })?;

    let mut out = Outcome::new(instance, results.clone());
    for key in [
        "label",
        "defining_poly",
        "degree",
        "signature",
        "totally_real",
        "poly_discriminant",
        "s_unit_rank",
    ] {
        out.kv.push((key.to_string(), plain(&results[key])));
    }
    let rows: Vec<Vec<String>> = results["splitting"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            vec![
                plain(&s["p"]),
                plain(&s["residue_degrees"]),
                plain(&s["places"]),
                plain(&s["exact"]),
            ]
        })
        .collect();
    if !rows.is_empty() {
        out.grids.push(Grid {
            title: "splitting".into(),
            headers: vec!["p".into(), "residue_degrees".into(), "places".into(), "exact".into()],
            rows: rows.clone(),
        });
    }
    out.csv_headers = vec![
        "label".into(),
        "degree".into(),
        "r1".into(),
        "r2".into(),
        "s_unit_rank".into(),
        "p".into(),
        "residue_degrees".into(),
    ];
    let (r1, r2) = (plain(&results["signature"][0]), plain(&results["signature"][1]));
    let base_row = vec![
        plain(&results["label"]),
        plain(&results["degree"]),
        r1,
        r2,
        plain(&results["s_unit_rank"]),
    ];
    if results["splitting"].as_array().unwrap().is_empty() {
        let mut row = base_row;
        row.extend(["".to_string(), "".to_string()]);
        out.csv_rows.push(row);
    } else {
        for s in results["splitting"].as_array().unwrap() {
            let mut row = base_row.clone();
            row.push(plain(&s["p"]));
            row.push(plain(&s["residue_degrees"]));
            out.csv_rows.push(row);
        }
    }
    Ok(out)
}

fn profile_json(curve_label: &str, p: &GenJacobianProfile) -> serde_json::Value {
    serde_json::json!({
        "curve": curve_label,
        "dim": p.dim,
        "rank": p.rank,
        "orbits": p.per_orbit.iter().map(|o| serde_json::json!({
            "degree": o.degree,
            "residue_signature": [o.residue_signature.0, o.residue_signature.1],
            "s_unit_rank": o.s_unit_rank,
            "places_above_S": o.places_above_s.iter()
                .map(|(p, c)| serde_json::json!([p, c]))
                .collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn run_jacobian(a: &JacobianArgs, cache: &mut Cache) -> Result<Outcome> {
    let inputs: Vec<CurveInput> = if let Some(path) = &a.config {
        let cfg = load_config(path)?;
        let blocks: Vec<&ConfigBlock> = cfg.named("curve").collect();
        if blocks.is_empty() {
            return Err(Error::Config("no [curve] block in the configuration".into()));
        }
        blocks
            .into_iter()
            .map(CurveInput::from_block)
            .collect::<Result<_>>()?
    } else {
        vec![CurveInput::from_flags(&a.curve)]
    };

    let mut echoes = Vec::new();
    let mut profiles = Vec::new();
    let mut out_grids = Vec::new();
    let mut summary_rows = Vec::new();
    let mut csv_rows = Vec::new();
    for input in &inputs {
        let (_, _, curve, echo) = input.build()?;
        let key = Cache::content_key(&["jacobian.v1", &echo.to_string()]);
        let payload = cache.lookup_or_compute(&key, || {
            let profile = jacobian_profile(&curve)?;
            Ok(profile_json(curve.label(), &profile))
        })?;
        summary_rows.push(vec![
            plain(&payload["curve"]),
            plain(&payload["dim"]),
            plain(&payload["rank"]),
            payload["orbits"].as_array().unwrap().len().to_string(),
        ]);
        csv_rows.push(vec![
            plain(&payload["curve"]),
            plain(&payload["dim"]),
            plain(&payload["rank"]),
            payload["orbits"].as_array().unwrap().len().to_string(),
        ]);
        let orbit_rows: Vec<Vec<String>> = payload["orbits"]
            .as_array()
            .unwrap()
            .iter()
            .map(|o| {
                vec![
                    plain(&o["degree"]),
                    plain(&o["residue_signature"]),
                    plain(&o["s_unit_rank"]),
                    plain(&o["places_above_S"]),
                ]
            })
            .collect();
        out_grids.push(Grid {
            title: format!("orbits of {}", plain(&payload["curve"])),
            headers: vec![
                "degree".into(),
                "residue_signature".into(),
                "s_unit_rank".into(),
                "places_above_S".into(),
            ],
            rows: orbit_rows,
        });
        echoes.push(echo);
        profiles.push(payload);
    }

    let instance = serde_json::json!({"curves": echoes});
    let results = serde_json::json!({"profiles": profiles});
    let mut out = Outcome::new(instance, results);
    out.grids.push(Grid {
        title: "profiles".into(),
        headers: vec!["curve".into(), "dim".into(), "rank".into(), "orbits".into()],
        rows: summary_rows,
    });
    out.grids.extend(out_grids);
    out.csv_headers = vec!["curve".into(), "dim".into(), "rank".into(), "orbits".into()];
    out.csv_rows = csv_rows;
    Ok(out)
}

fn run_bcp(a: &BcpArgs) -> Result<Outcome> {
    let (tower, input, depth) = if let Some(path) = &a.config {
        let cfg = load_config(path)?;
        let tower = tower_from_config(&cfg)?
            .unwrap_or_else(SubfieldTower::rationals_only);
        let curve_block = cfg.single("curve")?;
        let input = CurveInput::from_block(curve_block)?;
        let depth = match cfg.named("bcp").next() {
            Some(b) => b.u64_value("depth")? as usize,
            None => a.depth,
        };
        (tower, input, depth)
    } else {
        let tower = tower_from_flags(&a.members, &a.embeds)?;
        (tower, CurveInput::from_flags(&a.curve), a.depth)
    };

    // a curve block without a field names the tower top implicitly
    let input = {
        let mut input = input;
        if input.field.is_none() {
            let top = tower.member(tower.len() - 1);
            input.field = Some(
                top.defining_poly()
                    .coeff_strings()
                    .join(","),
            );
        }
        input
    };
    let (_, _, curve, curve_echo) = input.build()?;
    let tori = chabauty::bcp::enumerate_bcp_tori(&curve, &tower, depth)?;

    let mut by_n: BTreeMap<usize, usize> = BTreeMap::new();
    for t in &tori {
        *by_n.entry(t.minimal_n).or_insert(0) += 1;
    }
    let grouping = by_n
        .values()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join("/");

    let classes: Vec<serde_json::Value> = tori
        .iter()
        .map(|t| {
            serde_json::json!({
                "minimal_n": t.minimal_n,
                "class": t.class.display(),
                "factors": t.class.factor_labels(),
                "dim": t.class.dim(),
                "rank": t.class.rank(),
                "rank_exact": t.class.rank_exact(),
                "witness": t.witness,
            })
        })
        .collect();
    let instance = serde_json::json!({
        "curve": curve_echo,
        "tower": tower_echo(&tower),
        "depth": depth,
    });
    let results = serde_json::json!({
        "count": tori.len(),
        "grouping_by_minimal_n": grouping,
        "classes": classes,
    });
    let mut out = Outcome::new(instance, results);
    out.kv.push(("classes".into(), tori.len().to_string()));
    out.kv.push(("grouping".into(), grouping));
    let rows: Vec<Vec<String>> = tori
        .iter()
        .map(|t| {
            vec![
                t.minimal_n.to_string(),
                t.class.display(),
                t.class.dim().to_string(),
                t.class.rank().to_string(),
            ]
        })
        .collect();
    out.csv_headers = vec!["minimal_n".into(), "class".into(), "dim".into(), "rank".into()];
    out.csv_rows = rows.clone();
    out.grids.push(Grid {
        title: "torus classes".into(),
        headers: out.csv_headers.clone(),
        rows,
    });
    Ok(out)
}

fn run_obstruction(a: &ObstructionArgs) -> Result<Outcome> {
    let mode = a.mode.verdict_mode();
    if let (Some(dim), Some(rank)) = (a.dim, a.rank) {
        let field = parse_field_spec(a.curve.field.as_deref().unwrap_or("Q"))?;
        let v = subtorus_verdict(dim, rank, &field, mode);
        let instance = serde_json::json!({
            "dim": dim, "rank": rank, "field": field.label(), "mode": mode.name(),
        });
        let mut out = Outcome::new(instance, serde_json::json!({"verdict": v.to_json()}));
        out.affirmative = v.verdict != VerdictKind::Inconclusive;
        out.kv.push(("verdict".into(), v.verdict.name().to_string()));
        out.kv.push(("evidence".into(), v.evidence.clone()));
        out.csv_headers = vec!["dim".into(), "rank".into(), "verdict".into()];
        out.csv_rows = vec![vec![
            dim.to_string(),
            rank.to_string(),
            v.verdict.name().to_string(),
        ]];
        return Ok(out);
    }
    if a.dim.is_some() != a.rank.is_some() {
        return Err(Error::Config("--dim and --rank go together".into()));
    }

    let (tower, input) = if let Some(path) = &a.config {
        let cfg = load_config(path)?;
        let tower = tower_from_config(&cfg)?
            .unwrap_or_else(SubfieldTower::rationals_only);
        (tower, CurveInput::from_block(cfg.single("curve")?)?)
    } else {
        (SubfieldTower::rationals_only(), CurveInput::from_flags(&a.curve))
    };
    let (_, _, curve, curve_echo) = input.build()?;
    let chain = BcpChain::origin(&curve, &tower)?;
    let ledger = delta_ledger(&chain)?;
    let v = obstruction_verdict(&chain, mode)?;
    let class = chain.result()?;

    let instance = serde_json::json!({
        "curve": curve_echo,
        "tower": tower_echo(&tower),
        "mode": mode.name(),
    });
    let results = serde_json::json!({
        "class": class.display(),
        "ledger": {"deltas": ledger.deltas, "lower_bound": ledger.lower_bound},
        "verdict": v.to_json(),
    });
    let mut out = Outcome::new(instance, results);
    out.affirmative = v.verdict != VerdictKind::Inconclusive;
    out.kv.push(("class".into(), class.display()));
    out.kv.push(("dim".into(), v.dim_t.to_string()));
    out.kv.push(("rank".into(), v.rank_t.to_string()));
    out.kv.push((
        "ledger".into(),
        format!("deltas {:?}, lower bound {}", ledger.deltas, ledger.lower_bound),
    ));
    out.kv.push(("verdict".into(), v.verdict.name().to_string()));
    out.kv.push(("evidence".into(), v.evidence.clone()));
    out.csv_headers = vec![
        "curve".into(),
        "dim".into(),
        "rank".into(),
        "ledger_lower_bound".into(),
        "verdict".into(),
    ];
    out.csv_rows = vec![vec![
        curve.label().to_string(),
        v.dim_t.to_string(),
        v.rank_t.to_string(),
        ledger.lower_bound.to_string(),
        v.verdict.name().to_string(),
    ]];
    Ok(out)
}

fn verifier_instance(
    field: &str,
    s0: Option<&str>,
    q: u64,
    alpha: &str,
    epsilon: &str,
    tower: SubfieldTower,
) -> Result<(VerifierInstance, serde_json::Value)> {
    let base = parse_field_spec(field)?;
    let s0 = parse_s0(s0)?;
    let alpha = parse_q(alpha)?;
    let epsilon = parse_q(epsilon)?;
    let echo = serde_json::json!({
        "field": base.label(),
        "s0": s0.primes().collect::<Vec<_>>(),
        "q": q,
        "alpha": q_string(&alpha),
        "epsilon": q_string(&epsilon),
        "tower": tower_echo(&tower),
    });
    let inst = VerifierInstance::new(base, tower, s0, q, Poly::constant(alpha), epsilon)?;
    Ok((inst, echo))
}

fn run_main_bound(a: &MainBoundArgs) -> Result<Outcome> {
    let tower = tower_from_flags(&a.members, &a.embeds)?;
    let (inst, echo) = verifier_instance(&a.field, a.s0.as_deref(), a.q, &a.alpha, &a.epsilon, tower)?;
    let report = verify_main_rank_bound(&inst, a.subfield)?;
    let mut out = Outcome::new(echo, report.to_json());
    out.affirmative = report.pass;
    out.warnings = report.hypothesis_flags.clone();
    out.kv.push(("curve".into(), report.curve_label.clone()));
    out.kv.push((
        "inequality".into(),
        format!("{} <= {}", report.lhs_rank, q_string(&report.rhs)),
    ));
    out.kv
        .push(("verdict".into(), if report.pass { "pass" } else { "fail" }.into()));
    out.csv_headers = vec!["curve".into(), "lhs".into(), "rhs".into(), "verdict".into()];
    out.csv_rows = vec![vec![
        report.curve_label.clone(),
        report.lhs_rank.to_string(),
        q_string(&report.rhs),
        if report.pass { "pass" } else { "fail" }.into(),
    ]];
    Ok(out)
}

fn run_no_subgroup(a: &NoSubgroupArgs) -> Result<Outcome> {
    let (inst, echo) = verifier_instance(
        &a.field,
        a.s0.as_deref(),
        a.q,
        &a.alpha,
        &a.epsilon,
        SubfieldTower::rationals_only(),
    )?;
    let report = verify_no_subgroup_obstruction(&inst)?;
    let verdict_text = match &report.verdict {
        SubgroupVerdict::NoSubgroupObstruction => "NoSubgroupObstruction".to_string(),
        SubgroupVerdict::Inconclusive { failing_m } => {
            format!("Inconclusive (class m = {failing_m})")
        }
    };
    let mut out = Outcome::new(echo, report.to_json());
    out.affirmative = matches!(report.verdict, SubgroupVerdict::NoSubgroupObstruction);
    out.kv.push(("verdict".into(), verdict_text));
    out.csv_headers = vec![
        "m".into(),
        "dim".into(),
        "rank_upper".into(),
        "margin".into(),
        "pass".into(),
    ];
    let rows: Vec<Vec<String>> = report
        .classes
        .iter()
        .map(|c| {
            vec![
                c.m.to_string(),
                c.dim.to_string(),
                c.rank_upper.to_string(),
                c.margin.to_string(),
                c.pass.to_string(),
            ]
        })
        .collect();
    out.csv_rows = rows.clone();
    out.grids.push(Grid {
        title: "subgroup classes".into(),
        headers: out.csv_headers.clone(),
        rows,
    });
    Ok(out)
}

fn run_classical(a: &ClassicalArgs) -> Result<Outcome> {
    let input = CurveInput::from_flags(&a.curve);
    let (base, s0, curve, echo) = input.build()?;
    let report = classical_chabauty_verdict(&base, &s0, &curve)?;
    let finite = matches!(report.verdict, ClassicalVerdict::FiniteChabautySet { .. });
    let mut out = Outcome::new(echo, report.to_json());
    out.affirmative = finite;
    out.kv
        .push(("verdict".into(), plain(&out.results["verdict"])));
    out.csv_headers = vec!["factor".into(), "dim".into(), "rank".into()];
    let rows: Vec<Vec<String>> = report
        .factors
        .iter()
        .map(|f| vec![f.description.clone(), f.dim.to_string(), f.rank.to_string()])
        .collect();
    out.csv_rows = rows.clone();
    out.grids.push(Grid {
        title: "isogeny factors".into(),
        headers: out.csv_headers.clone(),
        rows,
    });
    Ok(out)
}

fn run_cm_witness(a: &CmWitnessArgs) -> Result<Outcome> {
    let field = parse_field_spec(&a.field)?;
    if field.degree() < 2 {
        return Err(Error::Config("the CM field must be a proper extension".into()));
    }
    let tower = SubfieldTower::new(
        vec![NumberField::rationals(), field.clone()],
        vec![Poly::from_int(&[0])],
    )?;
    let mode = a.mode.verdict_mode();
    let (_, report) = cm_bcp_witness(&tower, a.q, mode)?;
    let instance = serde_json::json!({
        "field": field.label(),
        "q": a.q,
        "mode": mode.name(),
    });
    let mut out = Outcome::new(instance, report.to_json());
    out.affirmative = report.verdict.verdict == VerdictKind::ObstructionUnderLeopoldt;
    out.kv.push(("curve".into(), report.curve.clone()));
    out.kv.push(("real subfield".into(), report.real_subfield.clone()));
    out.kv
        .push(("eta minimal polynomial".into(), report.eta_minpoly.display()));
    out.kv
        .push(("totally real".into(), report.totally_real.to_string()));
    out.kv.push((
        "dim / rank".into(),
        format!("{} / {}", report.verdict.dim_t, report.verdict.rank_t),
    ));
    out.kv
        .push(("verdict".into(), report.verdict.verdict.name().to_string()));
    out.csv_headers = vec![
        "curve".into(),
        "eta_degree".into(),
        "totally_real".into(),
        "dim".into(),
        "rank".into(),
        "verdict".into(),
    ];
    out.csv_rows = vec![vec![
        report.curve.clone(),
        report.eta_degree.to_string(),
        report.totally_real.to_string(),
        report.verdict.dim_t.to_string(),
        report.verdict.rank_t.to_string(),
        report.verdict.verdict.name().to_string(),
    ]];
    Ok(out)
}

fn precision_from_env() -> Result<Option<u32>> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<u32>()
            .map(Some)
            .map_err(|_| Error::Config(format!("{PRECISION_ENV} = `{v}` is not a precision"))),
        _ => Ok(None),
    }
}

fn run_sunit(a: &SunitArgs) -> Result<Outcome> {
    let mut s0_raw = a.s0.clone();
    let mut p = a.p;
    let mut n = a.n;
    let mut box_radius = a.box_radius;
    let mut budget = a.budget;
    if let Some(path) = &a.config {
        let cfg = load_config(path)?;
        let b = cfg.single("sieve")?;
        if let Some(f) = b.get("field") {
            let field = parse_field_spec(f)?;
            if field.degree() != 1 {
                return Err(Error::Config(
                    "the S-unit solver works over the rationals".into(),
                ));
            }
        }
        if s0_raw.is_none() {
            s0_raw = b.get("s0").map(str::to_string);
        }
        if p.is_none() && b.get("p").is_some() {
            p = Some(b.u64_value("p")?);
        }
        if n.is_none() && b.get("n").is_some() {
            n = Some(b.u32_value("n")?);
        }
        if box_radius.is_none() && b.get("box_radius").is_some() {
            box_radius = Some(b.u32_value("box_radius")?);
        }
        if budget.is_none() && b.get("budget").is_some() {
            budget = Some(b.u64_value("budget")?);
        }
        if let Some(raw) = b.get("generators") {
            let listed = parse_q_list(raw)?;
            let s0 = parse_s0(s0_raw.as_deref())?;
            let mut canonical = vec![Q::from(Z::from(-1))];
            canonical.extend(s0.primes().map(|g| Q::from(Z::from(g))));
            if listed != canonical {
                return Err(Error::Config(
                    "generators must be the canonical set: -1 and the S0 primes in order".into(),
                ));
            }
        }
    }
    let s0 = parse_s0(s0_raw.as_deref())?;
    let n = match n {
        Some(n) => n,
        None => precision_from_env()?.unwrap_or(10),
    };
    let box_radius = box_radius.unwrap_or(12);
    let budget = budget.map(|b| b as u128).unwrap_or(1 << 20);
    let epsilon = parse_q(&a.epsilon)?;

    if a.sieve_only {
        let p = p.unwrap_or_else(|| chabauty::sieve::default_p(&s0));
        let sieve = skolem_sieve_with(&NumberField::rationals(), &s0, p, n, box_radius, budget)?;
        let instance = serde_json::json!({
            "s0": s0.primes().collect::<Vec<_>>(),
            "p": p, "n": n, "box_radius": box_radius,
        });
        let mut out = Outcome::new(instance, sieve.to_json());
        out.affirmative = sieve.decisive;
        out.kv.push(("confirmed".into(), sieve.confirmed.len().to_string()));
        out.kv.push((
            "surviving classes".into(),
            sieve.surviving_classes.to_string(),
        ));
        out.kv.push((
            "surviving unconfirmed".into(),
            sieve.surviving_unconfirmed.to_string(),
        ));
        out.kv.push(("decisive".into(), sieve.decisive.to_string()));
        out.csv_headers = vec!["x".into(), "y".into()];
        out.csv_rows = sieve
            .confirmed
            .iter()
            .map(|(x, y)| vec![q_string(x), q_string(y)])
            .collect();
        let rows = out.csv_rows.clone();
        out.grids.push(Grid {
            title: "confirmed solutions".into(),
            headers: out.csv_headers.clone(),
            rows,
        });
        return Ok(out);
    }

    let mut config = DeskConfig::new(s0.clone());
    config.q = a.q;
    config.p = p;
    config.n = n;
    config.box_radius = box_radius;
    config.class_budget = budget;
    config.epsilon = epsilon;
    let report = solve_sunit_desk(&config)?;

    let instance = serde_json::json!({
        "s0": report.s0,
        "q": report.q,
        "p": report.p,
        "n": report.n,
        "box_radius": report.box_radius,
    });
    let mut out = Outcome::new(instance, report.to_json());
    out.affirmative = report.status == DeskStatus::Confirmed;
    out.kv.push(("status".into(), report.status.name().to_string()));
    out.kv.push(("q".into(), report.q.to_string()));
    out.kv.push(("p".into(), report.p.to_string()));
    out.kv.push(("solutions".into(), report.solutions.len().to_string()));
    out.kv.push((
        "unconfirmed cosets".into(),
        report.unconfirmed_cosets.to_string(),
    ));
    out.kv.push((
        "sieve classes unconfirmed".into(),
        report.sieve.surviving_unconfirmed.to_string(),
    ));
    let coset_of = |x: &Q| -> String {
        report
            .cosets
            .iter()
            .find(|c| c.solutions.iter().any(|(sx, _)| sx == x))
            .map(|c| c.alpha.to_string())
            .unwrap_or_default()
    };
    out.csv_headers = vec!["x".into(), "y".into(), "coset_alpha".into()];
    out.csv_rows = report
        .solutions
        .iter()
        .map(|(x, y)| vec![q_string(x), q_string(y), coset_of(x)])
        .collect();
    let rows = out.csv_rows.clone();
    out.grids.push(Grid {
        title: "solutions".into(),
        headers: out.csv_headers.clone(),
        rows,
    });
    out.grids.push(Grid {
        title: "cosets".into(),
        headers: vec![
            "alpha".into(),
            "verdict".into(),
            "affirmative".into(),
            "solutions".into(),
        ],
        rows: report
            .cosets
            .iter()
            .map(|c| {
                vec![
                    c.alpha.to_string(),
                    c.verdict.clone(),
                    c.affirmative.to_string(),
                    c.solutions.len().to_string(),
                ]
            })
            .collect(),
    });
    Ok(out)
}

// rendering

/// Scalar JSON values without quotes; everything else compact.
fn plain(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render_table(out: &Outcome) -> String {
    let mut text = String::new();
    for (k, v) in &out.kv {
        text.push_str(&format!("{k}: {v}\n"));
    }
    for g in &out.grids {
        if !text.is_empty() {
            text.push('\n');
        }
        text.push_str(&format!("{}\n", g.title));
        let mut widths: Vec<usize> = g.headers.iter().map(String::len).collect();
        for row in &g.rows {
            for (i, cell) in row.iter().enumerate() {
                widths[i] = widths[i].max(cell.len());
            }
        }
        let line = |cells: &[String]| -> String {
            cells
                .iter()
                .enumerate()
                .map(|(i, c)| format!("{:<w$}", c, w = widths[i]))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        text.push_str(&format!("{}\n", line(&g.headers)));
        text.push_str(&format!(
            "{}\n",
            widths
                .iter()
                .map(|w| "-".repeat(*w))
                .collect::<Vec<_>>()
                .join("  ")
        ));
        for row in &g.rows {
            text.push_str(&format!("{}\n", line(row)));
        }
    }
    if !out.warnings.is_empty() {
        text.push('\n');
        for w in &out.warnings {
            text.push_str(&format!("warning: {w}\n"));
        }
    }
    text
}

fn csv_cell(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_csv(headers: &[String], rows: &[Vec<String>]) -> String {
    let mut text = String::new();
    text.push_str(
        &headers
            .iter()
            .map(|h| csv_cell(h))
            .collect::<Vec<_>>()
            .join(","),
    );
    text.push('\n');
    for row in rows {
        text.push_str(
            &row.iter()
                .map(|c| csv_cell(c))
                .collect::<Vec<_>>()
                .join(","),
        );
        text.push('\n');
    }
    text
}
