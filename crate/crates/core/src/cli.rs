//! The `hypexp` command line.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cyclo::{p_adic_ord, QRational};
use crate::field::{build_field, FieldElement, FiniteField, Psi};
use crate::fingerprint::{candidate_tables, identify};
use crate::kubert::{
    check_corollary, check_criterion, check_lemma_bound, duplication_check, kubert_v, reflection_check,
    search_candidates, QZElement, Verdict,
};
use crate::sheaf::{
    convolution_table, determinant_sign, eigenvalue_sum_matches_trace, frob_zero_eigenvalues,
    frobenius_trace_sequence, gauss_sum, induced_pushforward_table, match_up_to_translate_twist,
    multiplicative_order, random_control_table, trace_f, trace_h, trace_h_table, InducedCase, SheafParams,
};

#[derive(Debug, Parser)]
#[command(name = "hypexp", version, about = "Exact trace functions and finite-monodromy checks for H(psi, N, D)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Character-table directory (overrides HYPEXP_DATA_DIR)
    #[arg(long, global = true)]
    pub data_dir: Option<PathBuf>,
    /// Worker threads for parallel scans (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Seed for randomized negative controls
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct SheafArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long = "N")]
    pub n: u64,
    #[arg(long = "D")]
    pub d: u64,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Point as an integer (prime-field points)
    #[arg(long, allow_negative_numbers = true, conflicts_with = "t_exp")]
    pub t: Option<i64>,
    /// Point as g^k for the field generator g
    #[arg(long = "t-exp")]
    pub t_exp: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace of H at one point, or the whole table over K^x
    Trace {
        #[command(flatten)]
        sheaf: SheafArgs,
        /// Field degree
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[command(flatten)]
        point: PointArgs,
        /// Evaluate F (the Kummer pullback) instead of H at the point
        #[arg(long)]
        pullback: bool,
    },
    /// Normalized traces of H at t over the tower GF(p^(rk)), k = 1..kmax
    Frobenius {
        #[command(flatten)]
        sheaf: SheafArgs,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 7)]
        kmax: u32,
    },
    /// V(Nx) + V(-Dx) + V(x) >= 1 for all x of level <= rmax
    VCheck {
        #[command(flatten)]
        sheaf: SheafArgs,
        #[arg(long, default_value_t = 11)]
        rmax: u32,
    },
    /// The digit-sum lemma bound and its corollary, exhaustively
    LemmaCheck {
        #[arg(long, default_value_t = 13)]
        rmax: u32,
        /// Level bound for the corollary (defaults to rmax - 1)
        #[arg(long)]
        corollary_rmax: Option<u32>,
    },
    /// All admissible (N, D) that pass the criterion up to rmax
    Search {
        #[arg(long)]
        p: u32,
        #[arg(long = "N", default_value_t = 30)]
        n_max: u64,
        #[arg(long = "D", default_value_t = 10)]
        d_max: u64,
        #[arg(long, default_value_t = 8)]
        rmax: u32,
    },
    /// Frobenius eigenvalues at 0 and the determinant sign
    Det {
        #[command(flatten)]
        sheaf: SheafArgs,
        /// Field degree (defaults to the order of p mod N)
        #[arg(long)]
        r: Option<u32>,
    },
    /// Check trace_H = -(A0 * B0) pointwise on K^x
    VerifyConvolution {
        #[command(flatten)]
        sheaf: SheafArgs,
        #[arg(long)]
        r: u32,
    },
    /// Which candidate groups admit an element with the given trace sequence
    Identify {
        /// Comma-separated integers; read as a JSON array from stdin if absent
        #[arg(long, allow_hyphen_values = true)]
        seq: Option<String>,
    },
    /// Run the property suite
    Selftest,
}

/// Outcome of a command: the report and whether it found a violation.
struct Outcome {
    report: String,
    violation: bool,
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

type CmdResult = Result<Outcome, Usage>;

fn json_report(v: &impl Serialize, violation: bool) -> CmdResult {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(Outcome { report: s, violation })
}

fn params(a: &SheafArgs) -> Result<SheafParams, Usage> {
    Ok(SheafParams::new(a.p, a.n, a.d)?)
}

fn point(k: &FiniteField, a: &PointArgs) -> Result<Option<FieldElement>, Usage> {
    match (a.t, a.t_exp) {
        (Some(t), _) => Ok(Some(k.from_int(t))),
        (None, Some(e)) => Ok(Some(k.exp(e))),
        (None, None) => Ok(None),
    }
}

/// Integers as JSON numbers, other rationals as "a/b".
fn rational_json(x: &QRational) -> Value {
    if x.is_integer() {
        json!(x.to_integer())
    } else {
        json!(format!("{}/{}", x.numer(), x.denom()))
    }
}

fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn cmd_trace(sheaf: &SheafArgs, r: u32, pt: &PointArgs, pullback: bool, fmt: Format) -> CmdResult {
    let params = params(sheaf)?;
    let k = build_field(params.p(), r, None)?;
    match point(&k, pt)? {
        Some(t) => {
            if fmt == Format::Csv {
                return Err(Usage("csv output is only available for whole tables".into()));
            }
            let v = if pullback { trace_f(&k, &params, t)? } else { trace_h(&k, &params, t)? };
            let report = json!({
                "p": params.p(), "N": params.N(), "D": params.D(), "r": r,
                "kind": if pullback { "f" } else { "h" },
                "t": t.index(),
                "counts": v.counts(),
                "integer": v.to_exact_integer().ok(),
            });
            json_report(&report, false)
        }
        None => {
            if pullback {
                return Err(Usage("--pullback needs a point".into()));
            }
            let table = trace_h_table(&k, &params, Psi::STANDARD)?;
            match fmt {
                Format::Csv => Ok(Outcome { report: table.to_csv(), violation: false }),
                Format::Json => json_report(&table.to_json(), false),
            }
        }
    }
}

fn cmd_frobenius(sheaf: &SheafArgs, r: u32, pt: &PointArgs, kmax: u32) -> CmdResult {
    let params = params(sheaf)?;
    let base = build_field(params.p(), r, None)?;
    let t = point(&base, pt)?.ok_or_else(|| Usage("a point --t or --t-exp is required".into()))?;
    let seq = frobenius_trace_sequence(&params, &base, t, kmax)?;
    let v: Vec<Value> = seq.iter().map(rational_json).collect();
    let mut s = serde_json::to_string(&v)?;
    s.push('\n');
    Ok(Outcome { report: s, violation: false })
}

fn cmd_v_check(sheaf: &SheafArgs, rmax: u32) -> CmdResult {
    let params = params(sheaf)?;
    let report = check_criterion(params.p(), params.N(), params.D(), rmax)?;
    json_report(&report, report.verdict == Verdict::Fail)
}

fn cmd_lemma_check(rmax: u32, corollary_rmax: Option<u32>) -> CmdResult {
    let cr = corollary_rmax.unwrap_or(rmax.saturating_sub(1).max(1));
    let lemma = check_lemma_bound(rmax)?;
    let corollary = check_corollary(cr)?;
    let violation = !lemma.is_empty() || !corollary.is_empty();
    let report = json!({
        "lemma": {"r_max": rmax, "violations": lemma},
        "corollary": {"r_max": cr, "violations": corollary},
        "verdict": if violation { "fail" } else { "pass" },
    });
    json_report(&report, violation)
}

fn cmd_det(sheaf: &SheafArgs, r: Option<u32>) -> CmdResult {
    let params = params(sheaf)?;
    let d = match r {
        Some(d) => d,
        None => multiplicative_order(params.p() as u64, params.N()).ok_or(Usage("gcd(ND,p)=1 violated".into()))?,
    };
    let list = frob_zero_eigenvalues(&params, d)?;
    let sign = determinant_sign(&params);
    let product = list.product();
    let sum_ok = eigenvalue_sum_matches_trace(&list)?;
    let unit = list.values.iter().all(|v| (v.complex().norm() - 1.0).abs() < 1e-9);
    let sign_ok = match sign.as_int() {
        Some(s) => (product - Complex64::new(s as f64, 0.0)).norm() < 1e-6,
        None => true,
    };
    let eigen: Vec<Value> = list
        .values
        .iter()
        .map(|v| {
            let z = v.complex();
            json!({"re": z.re, "im": z.im, "exactly_one": v.is_exactly_one()})
        })
        .collect();
    let report = json!({
        "p": params.p(), "N": params.N(), "D": params.D(), "d": d,
        "eigenvalues": eigen,
        "product": complex_json(product),
        "determinant_sign": sign,
        "sum_matches_trace": sum_ok,
        "unit_modulus": unit,
        "product_matches_sign": sign_ok,
    });
    json_report(&report, !(sum_ok && unit && sign_ok))
}

fn cmd_verify_convolution(sheaf: &SheafArgs, r: u32) -> CmdResult {
    let params = params(sheaf)?;
    let k = build_field(params.p(), r, None)?;
    let h = trace_h_table(&k, &params, Psi::STANDARD)?;
    let c = convolution_table(&k, &params)?;
    let mismatches: Vec<u64> =
        (0..k.group_order()).filter(|&l| h.at_log(l) != c.at_log(l)).collect();
    let report = json!({
        "p": params.p(), "N": params.N(), "D": params.D(), "r": r,
        "points": k.group_order(),
        "mismatches": mismatches.iter().map(|l| format!("g^{l}")).collect::<Vec<_>>(),
        "verdict": if mismatches.is_empty() { "pass" } else { "fail" },
    });
    json_report(&report, !mismatches.is_empty())
}

fn parse_sequence(text: &str) -> Result<Vec<i64>, Usage> {
    let text = text.trim();
    if text.starts_with('[') {
        let v: Vec<Value> = serde_json::from_str(text)?;
        return v
            .iter()
            .map(|x| x.as_i64().ok_or_else(|| Usage(format!("sequence entry {x} is not an integer"))))
            .collect();
    }
    text.split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| Usage(format!("sequence entry {s:?} is not an integer"))))
        .collect()
}

fn cmd_identify(text: &str, common: &Common) -> CmdResult {
    let seq = parse_sequence(text)?;
    if seq.is_empty() || seq.len() > 7 {
        return Err(Usage("the sequence must have between 1 and 7 entries".into()));
    }
    let tables = candidate_tables(common.data_dir.as_deref())?;
    json_report(&identify(&tables, &seq), false)
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
}

fn selftest_checks(seed: u64) -> Result<Vec<Check>, Usage> {
    let mut out = Vec::new();
    let mut push = |name, pass| out.push(Check { name, pass });

    push("V reflection, levels <= 6", reflection_check(3, 6)?.is_empty());
    push("V duplication, levels <= 6", duplication_check(3, 6)?.is_empty());

    let mut stickelberger = true;
    for r in 1..=2 {
        let k = build_field(3, r, None)?;
        for e in 0..k.group_order() {
            let v = kubert_v(&QZElement::new(3, r, e as i128));
            stickelberger &= p_adic_ord(&gauss_sum(&k, e, Psi::STANDARD), &k)? == v;
        }
    }
    push("Stickelberger over GF(3), GF(9)", stickelberger);

    let mut weil = true;
    for r in 2..=3 {
        let k = build_field(3, r, None)?;
        for e in 1..k.group_order() {
            weil &= (gauss_sum(&k, e, Psi::STANDARD).complex_embed().norm() - (k.q() as f64).sqrt()).abs() < 1e-9;
        }
    }
    push("Gauss sum moduli over GF(9), GF(27)", weil);

    let params = SheafParams::new(3, 23, 4)?;
    let k = build_field(3, 3, None)?;
    let mut pullback = true;
    let mut rational = true;
    for l in 0..k.group_order() {
        let u = k.exp(l);
        let h = trace_h(&k, &params, u)?;
        rational &= h.to_exact_integer().is_ok();
        pullback &= trace_f(&k, &params, u)? == trace_h(&k, &params, k.pow(u, 23))?;
    }
    push("pullback identity on GF(27), (3,23,4)", pullback);
    push("rational traces on GF(27), (3,23,4)", rational);

    let small = SheafParams::new(3, 5, 2)?;
    let k81 = build_field(3, 4, None)?;
    let h = trace_h_table(&k81, &small, Psi::STANDARD)?;
    let conv = convolution_table(&k81, &small)?;
    push("convolution identity on GF(81), (3,5,2)", h.by_log == conv.by_log);

    let h7 = trace_h_table(&k81, &SheafParams::new(3, 7, 4)?, Psi::STANDARD)?;
    let push_table = induced_pushforward_table(&k81, InducedCase::D4a, 3)?;
    push("induced D=4 pushforward matches, (3,7,4)", match_up_to_translate_twist(&push_table, &h7).is_some());
    let control = random_control_table(&h7.header, seed);
    push("random control does not match", match_up_to_translate_twist(&control, &h7).is_none());

    push("criterion passes for (3,5,2) up to level 8", check_criterion(3, 5, 2, 8)?.verdict == Verdict::Pass);
    push("lemma bound up to level 10", check_lemma_bound(10)?.is_empty());

    let tables = crate::fingerprint::bundled_tables();
    push("identify (0,-2,0,2,0,-2,7) gives Co2", identify(&tables, &[0, -2, 0, 2, 0, -2, 7]).survivors() == ["Co2"]);
    Ok(out)
}

fn cmd_selftest(seed: u64) -> CmdResult {
    let checks = selftest_checks(seed)?;
    let failed = checks.iter().any(|c| !c.pass);
    json_report(&json!({"checks": checks, "verdict": if failed { "fail" } else { "pass" }}), failed)
}

fn dispatch(cli: &Cli, input: &str) -> CmdResult {
    let c = &cli.common;
    if c.format == Format::Csv && !matches!(cli.command, Command::Trace { .. }) {
        return Err(Usage("csv output is only available for trace tables".into()));
    }
    match &cli.command {
        Command::Trace { sheaf, r, point, pullback } => cmd_trace(sheaf, *r, point, *pullback, c.format),
        Command::Frobenius { sheaf, r, point, kmax } => cmd_frobenius(sheaf, *r, point, *kmax),
        Command::VCheck { sheaf, rmax } => cmd_v_check(sheaf, *rmax),
        Command::LemmaCheck { rmax, corollary_rmax } => cmd_lemma_check(*rmax, *corollary_rmax),
        Command::Search { p, n_max, d_max, rmax } => json_report(&search_candidates(*p, *n_max, *d_max, *rmax)?, false),
        Command::Det { sheaf, r } => cmd_det(sheaf, *r),
        Command::VerifyConvolution { sheaf, r } => cmd_verify_convolution(sheaf, *r),
        Command::Identify { seq } => cmd_identify(seq.as_deref().unwrap_or(input), c),
        Command::Selftest => cmd_selftest(c.seed),
    }
}

/// Runs the CLI on `args`; returns the exit status (0 success, 1 violation
/// found, 2 usage error).
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.common.workers).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    let mut input = String::new();
    if matches!(cli.command, Command::Identify { seq: None }) {
        if let Err(e) = stdin.read_to_string(&mut input) {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    }
    let outcome = match pool.install(|| dispatch(&cli, &input)) {
        Ok(o) => o,
        Err(Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return 2;
        }
    };
    let written = match &cli.common.out {
        Some(path) => write_report(path, &outcome.report, &args),
        None => stdout.write_all(outcome.report.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return 2;
    }
    if outcome.violation {
        1
    } else {
        0
    }
}

/// The report goes to `path`; the invocation goes to a `.meta.json` sidecar.
fn write_report(path: &std::path::Path, report: &str, args: &[std::ffi::OsString]) -> Result<(), String> {
    std::fs::write(path, report).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut meta_path = path.as_os_str().to_owned();
    meta_path.push(".meta.json");
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "args": args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&meta).map_err(|e| e.to_string())? + "\n";
    std::fs::write(&meta_path, text).map_err(|e| format!("{}: {e}", PathBuf::from(&meta_path).display()))
}
