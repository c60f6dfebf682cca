//! Command implementations behind the `dsp` binary. Every command returns
//! its rendered output and an exit code so it can be tested without a process.

pub mod census;
pub mod input;

use std::fmt::Write as _;
use std::path::Path;

use dsp_core::blockext::{delta_of_split, enumerate_splits, BlockSplit, ExtReport};
use dsp_core::decider::{verdict, Status, Verdict};
use dsp_core::genericity::{enumerate_relations_bounded, RelationWitness, DEFAULT_GENERICITY_BOUND};
use dsp_core::partitions::{
    corresponding_diagonal, corresponding_jnfs, d_of_jnf, r_of_jnf, Jnf, MultiplicityVector, Partition,
    DEFAULT_JNF_ENUMERATION_BOUND,
};
use dsp_core::witness::{find_tuple, verify, NumericMatrixTuple, RealizationConfig, RealizationReport};
use dsp_core::{Error, Instance};
use serde_json::{json, Value};

pub use input::{load_instance, InputError, InstanceFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;
pub const EXIT_BOUND: i32 = 4;

/// Rendered output of a command together with its exit code.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: EXIT_OK }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Validation(_) | Error::Precondition(_) => EXIT_VALIDATION,
            Error::NotFound(_) => EXIT_UNKNOWN,
            Error::BoundExceeded { .. } => EXIT_BOUND,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: e.to_string(),
        }
    }
}

pub type CliResult = Result<Output, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_VALIDATION,
        message: msg.into(),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn describe_classes(inst: &Instance, out: &mut String) {
    for (j, c) in inst.classes().iter().enumerate() {
        let slots: Vec<String> = c
            .eigenvalues()
            .iter()
            .zip(c.jnf().slots())
            .map(|(v, p)| format!("{v} {p}"))
            .collect();
        writeln!(out, "  class {}: {}", j + 1, slots.join(", ")).unwrap();
    }
}

fn min_relation_text(v: &Verdict) -> String {
    match (v.genericity_known, v.min_relation_n) {
        (false, _) => "unknown (enumeration bound exceeded)".into(),
        (true, Some(k)) => k.to_string(),
        (true, None) => "none (generic)".into(),
    }
}

pub fn verdict_json(inst: &Instance, v: &Verdict) -> Value {
    let dq = &v.derived;
    json!({
        "mode": inst.mode(),
        "n": dq.n,
        "p": inst.p(),
        "d": dq.d,
        "r": dq.r,
        "kappa": dq.kappa,
        "d_sum": dq.d_sum(),
        "trace_sum": dq.trace_sum,
        "trace_ok": dq.trace_ok,
        "convention2": dq.convention2,
        "min_relation_N": v.min_relation_n,
        "genericity_known": v.genericity_known,
        "case_a": v.case_a,
        "rigid_family": v.rigid_family,
        "unknown_flags": v.unknown_flags,
        "verdict": v.status,
        "trace": v.trace.iter().map(|e| json!({
            "rule": e.rule,
            "justification": e.justification,
            "facts": e.facts.iter().map(|(k, val)| json!({"name": k, "value": val})).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn render_verdict(inst: &Instance, v: &Verdict) -> String {
    let dq = &v.derived;
    let mut out = String::new();
    writeln!(out, "mode: {}   n = {}   p = {}", inst.mode(), dq.n, inst.p()).unwrap();
    describe_classes(inst, &mut out);
    writeln!(out, "d = {:?} (sum {})   r = {:?}   kappa = {}", dq.d, dq.d_sum(), dq.r, dq.kappa).unwrap();
    writeln!(
        out,
        "eigenvalue sum = {} (trace condition {})",
        dq.trace_sum,
        if dq.trace_ok { "holds" } else { "fails" }
    )
    .unwrap();
    writeln!(out, "class 1 regular diagonal: {}", yes_no(dq.convention2)).unwrap();
    writeln!(out, "smallest relation size: {}", min_relation_text(v)).unwrap();
    writeln!(
        out,
        "case A shape: {}   rigid family: {}",
        yes_no(v.case_a),
        v.rigid_family.map_or("-".to_string(), |f| f.to_string())
    )
    .unwrap();
    for flag in &v.unknown_flags {
        writeln!(out, "bounded search gave up: {flag}").unwrap();
    }
    writeln!(out, "rules:").unwrap();
    for e in &v.trace {
        writeln!(out, "  [{}] {}", e.rule, e.justification).unwrap();
        for (k, val) in &e.facts {
            writeln!(out, "      {k} = {val}").unwrap();
        }
    }
    writeln!(out, "verdict: {}", v.status).unwrap();
    out
}

pub fn cmd_analyze(path: &Path, as_json: bool) -> CliResult {
    let inst = load_instance(path)?;
    let v = verdict(&inst);
    let text = if as_json {
        pretty(&verdict_json(&inst, &v))
    } else {
        render_verdict(&inst, &v)
    };
    let code = if v.status == Status::Unknown { EXIT_UNKNOWN } else { EXIT_OK };
    Ok(Output { text, code })
}

fn render_relation(inst: &Instance, rel: &RelationWitness) -> String {
    let classes: Vec<String> = rel
        .picks
        .iter()
        .zip(inst.classes())
        .enumerate()
        .map(|(j, (picks, c))| {
            let chosen: Vec<String> = picks
                .iter()
                .zip(c.eigenvalues())
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.to_string() } else { format!("{v} x{k}") })
                .collect();
            format!("class {}: {}", j + 1, chosen.join(", "))
        })
        .collect();
    format!("{}   sum = {}", classes.join(" | "), rel.target)
}

pub fn cmd_genericity(path: &Path, max_n: Option<usize>, as_json: bool) -> CliResult {
    let inst = load_instance(path)?;
    let n = inst.n();
    let top = max_n.unwrap_or(n.saturating_sub(1)).min(n.saturating_sub(1));
    let mut by_size = Vec::new();
    let mut unknown = None;
    for size in 1..=top {
        match enumerate_relations_bounded(&inst, size, DEFAULT_GENERICITY_BOUND) {
            Ok(rels) => by_size.push((size, rels)),
            Err(e @ Error::BoundExceeded { .. }) => {
                unknown = Some(e);
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let min = by_size.iter().find(|(_, r)| !r.is_empty()).map(|(s, _)| *s);
    let complete = unknown.is_none() && top + 1 >= n;
    let summary = match (min, &unknown) {
        (_, Some(e)) => format!("UNKNOWN: {e}"),
        (Some(k), None) => format!("smallest relation size {k}; relations occur only for N >= {k}"),
        (None, None) if complete => format!("generic: no relations for N=1..{}", n.saturating_sub(1)),
        (None, None) => format!("no relations for N=1..{top}"),
    };
    let code = if unknown.is_some() { EXIT_BOUND } else { EXIT_OK };
    if as_json {
        let v = json!({
            "n": n,
            "checked_up_to": by_size.last().map_or(0, |(s, _)| *s),
            "relations": by_size.iter().flat_map(|(_, r)| r.iter()).collect::<Vec<_>>(),
            "min_relation_N": min,
            "generic": complete && min.is_none(),
            "unknown": unknown.as_ref().map(|e| e.to_string()),
            "summary": summary,
        });
        return Ok(Output { text: pretty(&v), code });
    }
    let mut out = String::new();
    for (size, rels) in &by_size {
        if rels.is_empty() {
            writeln!(out, "N = {size}: no relations").unwrap();
            continue;
        }
        let noun = if rels.len() == 1 { "relation" } else { "relations" };
        writeln!(out, "N = {size}: {} {noun}", rels.len()).unwrap();
        for r in rels {
            writeln!(out, "  {}", render_relation(&inst, r)).unwrap();
        }
    }
    writeln!(out, "{summary}").unwrap();
    Ok(Output { text: out, code })
}

#[derive(Clone, Debug)]
pub struct WitnessArgs {
    pub restarts: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_iterations: usize,
    pub require_irreducible: bool,
    pub show_matrices: bool,
    pub json: bool,
}

impl Default for WitnessArgs {
    fn default() -> Self {
        let cfg = RealizationConfig::default();
        WitnessArgs {
            restarts: cfg.restarts,
            tol: cfg.tol_sum,
            seed: cfg.rng_seed,
            max_iterations: cfg.max_iterations,
            require_irreducible: false,
            show_matrices: false,
            json: false,
        }
    }
}

fn matrices_json(t: &NumericMatrixTuple) -> Value {
    Value::Array(
        t.matrices
            .iter()
            .map(|m| {
                Value::Array(
                    (0..m.nrows())
                        .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn render_report(inst: &Instance, t: &NumericMatrixTuple, rep: &RealizationReport, show: bool) -> String {
    let n = inst.n();
    let mut out = String::new();
    if let Some(p) = &rep.provenance {
        writeln!(out, "found at restart {} after {} iterations (seed {})", p.restart, p.iterations, p.seed).unwrap();
    }
    writeln!(out, "residual: {:.3e}", rep.residual).unwrap();
    let dists: Vec<String> = rep.membership_distances.iter().map(|d| format!("{d:.3e}")).collect();
    writeln!(out, "membership distances: [{}]", dists.join(", ")).unwrap();
    writeln!(
        out,
        "membership verified: {}",
        yes_no(rep.membership_ok.iter().all(|&b| b))
    )
    .unwrap();
    writeln!(
        out,
        "algebra dimension: {} of {} ({})",
        rep.algebra_dimension,
        n * n,
        if rep.irreducible(n) { "irreducible" } else { "reducible" }
    )
    .unwrap();
    writeln!(out, "centralizer dimension: {}", rep.centralizer_dimension).unwrap();
    if show {
        for (j, m) in t.matrices.iter().enumerate() {
            writeln!(out, "matrix {}:", j + 1).unwrap();
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols())
                    .map(|k| format!("{:>10.6}{:+.6}i", m[(i, k)].re, m[(i, k)].im))
                    .collect();
                writeln!(out, "  {}", row.join("  ")).unwrap();
            }
        }
    }
    out
}

pub fn cmd_witness(path: &Path, args: &WitnessArgs) -> CliResult {
    let inst = load_instance(path)?;
    let cfg = RealizationConfig {
        restarts: args.restarts,
        tol_sum: args.tol,
        rng_seed: args.seed,
        max_iterations: args.max_iterations,
        require_irreducible: args.require_irreducible,
        ..RealizationConfig::default()
    };
    let t = match find_tuple(&inst, &cfg) {
        Ok(t) => t,
        Err(Error::NotFound(msg)) if args.json => {
            let v = json!({"found": false, "message": msg});
            return Ok(Output {
                text: pretty(&v),
                code: EXIT_UNKNOWN,
            });
        }
        Err(e) => return Err(e.into()),
    };
    let rep = verify(&inst, &t, &cfg);
    let text = if args.json {
        let mut v = serde_json::to_value(&rep).expect("reports serialize");
        v["found"] = json!(true);
        v["n"] = json!(inst.n());
        v["matrices"] = matrices_json(&t);
        pretty(&v)
    } else {
        render_report(&inst, &t, &rep, args.show_matrices)
    };
    Ok(Output::ok(text))
}

pub fn cmd_census(n: usize, p: usize, mode: dsp_core::Mode, out: Option<&Path>) -> CliResult {
    let rows = census::census(n, p, mode)?;
    let mut buf = Vec::new();
    census::write_tsv(&rows, &mut buf).expect("writing to memory");
    match out {
        Some(path) => {
            std::fs::write(path, &buf).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Ok(Output::ok(format!("wrote {} rows to {}\n", rows.len(), path.display())))
        }
        None => Ok(Output::ok(String::from_utf8(buf).expect("TSV is UTF-8"))),
    }
}

fn parse_counts(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("`{t}` is not a non-negative integer")))
        })
        .collect()
}

/// `"2,1;1"` is the JNF with blocks `(2,1)` for one eigenvalue and `(1)` for another.
pub fn parse_jnf(s: &str) -> Result<Jnf, CliError> {
    let slots = s
        .split(';')
        .map(|slot| {
            let parts = parse_counts(slot)?;
            if parts.contains(&0) {
                return Err(usage("Jordan block sizes must be positive"));
            }
            Ok(Partition::new(parts))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Jnf::try_new(slots).map_err(|e| usage(e.to_string()))
}

pub fn parse_mv(s: &str) -> Result<MultiplicityVector, CliError> {
    let mults = parse_counts(s)?;
    if mults.is_empty() || mults.contains(&0) {
        return Err(usage("multiplicities must be positive"));
    }
    Ok(MultiplicityVector::new(mults))
}

pub fn cmd_corresponding(jnf: Option<&str>, mv: Option<&str>) -> CliResult {
    let mut out = String::new();
    match (jnf, mv) {
        (Some(spec), None) => {
            let j = parse_jnf(spec)?;
            if j.size() > DEFAULT_JNF_ENUMERATION_BOUND {
                return Err(Error::BoundExceeded {
                    what: "JNF size",
                    size: j.size(),
                    bound: DEFAULT_JNF_ENUMERATION_BOUND,
                }
                .into());
            }
            let diag = corresponding_diagonal(&j);
            writeln!(out, "JNF {j}: d = {}, r = {}", d_of_jnf(&j), r_of_jnf(&j)).unwrap();
            writeln!(out, "corresponding diagonal JNF: {diag}").unwrap();
        }
        (None, Some(spec)) => {
            let m = parse_mv(spec)?;
            let all = corresponding_jnfs(&m, m.size())?;
            let j = m.to_jnf();
            writeln!(out, "multiplicity vector {m}: d = {}, r = {}", d_of_jnf(&j), r_of_jnf(&j)).unwrap();
            writeln!(out, "{} corresponding JNFs:", all.len()).unwrap();
            for j in all {
                writeln!(out, "  {j}").unwrap();
            }
        }
        _ => return Err(usage("give exactly one of --jnf and --mv")),
    }
    Ok(Output::ok(out))
}

/// `"1,1,0,0;1,1;1,1,0"`: upper-block multiplicity of every eigenvalue, class by class.
pub fn parse_split(s: &str) -> Result<Vec<Vec<usize>>, CliError> {
    s.split(';').map(parse_counts).collect()
}

fn ext_json(sp: &BlockSplit, rep: &ExtReport) -> Value {
    let mut v = serde_json::to_value(rep).expect("reports serialize");
    v["parts"] = json!(sp.parts);
    v
}

fn render_ext(sp: &BlockSplit, rep: &ExtReport) -> String {
    let n = sp.n();
    let mut out = String::new();
    let parts: Vec<String> = sp
        .parts
        .iter()
        .map(|row| row.iter().map(|(a, b)| format!("{a}+{b}")).collect::<Vec<_>>().join(","))
        .collect();
    writeln!(out, "split l = {}, n - l = {}: {}", rep.l, n - rep.l, parts.join(" | ")).unwrap();
    writeln!(out, "s = {:?}   delta = {}", rep.s, rep.delta).unwrap();
    writeln!(
        out,
        "upper block: d = {:?}, r = {:?}, alpha and beta: {}, trace condition: {}",
        rep.d1,
        rep.r1,
        yes_no(rep.upper_alpha_beta),
        yes_no(rep.upper_trace_ok)
    )
    .unwrap();
    writeln!(
        out,
        "lower block: d = {:?}, r = {:?}, alpha and beta: {}, trace condition: {}",
        rep.d2,
        rep.r2,
        yes_no(rep.lower_alpha_beta),
        yes_no(rep.lower_trace_ok)
    )
    .unwrap();
    writeln!(out, "d' = {}   d'' = {}   d''' = {}", rep.dprime, rep.ddprime, rep.dtriple).unwrap();
    writeln!(out, "class 1 separated: {}   case: {}", yes_no(rep.class1_separated), rep.case_tag).unwrap();
    out
}

pub fn cmd_ext1(path: &Path, l: usize, split: Option<&str>, as_json: bool) -> CliResult {
    let inst = load_instance(path)?;
    let splits = match split {
        Some(s) => vec![BlockSplit::new(&inst, &parse_split(s)?)?],
        None => enumerate_splits(&inst, l)?,
    };
    if let Some(sp) = splits.first() {
        if sp.l != l {
            return Err(usage(format!("the split puts {} dimensions in the upper block, not {l}", sp.l)));
        }
    }
    let reports: Vec<(BlockSplit, ExtReport)> = splits
        .into_iter()
        .map(|sp| {
            let rep = delta_of_split(&inst, &sp);
            (sp, rep)
        })
        .collect();
    let text = if as_json {
        let arr: Vec<Value> = reports.iter().map(|(sp, r)| ext_json(sp, r)).collect();
        if split.is_some() {
            pretty(&arr[0])
        } else {
            pretty(&Value::Array(arr))
        }
    } else {
        reports
            .iter()
            .map(|(sp, r)| render_ext(sp, r))
            .collect::<Vec<_>>()
            .join("\n")
    };
    Ok(Output::ok(text))
}
