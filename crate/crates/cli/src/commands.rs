//! One function per subcommand. Each returns the payload, the violation
//! messages and a few human-readable summary lines.

use std::io::Write;
use std::sync::Arc;

use fqrigid::charsum::random::{random_audits, SamplerConfig};
use fqrigid::charsum::{rou_l1_audit, RouAudit, SumAudit, SumKind, Verdict};
use fqrigid::clique::{make_instance, verify_thm_main2, CliqueMode, CliqueOptions, DEFAULT_CLIQUE_MAX_Q};
use fqrigid::directions::{directions_of_function, is_additive, is_frobenius_linear, FrobeniusWitness};
use fqrigid::example::{f25_example, format_u};
use fqrigid::parallel::with_workers;
use fqrigid::search::{
    empirical_margin, find_exceptional_examples, verify_thm_directions_bruteforce, verify_thm_main, SearchOptions,
    DEFAULT_SEARCH_CAP,
};
use fqrigid::{build_field, Element, FieldCtx, FieldSpec, LinearizedMap};
use serde::Serialize;
use serde_json::Value;

use crate::config::*;
use crate::error::CliError;
use crate::report::write_csv;

pub struct Outcome {
    pub payload: Value,
    pub violations: Vec<String>,
    pub summary: Vec<String>,
}

impl Outcome {
    fn new<T: Serialize>(payload: &T, violations: Vec<String>, summary: Vec<String>) -> Result<Self, CliError> {
        Ok(Outcome { payload: serde_json::to_value(payload)?, violations, summary })
    }
}

pub fn execute(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    match &config.command {
        Command::FieldInfo(a) => field_info(a),
        Command::Directions(a) => directions(a),
        Command::Rigidity(a) => rigidity(a, config.jobs),
        Command::DirectionsTheorem(a) => directions_theorem(a),
        Command::Charsum(a) => charsum(&a.audit, config),
        Command::Clique(a) => clique(a, config.jobs),
        Command::ExampleF25(_) => example(),
        Command::Run(_) => Err(CliError::MissingValue { key: "command".into(), command: "run".into() }),
    }
}

fn field(p: &Option<u64>, n: &Option<u32>, command: &str) -> Result<Arc<FieldCtx>, CliError> {
    Ok(build_field(require(p, "p", command)?, require(n, "n", command)?)?)
}

fn elements(field: &FieldCtx, key: &str, list: &U32List) -> Result<Vec<Element>, CliError> {
    list.0
        .iter()
        .map(|&c| {
            field.element(c as u64).map_err(|e| CliError::InvalidValue {
                key: key.into(),
                value: list.to_string(),
                reason: e.to_string(),
            })
        })
        .collect()
}

fn poly_string(coeffs: &[u32]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev().filter(|(_, &c)| c != 0) {
        terms.push(match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => "t".into(),
            (1, c) => format!("{c}t"),
            (i, 1) => format!("t^{i}"),
            (i, c) => format!("{c}t^{i}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

#[derive(Serialize)]
struct ElementRow {
    encoding: u32,
    poly: String,
    log: Option<u32>,
}

#[derive(Serialize)]
struct FieldInfo {
    field: FieldSpec,
    q: u32,
    modulus: String,
    generator: String,
    subfield_degrees: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elements: Option<Vec<ElementRow>>,
}

fn field_info(a: &FieldInfoArgs) -> Result<Outcome, CliError> {
    let f = field(&a.p, &a.n, "field-info")?;
    let spec = f.spec();
    let info = FieldInfo {
        q: f.q(),
        modulus: poly_string(&spec.modulus),
        generator: f.format(f.generator()),
        subfield_degrees: (1..=f.n()).filter(|e| f.n() % e == 0).collect(),
        elements: a.elements.then(|| {
            f.elements().map(|x| ElementRow { encoding: x.0, poly: f.format(x), log: f.log(x).ok() }).collect()
        }),
        field: spec,
    };
    let summary = vec![
        format!("F_{} = F_{}[t]/({})", info.q, f.p(), info.modulus),
        format!("primitive root g = {} (encoding {})", info.generator, info.field.g),
        format!("subfield degrees {:?}", info.subfield_degrees),
    ];
    Outcome::new(&info, Vec::new(), summary)
}

#[derive(Serialize)]
struct DirectionsPayload {
    field: FieldSpec,
    coeffs: Option<Vec<u32>>,
    table: Vec<u32>,
    directions: Vec<u32>,
    direction_count: u32,
    /// `(q+1)/2`, rounded down.
    few_directions_bound: u32,
    few_directions: bool,
    /// `x -> f(x) - f(0)` is additive.
    additive: bool,
    frobenius_linear: Option<FrobeniusWitness>,
}

fn directions(a: &DirectionsArgs) -> Result<Outcome, CliError> {
    let f = field(&a.p, &a.n, "directions")?;
    let (coeffs, table) = match (&a.coeffs, &a.table) {
        (Some(c), None) => {
            let map = LinearizedMap::new(f.clone(), elements(&f, "coeffs", c)?)?;
            (Some(map.coeff_encodings()), map.table())
        }
        (None, Some(t)) => (None, elements(&f, "table", t)?),
        _ => {
            return Err(CliError::InvalidValue {
                key: "coeffs".into(),
                value: String::new(),
                reason: "give exactly one of coeffs and table".into(),
            })
        }
    };
    let dirs = directions_of_function(&f, &table)?;
    let shifted: Vec<Element> = table.iter().map(|&y| f.sub(y, table[0])).collect();
    let bound = f.q().div_ceil(2);
    let payload = DirectionsPayload {
        field: f.spec(),
        coeffs,
        table: table.iter().map(|x| x.0).collect(),
        directions: dirs.slopes().iter().map(|x| x.0).collect(),
        direction_count: dirs.len() as u32,
        few_directions_bound: bound,
        few_directions: dirs.len() as u32 <= bound,
        additive: is_additive(&f, &shifted)?,
        frobenius_linear: is_frobenius_linear(&f, &table)?,
    };
    let mut violations = Vec::new();
    if payload.few_directions && !payload.additive {
        violations
            .push(format!("THEOREM VIOLATION: {} directions but f - f(0) is not additive", payload.direction_count));
    }
    let summary = vec![
        format!("|D_f| = {} (few-directions bound {})", payload.direction_count, bound),
        format!("additive after translation: {}", payload.additive),
        format!(
            "of the form a x^(p^j) + b: {}",
            payload.frobenius_linear.map(|w| format!("a={} j={} b={}", w.a.0, w.j, w.b.0)).unwrap_or("no".into())
        ),
    ];
    Outcome::new(&payload, violations, summary)
}

fn search_options(jobs: Option<usize>, cap: Option<u64>) -> SearchOptions {
    SearchOptions { jobs, cap: cap.unwrap_or(DEFAULT_SEARCH_CAP) }
}

fn rigidity(a: &RigidityArgs, jobs: Option<usize>) -> Result<Outcome, CliError> {
    let cmd = "rigidity";
    let opts = search_options(jobs, a.cap);
    let n = require(&a.n, "n", cmd)?;
    if a.exceptional && a.margin {
        return Err(CliError::InvalidValue {
            key: "margin".into(),
            value: "true".into(),
            reason: "cannot be combined with exceptional".into(),
        });
    }
    if a.exceptional {
        let p = require(&a.p, "p", cmd)?;
        let indices = match (&a.indices, a.d) {
            (Some(list), _) => list.0.clone(),
            (None, Some(d)) => vec![d],
            (None, None) => return Err(CliError::MissingValue { key: "indices".into(), command: cmd.into() }),
        };
        let r_max = require(&a.r_max, "r-max", cmd)?;
        let examples = find_exceptional_examples(p, n, &indices, r_max, &opts)?;
        let violations: Vec<String> = examples
            .iter()
            .filter(|e| e.is_violation())
            .map(|e| format!("THEOREM VIOLATION: exceptional map {:?} inside d={} M={:?}", e.coeffs, e.d, e.cosets.m))
            .collect();
        let summary = vec![
            format!("F_{}^{}: indices {:?}, at most {} cosets", p, n, indices, r_max),
            format!("{} exceptional maps (up to scaling)", examples.len()),
        ];
        let payload = serde_json::json!({ "p": p, "n": n, "indices": indices, "r_max": r_max, "examples": examples });
        return Outcome::new(&payload, violations, summary);
    }
    let d = require(&a.d, "d", cmd)?;
    if a.margin {
        let r = match (a.r_max, &a.cosets) {
            (Some(r), _) => r,
            (None, Some(c)) => c.0.len() as u32,
            (None, None) => return Err(CliError::MissingValue { key: "r-max".into(), command: cmd.into() }),
        };
        let p_max = require(&a.p_max, "p-max", cmd)?;
        let report = empirical_margin(n, d, r, p_max, &opts)?;
        let summary = vec![
            format!("n={} d={} r={}: threshold p >= {:.2}", n, d, r, report.threshold),
            format!("{} primes scanned up to {}", report.rows.len(), p_max),
            format!("largest prime with an exceptional map: {:?}", report.largest_exceptional_p),
        ];
        return Outcome::new(&report, Vec::new(), summary);
    }
    let p = require(&a.p, "p", cmd)?;
    let cosets = require(&a.cosets, "cosets", cmd)?;
    let report = verify_thm_main(p, n, d, &cosets.0, &opts)?;
    let summary = vec![
        format!("F_{}: d={} M={:?}, |D|={}", report.q, d, report.cosets, report.hypotheses.set_size),
        format!(
            "prime bound {} (threshold {})",
            report.hypotheses.p_bound,
            report.hypotheses.p_bound_threshold.map(|t| format!("{t:.2}")).unwrap_or("n/a".into())
        ),
        format!(
            "{} maps searched, {} survivors, {} exceptional",
            report.search_space, report.survivor_count, report.exceptional_count
        ),
    ];
    let violations = report.violations.clone();
    Outcome::new(&report, violations, summary)
}

fn directions_theorem(a: &TheoremArgs) -> Result<Outcome, CliError> {
    let q = require(&a.q, "q", "directions-theorem")?;
    let report = verify_thm_directions_bruteforce(q, a.cap.unwrap_or(DEFAULT_SEARCH_CAP))?;
    let violations = if report.violations > 0 {
        vec![format!("THEOREM VIOLATION: {} non-additive functions with few directions", report.violations)]
    } else {
        Vec::new()
    };
    let summary = vec![
        format!("q={}: {} functions with f(0)=0", q, report.functions),
        format!(
            "{} with at most {} directions, {} of them additive",
            report.small_direction_count, report.bound, report.additive_count
        ),
    ];
    Outcome::new(&report, violations, summary)
}

#[derive(Serialize)]
struct SumRow {
    kind: &'static str,
    p: u32,
    n: u32,
    d: u32,
    powers: String,
    inputs: String,
    hypotheses_hold: bool,
    re: f64,
    im: f64,
    abs: f64,
    bound: f64,
    margin: f64,
    verdict: Verdict,
}

impl From<&SumAudit> for SumRow {
    fn from(s: &SumAudit) -> Self {
        SumRow {
            kind: s.kind.name(),
            p: s.p,
            n: s.n,
            d: s.d,
            powers: s.powers.iter().map(u32::to_string).collect::<Vec<_>>().join(";"),
            inputs: s.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";"),
            hypotheses_hold: s.hypotheses_hold(),
            re: s.re,
            im: s.im,
            abs: s.abs,
            bound: s.bound,
            margin: s.margin,
            verdict: s.verdict,
        }
    }
}

#[derive(Serialize)]
struct RouRow {
    d: u32,
    m: String,
    r: u32,
    l1: f64,
    l1_bound: f64,
    l2: f64,
    l2_expected: u64,
    passed: bool,
}

impl From<&RouAudit> for RouRow {
    fn from(a: &RouAudit) -> Self {
        RouRow {
            d: a.d,
            m: a.m.iter().map(u32::to_string).collect::<Vec<_>>().join(";"),
            r: a.r,
            l1: a.l1,
            l1_bound: a.l1_bound,
            l2: a.l2,
            l2_expected: a.l2_expected,
            passed: a.passed(),
        }
    }
}

const ROU_DEFAULT_MAX_D: u32 = 10;

fn all_exponent_sets(d: u32) -> impl Iterator<Item = Vec<u32>> {
    (1u32..1 << d).map(move |mask| (0..d).filter(|i| mask >> i & 1 == 1).collect())
}

fn charsum(a: &AuditArgs, config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mode = require(&a.mode, "mode", "charsum")?;
    if mode == AuditMode::Rou {
        let audits: Vec<RouAudit> = match (a.d, &a.cosets) {
            (Some(d), Some(m)) => vec![rou_l1_audit(d, &m.0)?],
            (Some(d), None) => all_exponent_sets(d).map(|m| rou_l1_audit(d, &m)).collect::<Result<_, _>>()?,
            (None, None) => (1..=ROU_DEFAULT_MAX_D)
                .flat_map(all_exponent_sets_with_d)
                .map(|(d, m)| rou_l1_audit(d, &m))
                .collect::<Result<_, _>>()?,
            (None, Some(_)) => return Err(CliError::MissingValue { key: "d".into(), command: "charsum".into() }),
        };
        let failed: Vec<String> = audits
            .iter()
            .filter(|x| !x.passed())
            .map(|x| format!("BOUND VIOLATION: d={} M={:?} L1={} L2={}", x.d, x.m, x.l1, x.l2))
            .collect();
        if let Some(path) = &config.csv {
            write_csv(&audits.iter().map(RouRow::from).collect::<Vec<_>>(), path)?;
        }
        let summary = vec![format!("{} exponent sets audited, {} failed", audits.len(), failed.len())];
        let payload =
            serde_json::json!({ "mode": "rou", "count": audits.len(), "failed": failed.len(), "audits": audits });
        return Outcome::new(&payload, failed, summary);
    }
    let kind = match mode {
        AuditMode::Weil => SumKind::Weil,
        AuditMode::Cor22 => SumKind::Quotient,
        AuditMode::Cor23 => SumKind::SubfieldQuotient,
        AuditMode::Rou => unreachable!("handled above"),
    };
    let defaults = SamplerConfig::default();
    let cfg = SamplerConfig {
        max_p: a.max_p.unwrap_or(defaults.max_p),
        max_n: a.max_n.unwrap_or(defaults.max_n),
        max_q: a.max_q.unwrap_or(defaults.max_q),
    };
    let count = a.count.unwrap_or(100);
    let seed = a.seed.unwrap_or(0);
    let audits = with_workers(config.jobs, || random_audits(kind, count, seed, &cfg))??;
    let tally = |v: Verdict| audits.iter().filter(|s| s.verdict == v).count();
    let (pass, fail, na) = (tally(Verdict::Pass), tally(Verdict::Fail), tally(Verdict::NotApplicable));
    let min_margin = audits
        .iter()
        .filter(|s| s.verdict != Verdict::NotApplicable)
        .map(|s| s.margin)
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.min(x))));
    let violations: Vec<String> = audits
        .iter()
        .filter(|s| s.verdict == Verdict::Fail)
        .map(|s| format!("BOUND VIOLATION: {} sum over F_{}^{} |S|={} > {}", s.kind.name(), s.p, s.n, s.abs, s.bound))
        .collect();
    if let Some(path) = &config.csv {
        write_csv(&audits.iter().map(SumRow::from).collect::<Vec<_>>(), path)?;
    }
    let summary = vec![
        format!("{} {} sums (seed {})", audits.len(), kind.name(), seed),
        format!("pass {pass}, fail {fail}, not applicable {na}"),
        format!("smallest margin {}", min_margin.map(|m| format!("{m:.6}")).unwrap_or("n/a".into())),
    ];
    let payload = serde_json::json!({
        "mode": kind.name(),
        "count": audits.len(),
        "seed": seed,
        "pass": pass,
        "fail": fail,
        "not_applicable": na,
        "min_margin": min_margin,
        "audits": audits,
    });
    Outcome::new(&payload, violations, summary)
}

fn all_exponent_sets_with_d(d: u32) -> impl Iterator<Item = (u32, Vec<u32>)> {
    all_exponent_sets(d).map(move |m| (d, m))
}

fn clique(a: &CliqueArgs, jobs: Option<usize>) -> Result<Outcome, CliError> {
    let cmd = "clique";
    let inst = make_instance(
        require(&a.p, "p", cmd)?,
        require(&a.n, "n", cmd)?,
        require(&a.d, "d", cmd)?,
        &require(&a.cosets, "cosets", cmd)?.0,
    )?;
    let mode = match a.mode.unwrap_or(CliqueModeArg::Verify) {
        CliqueModeArg::Verify => CliqueMode::Verify,
        CliqueModeArg::Catalog => CliqueMode::Catalog,
    };
    let opts = CliqueOptions { jobs, max_q: a.max_q.unwrap_or(DEFAULT_CLIQUE_MAX_Q) };
    let report = verify_thm_main2(&inst, mode, &opts)?;
    if let Some(path) = &a.edges {
        let io = |source| CliError::Io { path: path.clone(), source };
        let mut w = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        for (x, y) in inst.edges() {
            writeln!(w, "{x} {y}").map_err(io)?;
        }
        w.flush().map_err(io)?;
    }
    let summary = vec![
        format!(
            "Cay(F_{}, S): d={} M={:?}, governing {:?}, mode {:?}",
            report.q * report.q,
            report.d,
            report.cosets,
            report.governing,
            report.mode
        ),
        format!(
            "{} cliques of size {} through 0 and 1, {} other than F_q",
            report.cliques.len(),
            report.q,
            report.exceptions.len()
        ),
        format!("{} search nodes over {} candidates", report.stats.nodes, report.stats.candidates),
    ];
    let violations = report.violations.clone();
    Outcome::new(&report, violations, summary)
}

fn example() -> Result<Outcome, CliError> {
    let ex = f25_example()?;
    let mut violations = Vec::new();
    if !ex.directions_inside {
        violations.push("REPRODUCTION FAILURE: a direction lies outside the three cosets".into());
    }
    if ex.frobenius_linear {
        violations.push("REPRODUCTION FAILURE: x + u x^5 came out Frobenius-linear".into());
    }
    let fmt = |v: &[(u32, u32)]| v.iter().map(|&c| format_u(c)).collect::<Vec<_>>().join(", ");
    let summary = vec![
        format!("f(x) = x + u x^5 on F_25, u^2 = 2 (u has encoding {})", ex.u),
        format!("fourth powers: {}", fmt(&ex.fourth_powers)),
        format!("directions ({}): {}", ex.direction_count, fmt(&ex.directions)),
        format!(
            "inside uH + (1+u)H + (1-u)H: {}; Frobenius-linear: {}; prime bound: {}",
            ex.directions_inside, ex.frobenius_linear, ex.p_bound
        ),
    ];
    let mut payload = serde_json::to_value(&ex)?;
    payload["directions_formatted"] = ex.directions.iter().map(|&c| Value::from(format_u(c))).collect();
    payload["fourth_powers_formatted"] = ex.fourth_powers.iter().map(|&c| Value::from(format_u(c))).collect();
    Outcome::new(&payload, violations, summary)
}
