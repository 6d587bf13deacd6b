use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use qadic_core::bimodule::verify_theorem_with_precision;
use qadic_core::l2grid::{verify_intertwining, GridFunction, SampleStyle};
use qadic_core::qalgebra::{truncate_matrix, ExactCoeff, ExactVector, QElement};
use qadic_core::wold::{build_extension_unitary, MonomialIsometry};
use serde_json::{json, Value};

use crate::config::{Command, Format, RunConfig};
use crate::parser::parse_element;
use crate::report::{CaseEcho, CaseResult, DualityCase, DualityReport, GridInfo, Tolerances, INTERTWINING_TOLERANCE};
use crate::CliError;

/// What a command produced, in every format it supports.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub text: String,
    pub json: Value,
    pub csv: Option<String>,
    pub default_format: Format,
    /// 0 for success or equality, 1 for inequality or a failed check.
    pub status: i32,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output { text, json, csv: None, default_format: Format::Text, status: 0 }
    }

    pub fn render(&self, format: Option<Format>) -> Result<String, CliError> {
        Ok(match format.unwrap_or(self.default_format) {
            Format::Text => self.text.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("report values serialize") + "\n",
            Format::Csv => self.csv.clone().ok_or_else(|| CliError::Usage("this command has no CSV output".into()))?,
        })
    }
}

fn element(src: &str) -> Result<QElement, CliError> {
    parse_element(src).map_err(|error| CliError::Parse { input: src.to_string(), error })
}

/// Evaluation can exceed the supported residue levels (say `(s^30)^3`);
/// that surfaces as a precondition failure, not a crash.
fn guarded<T>(what: &str, f: impl FnOnce() -> T + std::panic::UnwindSafe) -> Result<T, CliError> {
    std::panic::catch_unwind(f).map_err(|payload| {
        let msg = payload
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "unknown failure".into());
        CliError::Precondition(format!("{what}: {msg}"))
    })
}

fn parse_checked(src: &str) -> Result<QElement, CliError> {
    let owned = src.to_string();
    guarded("evaluation", move || element(&owned))?
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_coeff(c: &ExactCoeff) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => fmt_rational(&c.re),
        (true, false) => format!("{} i", fmt_rational(&c.im)),
        (false, false) => {
            let sign = if c.im < BigRational::zero() { '-' } else { '+' };
            format!("{} {sign} {} i", fmt_rational(&c.re), fmt_rational(&c.im.abs()))
        }
    }
}

fn vector_json(v: &ExactVector) -> Value {
    Value::Array(
        v.iter().map(|(n, c)| json!({"index": n, "re": fmt_rational(&c.re), "im": fmt_rational(&c.im)})).collect(),
    )
}

fn vector_text(v: &ExactVector) -> String {
    if v.is_empty() {
        return "0".into();
    }
    v.iter()
        .map(|(n, c)| if c.is_one() { format!("e_{n}") } else { format!("({}) e_{n}", fmt_coeff(c)) })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn element_output(input: &str, e: &QElement) -> Output {
    let canonical = e.to_string();
    let json = json!({"input": input, "canonical": canonical, "element": e.to_record()});
    Output::new(canonical + "\n", json)
}

pub fn normalize(src: &str) -> Result<Output, CliError> {
    Ok(element_output(src, &parse_checked(src)?))
}

pub fn eq(lhs: &str, rhs: &str) -> Result<Output, CliError> {
    let (a, b) = (parse_checked(lhs)?, parse_checked(rhs)?);
    let equal = a.equals(&b);
    let json = json!({"equal": equal, "lhs": a.to_string(), "rhs": b.to_string()});
    let text = if equal { "equal\n".to_string() } else { format!("not equal: {a} vs {b}\n") };
    Ok(Output { status: i32::from(!equal), ..Output::new(text, json) })
}

pub fn apply(src: &str, basis: i64) -> Result<Output, CliError> {
    let e = parse_checked(src)?;
    let unit: ExactCoeff = Complex::new(BigRational::one(), BigRational::zero());
    let image = guarded("apply", move || e.lambda2_apply_exact(&ExactVector::from([(basis, unit)])))?
        .expect("parsed elements are exact");
    let json = json!({"basis": basis, "image": vector_json(&image)});
    let mut csv = String::from("index,re,im\n");
    for (n, c) in &image {
        csv += &format!("{n},{},{}\n", fmt_rational(&c.re), fmt_rational(&c.im));
    }
    Ok(Output { csv: Some(csv), ..Output::new(vector_text(&image) + "\n", json) })
}

pub fn expect(src: &str) -> Result<Output, CliError> {
    let e = parse_checked(src)?;
    Ok(element_output(src, &e.cond_expectation()))
}

pub fn matrix(src: &str, cfg: &RunConfig) -> Result<Output, CliError> {
    let e = parse_checked(src)?;
    let window = cfg.window;
    let m = guarded("matrix", move || truncate_matrix(&e, window))?;
    let mut csv = String::from("row,col,re,im\n");
    for (r, c, v) in &m.entries {
        csv += &format!("{r},{c},{:?},{:?}\n", v.re, v.im);
    }
    let entries: Vec<Value> = m.entries.iter().map(|(r, c, v)| json!([r, c, v.re, v.im])).collect();
    let json = json!({"window": m.window, "boundary_loss": m.boundary_loss, "entries": entries});
    if m.boundary_loss {
        eprintln!("warning: some basis vectors in the window map outside it; those entries are dropped");
    }
    Ok(Output { csv: Some(csv.clone()), default_format: Format::Csv, ..Output::new(csv, json) })
}

pub fn wold(s0: &str, s1: &str, cfg: &RunConfig) -> Result<Output, CliError> {
    let precondition = |e: qadic_core::wold::WoldError| CliError::Precondition(e.to_string());
    let a = MonomialIsometry::from_element(&parse_checked(s0)?).map_err(precondition)?;
    let b = MonomialIsometry::from_element(&parse_checked(s1)?).map_err(precondition)?;
    let u = build_extension_unitary(a, b, cfg.window).map_err(precondition)?;
    let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
    let mut text = String::new();
    let mut csv = String::from("n,index,re,im\n");
    for (n, image) in &u.table {
        text += &format!("U e_{n} = {}\n", vector_text(image));
        for (m, c) in image {
            csv += &format!("{n},{m},{},{}\n", fmt_rational(&c.re), fmt_rational(&c.im));
        }
    }
    text += &format!("check U S0 = S1: {}\n", mark(u.u1_holds));
    text += &format!("check S0 U = U^2 S0: {}\n", mark(u.u2_holds));
    text += &format!("check U permutes the basis: {}\n", mark(u.isometric));
    let table: Vec<Value> = u.table.iter().map(|(n, v)| json!({"n": n, "image": vector_json(v)})).collect();
    let json = json!({
        "window": u.window,
        "table": table,
        "checks": {"u_s0_eq_s1": u.u1_holds, "s0_u_eq_u2_s0": u.u2_holds, "isometric": u.isometric},
    });
    let ok = u.u1_holds && u.u2_holds && u.isometric;
    Ok(Output { csv: Some(csv), status: i32::from(!ok), ..Output::new(text, json) })
}

pub fn read_cases(path: &Path) -> Result<Vec<DualityCase>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad case file {}: {e}", path.display())))
}

/// Samples `xi` on `[-window, window]` and runs both residual checks.
pub fn run_case(case: &DualityCase, cfg: &RunConfig) -> Result<CaseResult, CliError> {
    let w = cfg.window as f64;
    let xi = GridFunction::sample(cfg.grid_exp, -w, w, SampleStyle::Smooth, |x| case.xi.eval(x));
    if xi.is_zero() {
        return Err(CliError::Usage("xi vanishes on the sampling window".into()));
    }
    let fail = |e: String| CliError::Precondition(e);
    let residual = verify_theorem_with_precision(&case.f, case.d, case.c, &xi, &xi, cfg.precision).map_err(|e| fail(e.to_string()))?;
    let intertwining = verify_intertwining(&case.f, case.d, case.c, &xi).map_err(|e| fail(e.to_string()))?;
    let tolerances = Tolerances {
        theorem: case.tol.or(cfg.tol).unwrap_or_else(|| case.default_tolerance()),
        intertwining: cfg.tol.unwrap_or(INTERTWINING_TOLERANCE),
    };
    let pass = residual <= tolerances.theorem && intertwining <= tolerances.intertwining;
    Ok(CaseResult {
        case: CaseEcho { f: case.f.clone(), d: case.d, c: case.c },
        residual,
        intertwining,
        tolerances,
        grid: GridInfo { g: cfg.grid_exp, window: cfg.window },
        pass,
    })
}

/// Cases run on separate threads; results keep the order of the file.
pub fn run_cases(cases: &[DualityCase], cfg: &RunConfig) -> Result<DualityReport, CliError> {
    let results = std::thread::scope(|scope| {
        let handles: Vec<_> = cases.iter().map(|case| scope.spawn(move || run_case(case, cfg))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(CliError::Precondition("a duality case panicked".into()))))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(DualityReport { timestamp, results })
}

pub fn duality(path: &Path, cfg: &RunConfig) -> Result<Output, CliError> {
    let report = run_cases(&read_cases(path)?, cfg)?;
    let mut text = String::new();
    let mut csv = String::from("case,d,c,residual,tolerance,intertwining,pass\n");
    for (k, r) in report.results.iter().enumerate() {
        let verdict = if r.pass { "pass" } else { "FAIL" };
        text += &format!(
            "case {k}: d = {}, c = {}, residual {:.3e} (tol {:.1e}), eta identity {:.3e}: {verdict}\n",
            r.case.d, r.case.c, r.residual, r.tolerances.theorem, r.intertwining
        );
        csv += &format!("{k},{},{},{:e},{:e},{:e},{}\n", r.case.d, r.case.c, r.residual, r.tolerances.theorem, r.intertwining, r.pass);
    }
    let json = serde_json::to_value(&report).expect("report serializes");
    Ok(Output { csv: Some(csv), default_format: Format::Json, status: i32::from(!report.all_pass()), ..Output::new(text, json) })
}

pub fn dispatch(command: &Command, cfg: &RunConfig) -> Result<Output, CliError> {
    match command {
        Command::Normalize { expr } => normalize(expr),
        Command::Eq { lhs, rhs } => eq(lhs, rhs),
        Command::Apply { expr, basis } => apply(expr, *basis),
        Command::Expect { expr } => expect(expr),
        Command::Matrix { expr } => matrix(expr, cfg),
        Command::Wold { s0, s1 } => wold(s0, s1, cfg),
        Command::Duality { cases } => duality(cases, cfg),
    }
}
