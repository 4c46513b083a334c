//! Command-line front end.
//!
//! Exit status is 0 on success, 1 when the input is well formed but fails a
//! check, and 2 when it cannot be read or parsed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::Elem;
use crate::biquandle::Biquandle;
use crate::bracket::{
    bracket_invariant, classify_adequacy, skein_identity_check, state_sums, verify_bracket, Bracket, BracketError, BracketTables,
    InvariantResult, SkeinError,
};
use crate::coloring::{enumerate_colorings, monochromatic_riii_check};
use crate::diagram::Diagram;
use crate::search::{search_brackets, ClassFilter, SearchSpec};
use crate::trace::{all_moves, trace_move_fixture_check, MoveFamily, Parity, TraceDiagram, TraceFile};

#[derive(Debug, Parser)]
#[command(name = "tracebracket", version, about = "Biquandle counting invariants, biquandle brackets and trace diagrams")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the biquandle axioms and the monochromatic RIII lemma.
    VerifyBiquandle { biquandle: String },
    /// Check the bracket conditions and report δ and w.
    VerifyBracket { biquandle: String, bracket: String },
    /// List every coloring of a diagram.
    Colorings { diagram: String, biquandle: String },
    /// Bracket multiset invariant of a diagram.
    Invariant {
        diagram: String,
        biquandle: String,
        bracket: String,
        #[arg(long, value_enum, default_value_t = Method::Statesum)]
        method: Method,
    },
    /// Over/under adequacy and pass-through classification.
    Classify {
        biquandle: String,
        bracket: String,
        /// Also run the trace-move tangle checks.
        #[arg(long)]
        moves: bool,
    },
    /// Search for brackets over Z/n.
    Search {
        biquandle: String,
        #[arg(long = "mod")]
        modulus: u64,
        #[arg(long, value_enum, default_value_t = ClassArg::Any)]
        class: ClassArg,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        delta: Option<u64>,
    },
    /// Evaluate a colored trace diagram.
    EvalTrace {
        file: String,
        biquandle: String,
        bracket: String,
        #[arg(long, value_enum, default_value_t = Method::Recursive)]
        method: Method,
    },
    /// Check the skein relation at monochromatic fixed-point crossings.
    SkeinCheck {
        diagram: String,
        biquandle: String,
        bracket: String,
        /// Only this crossing (1-based).
        #[arg(long)]
        crossing: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Enumerate all smoothing states.
    Statesum,
    /// Expand crossings depth-first.
    Recursive,
    /// Depth-first expansion with the magnetic-parity shortcut.
    Parity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Any,
    Adequate,
    Over,
    Under,
    Neither,
}

impl From<ClassArg> for ClassFilter {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Any => ClassFilter::Any,
            ClassArg::Adequate => ClassFilter::Adequate,
            ClassArg::Over => ClassFilter::Over,
            ClassArg::Under => ClassFilter::Under,
            ClassArg::Neither => ClassFilter::Neither,
        }
    }
}

/// What a command printed and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    code: i32,
    text: String,
    result: Value,
    witnesses: Vec<Value>,
}

impl Report {
    fn new(code: i32, text: String, result: Value) -> Self {
        Self {
            code,
            text,
            result,
            witnesses: Vec::new(),
        }
    }
}

/// Input that could not be read or parsed.
struct Malformed(String);

impl<E: std::fmt::Display> From<E> for Malformed {
    fn from(e: E) -> Self {
        Malformed(e.to_string())
    }
}

type Run = Result<Report, Malformed>;

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let (name, inputs) = describe(&cli.command);
    match execute(&cli.command) {
        Ok(report) => {
            let stdout = if cli.json {
                let doc = json!({
                    "command": name,
                    "inputs": inputs,
                    "result": report.result,
                    "witnesses": report.witnesses,
                });
                format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
            } else {
                report.text
            };
            Outcome {
                code: report.code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(Malformed(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

fn describe(c: &Command) -> (&'static str, Value) {
    match c {
        Command::VerifyBiquandle { biquandle } => ("verify-biquandle", json!({ "biquandle": biquandle })),
        Command::VerifyBracket { biquandle, bracket } => ("verify-bracket", json!({ "biquandle": biquandle, "bracket": bracket })),
        Command::Colorings { diagram, biquandle } => ("colorings", json!({ "diagram": diagram, "biquandle": biquandle })),
        Command::Invariant {
            diagram,
            biquandle,
            bracket,
            method,
        } => (
            "invariant",
            json!({ "diagram": diagram, "biquandle": biquandle, "bracket": bracket, "method": method_name(*method) }),
        ),
        Command::Classify { biquandle, bracket, moves } => {
            ("classify", json!({ "biquandle": biquandle, "bracket": bracket, "moves": moves }))
        }
        Command::Search {
            biquandle,
            modulus,
            class,
            limit,
            delta,
        } => (
            "search",
            json!({
                "biquandle": biquandle,
                "mod": modulus,
                "class": format!("{class:?}").to_lowercase(),
                "limit": limit,
                "delta": delta,
            }),
        ),
        Command::EvalTrace {
            file,
            biquandle,
            bracket,
            method,
        } => (
            "eval-trace",
            json!({ "file": file, "biquandle": biquandle, "bracket": bracket, "method": method_name(*method) }),
        ),
        Command::SkeinCheck {
            diagram,
            biquandle,
            bracket,
            crossing,
        } => (
            "skein-check",
            json!({ "diagram": diagram, "biquandle": biquandle, "bracket": bracket, "crossing": crossing }),
        ),
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Statesum => "statesum",
        Method::Recursive => "recursive",
        Method::Parity => "parity",
    }
}

fn execute(c: &Command) -> Run {
    match c {
        Command::VerifyBiquandle { biquandle } => cmd_verify_biquandle(biquandle),
        Command::VerifyBracket { biquandle, bracket } => cmd_verify_bracket(biquandle, bracket),
        Command::Colorings { diagram, biquandle } => cmd_colorings(diagram, biquandle),
        Command::Invariant {
            diagram,
            biquandle,
            bracket,
            method,
        } => cmd_invariant(diagram, biquandle, bracket, *method),
        Command::Classify { biquandle, bracket, moves } => cmd_classify(biquandle, bracket, *moves),
        Command::Search {
            biquandle,
            modulus,
            class,
            limit,
            delta,
        } => cmd_search(biquandle, *modulus, *class, *limit, *delta),
        Command::EvalTrace {
            file,
            biquandle,
            bracket,
            method,
        } => cmd_eval_trace(file, biquandle, bracket, *method),
        Command::SkeinCheck {
            diagram,
            biquandle,
            bracket,
            crossing,
        } => cmd_skein_check(diagram, biquandle, bracket, *crossing),
    }
}

fn read(path: &str) -> Result<String, Malformed> {
    std::fs::read_to_string(Path::new(path)).map_err(|e| Malformed(format!("{path}: {e}")))
}

fn numbers(spec: &str, name: &str) -> Option<Vec<u64>> {
    let inner = spec.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
    inner.split(',').map(|s| s.trim().parse().ok()).collect()
}

/// A biquandle file, `alexander(n,t,s)` or `trivial(n)`; unvalidated.
pub fn load_biquandle_unchecked(spec: &str) -> Result<Biquandle, String> {
    if let Some(v) = numbers(spec, "alexander") {
        let [n, t, s] = v[..] else {
            return Err(format!("{spec}: expected alexander(n,t,s)"));
        };
        return Biquandle::alexander(n, t, s).map_err(|e| e.to_string());
    }
    if let Some(v) = numbers(spec, "trivial") {
        let [n] = v[..] else {
            return Err(format!("{spec}: expected trivial(n)"));
        };
        if n == 0 {
            return Err("trivial(n) needs n >= 1".into());
        }
        return Ok(Biquandle::trivial(n as usize));
    }
    let text = std::fs::read_to_string(spec).map_err(|e| format!("{spec}: {e}"))?;
    Biquandle::parse(&text).map_err(|e| format!("{spec}: {e}"))
}

fn load_biquandle(spec: &str) -> Result<Biquandle, Malformed> {
    let x = load_biquandle_unchecked(spec).map_err(Malformed)?;
    let v = x.verify();
    if let Some(first) = v.first() {
        return Err(Malformed(format!("{spec}: not a biquandle ({first})")));
    }
    Ok(x)
}

fn load_diagram(path: &str) -> Result<Diagram, Malformed> {
    let d = Diagram::parse(&read(path)?).map_err(|e| Malformed(format!("{path}: {e}")))?;
    let issues = d.validate();
    if let Some(first) = issues.first() {
        return Err(Malformed(format!("{path}: invalid diagram ({first})")));
    }
    Ok(d)
}

fn load_bracket(x: &Biquandle, path: &str) -> Result<Bracket, Malformed> {
    let t = BracketTables::parse(&read(path)?).map_err(|e| Malformed(format!("{path}: {e}")))?;
    verify_bracket(x, &t).map_err(|e| Malformed(format!("{path}: not a bracket for this biquandle ({e})")))
}

fn elem_json(e: &Elem) -> Value {
    match e.residue() {
        Some(r) => json!(r),
        None => json!(e.to_string()),
    }
}

fn one_based(c: &[usize]) -> Vec<usize> {
    c.iter().map(|v| v + 1).collect()
}

fn cmd_verify_biquandle(spec: &str) -> Run {
    let x = load_biquandle_unchecked(spec).map_err(Malformed)?;
    let violations = x.verify();
    if !violations.is_empty() {
        let mut text = String::from("invalid\n");
        for v in &violations {
            writeln!(text, "{v}").unwrap();
        }
        let mut r = Report::new(1, text, json!({ "valid": false, "size": x.size() }));
        r.witnesses = violations.iter().map(|v| json!({ "axiom": v.axiom(), "detail": v.to_string() })).collect();
        return Ok(r);
    }
    let riii = monochromatic_riii_check(&x);
    let mut text = format!("valid\nsize: {}\n", x.size());
    writeln!(text, "monochromatic RIII: {}", if riii.passed() { "pass" } else { "fail" }).unwrap();
    for f in &riii.failures {
        writeln!(text, "  {f}").unwrap();
    }
    let mut r = Report::new(
        0,
        text,
        json!({ "valid": true, "size": x.size(), "monochromatic_riii": riii.passed() }),
    );
    r.witnesses = riii.failures.iter().map(|f| json!(f.to_string())).collect();
    Ok(r)
}

fn cmd_verify_bracket(bq: &str, path: &str) -> Run {
    let x = load_biquandle(bq)?;
    let t = BracketTables::parse(&read(path)?).map_err(|e| Malformed(format!("{path}: {e}")))?;
    match verify_bracket(&x, &t) {
        Ok(b) => Ok(Report::new(
            0,
            format!("valid\ndelta: {}\nw: {}\n", b.delta(), b.w()),
            json!({ "valid": true, "delta": elem_json(b.delta()), "w": elem_json(b.w()) }),
        )),
        Err(BracketError::Shape { .. }) => Err(Malformed(format!("{path}: tables do not match the biquandle size"))),
        Err(BracketError::Violations(vs)) => {
            let mut text = String::from("invalid\n");
            for v in &vs {
                writeln!(text, "{v}").unwrap();
            }
            let mut r = Report::new(1, text, json!({ "valid": false }));
            r.witnesses = vs.iter().map(|v| json!(v.to_string())).collect();
            Ok(r)
        }
        Err(e) => {
            let mut r = Report::new(1, format!("invalid\n{e}\n"), json!({ "valid": false }));
            r.witnesses = vec![json!(e.to_string())];
            Ok(r)
        }
    }
}

fn coloring_line(d: &Diagram, c: &[usize]) -> String {
    let mut parts: Vec<String> = (0..d.arc_count()).map(|a| format!("{}={}", a + 1, c[a] + 1)).collect();
    parts.extend((0..d.free_loops()).map(|k| format!("loop{}={}", k + 1, c[d.arc_count() + k] + 1)));
    parts.join(" ")
}

fn cmd_colorings(path: &str, bq: &str) -> Run {
    let d = load_diagram(path)?;
    let x = load_biquandle(bq)?;
    let cs = enumerate_colorings(&d, &x);
    let mut text = format!("colorings: {}\n", cs.len());
    for c in &cs {
        writeln!(text, "{}", coloring_line(&d, c)).unwrap();
    }
    let list: Vec<Vec<usize>> = cs.iter().map(|c| one_based(c)).collect();
    Ok(Report::new(0, text, json!({ "count": cs.len(), "colorings": list })))
}

fn diagram_values(d: &Diagram, beta: &Bracket, method: Method) -> Result<Vec<(Vec<usize>, Elem)>, Malformed> {
    match method {
        Method::Statesum => Ok(state_sums(d, beta)?),
        Method::Recursive | Method::Parity => {
            let td = TraceDiagram::from_diagram(d);
            enumerate_colorings(d, beta.biquandle())
                .into_iter()
                .map(|c| {
                    let v = if method == Method::Recursive {
                        td.evaluate_recursive(&c, beta)?
                    } else {
                        td.evaluate_hybrid(&c, beta)?
                    };
                    Ok((c, v))
                })
                .collect()
        }
    }
}

fn cmd_invariant(path: &str, bq: &str, br: &str, method: Method) -> Run {
    let d = load_diagram(path)?;
    let x = load_biquandle(bq)?;
    let beta = load_bracket(&x, br)?;
    let values = diagram_values(&d, &beta, method)?;
    let inv = InvariantResult::from_values(values.iter().map(|(_, v)| v));
    let text = format!("multiset: {inv}\npoly: {}\n", inv.polynomial());
    let per: Vec<Value> = values
        .iter()
        .map(|(c, v)| json!({ "coloring": one_based(c), "value": elem_json(v) }))
        .collect();
    let multiset: Vec<Value> = inv
        .multiset
        .iter()
        .map(|(v, m)| json!({ "value": elem_json(v), "multiplicity": m }))
        .collect();
    debug_assert_eq!(bracket_invariant(&d, &beta).ok().map(|i| i.total()), Some(inv.total()));
    Ok(Report::new(
        0,
        text,
        json!({ "multiset": multiset, "poly": inv.polynomial(), "values": per }),
    ))
}

fn cmd_classify(bq: &str, br: &str, moves: bool) -> Run {
    let x = load_biquandle(bq)?;
    let beta = load_bracket(&x, br)?;
    let a = classify_adequacy(&beta);
    let mut text = format!("{}\npassthrough: {}\n", a.label(), if a.passthrough { "yes" } else { "no" });
    let mut witnesses = Vec::new();
    if let Some(w) = a.over_witness {
        writeln!(text, "over-adequacy fails at {w}").unwrap();
        witnesses.push(json!({ "condition": "over", "x": w.x + 1, "y": w.y + 1, "z": w.z + 1 }));
    }
    if let Some(w) = a.under_witness {
        writeln!(text, "under-adequacy fails at {w}").unwrap();
        witnesses.push(json!({ "condition": "under", "x": w.x + 1, "y": w.y + 1, "z": w.z + 1 }));
    }
    if let Some(e) = a.passthrough_witness {
        writeln!(text, "pass-through fails at {}", e + 1).unwrap();
        witnesses.push(json!({ "condition": "passthrough", "x": e + 1 }));
    }
    let mut result = json!({
        "class": a.label(),
        "over": a.over,
        "under": a.under,
        "passthrough": a.passthrough,
    });
    if moves {
        let mut summary = serde_json::Map::new();
        for family in [MoveFamily::Over, MoveFamily::Under, MoveFamily::PassThrough] {
            let list: Vec<_> = all_moves().into_iter().filter(|m| m.family == family).collect();
            let failed: Vec<String> = list
                .iter()
                .filter(|m| !trace_move_fixture_check(&beta, m))
                .map(|m| m.name())
                .collect();
            let key = match family {
                MoveFamily::Over => "over",
                MoveFamily::Under => "under",
                MoveFamily::PassThrough => "passthrough",
            };
            writeln!(text, "{key} moves: {}/{} hold", list.len() - failed.len(), list.len()).unwrap();
            summary.insert(key.to_string(), json!({ "total": list.len(), "failed": failed }));
        }
        result["moves"] = Value::Object(summary);
    }
    let mut r = Report::new(0, text, result);
    r.witnesses = witnesses;
    Ok(r)
}

fn cmd_search(bq: &str, modulus: u64, class: ClassArg, limit: Option<usize>, delta: Option<u64>) -> Run {
    let x = load_biquandle(bq)?;
    let spec = SearchSpec {
        biquandle: x,
        modulus,
        limit,
        class: class.into(),
        delta,
    };
    let found = search_brackets(&spec)?;
    let mut text = String::new();
    let mut list = Vec::new();
    for (b, a) in &found {
        let body = b.to_string();
        for line in body.lines().skip(1) {
            writeln!(text, "{line}").unwrap();
        }
        writeln!(
            text,
            "class: {}, passthrough: {}, delta: {}, w: {}\n",
            a.label(),
            if a.passthrough { "yes" } else { "no" },
            b.delta(),
            b.w()
        )
        .unwrap();
        let t = b.tables();
        let rows = |m: &Vec<Vec<Elem>>| -> Vec<Vec<Value>> { m.iter().map(|r| r.iter().map(elem_json).collect()).collect() };
        list.push(json!({
            "a": rows(&t.a),
            "b": rows(&t.b),
            "class": a.label(),
            "passthrough": a.passthrough,
            "delta": elem_json(b.delta()),
            "w": elem_json(b.w()),
        }));
    }
    writeln!(text, "found: {}", found.len()).unwrap();
    Ok(Report::new(0, text, json!({ "count": found.len(), "brackets": list })))
}

fn cmd_eval_trace(path: &str, bq: &str, br: &str, method: Method) -> Run {
    let file = TraceFile::parse(&read(path)?).map_err(|e| Malformed(format!("{path}: {e}")))?;
    let x = load_biquandle(bq)?;
    let beta = load_bracket(&x, br)?;
    let td = &file.diagram;
    if !td.is_closed() {
        return Err(Malformed(format!("{path}: the trace diagram has open ends")));
    }
    let colorings = file.colorings(&x)?;
    let mut text = String::new();
    let mut parities = Vec::new();
    for i in td.crossing_indices() {
        let p = td.magnetic_parity(i)?;
        writeln!(text, "crossing {}: {p}", i + 1).unwrap();
        parities.push(json!({ "node": i + 1, "parity": p.to_string() }));
    }
    let mut values = Vec::new();
    let mut failures = Vec::new();
    for c in &colorings {
        let v = match method {
            Method::Statesum => td.evaluate_state_sum(c, &beta),
            Method::Recursive => td.evaluate_recursive(c, &beta),
            Method::Parity => td.evaluate_by_parity(c, &beta),
        };
        let colors: Vec<String> = one_based(c).iter().map(usize::to_string).collect();
        match v {
            Ok(v) => {
                writeln!(text, "colors {}: {v}", colors.join(" ")).unwrap();
                values.push(json!({ "coloring": one_based(c), "value": elem_json(&v) }));
            }
            Err(e) => {
                writeln!(text, "colors {}: {e}", colors.join(" ")).unwrap();
                failures.push(json!({ "coloring": one_based(c), "error": e.to_string() }));
            }
        }
    }
    if colorings.is_empty() {
        text.push_str("no colorings\n");
    }
    let code = if failures.is_empty() && !colorings.is_empty() { 0 } else { 1 };
    let uses_parity = parities.iter().all(|p| p["parity"] != json!(Parity::MultiComponent.to_string()));
    let mut r = Report::new(
        code,
        text,
        json!({ "parities": parities, "values": values, "single_component": uses_parity }),
    );
    r.witnesses = failures;
    Ok(r)
}

fn cmd_skein_check(path: &str, bq: &str, br: &str, crossing: Option<usize>) -> Run {
    let d = load_diagram(path)?;
    let x = load_biquandle(bq)?;
    let beta = load_bracket(&x, br)?;
    let indices: Vec<usize> = match crossing {
        Some(0) => return Err(Malformed("crossings are numbered from 1".into())),
        Some(i) if i > d.crossings().len() => {
            return Err(Malformed(format!("crossing {i} out of range (diagram has {})", d.crossings().len())))
        }
        Some(i) => vec![i - 1],
        None => (0..d.crossings().len()).collect(),
    };
    let mut checked = 0;
    let mut skipped = Vec::new();
    let mut failed = Vec::new();
    for c in enumerate_colorings(&d, &x) {
        for &i in &indices {
            match skein_identity_check(&d, &c, &beta, i) {
                Ok(true) => checked += 1,
                Ok(false) => {
                    checked += 1;
                    failed.push(json!({ "crossing": i + 1, "coloring": one_based(&c) }));
                }
                Err(e @ (SkeinError::NotMonochromatic { .. } | SkeinError::NotFixedPoint { .. })) => {
                    skipped.push(json!({ "crossing": i + 1, "coloring": one_based(&c), "reason": e.to_string() }))
                }
                Err(e) => return Err(Malformed(e.to_string())),
            }
        }
    }
    let text = format!("checked: {checked}\nfailed: {}\nnot applicable: {}\n", failed.len(), skipped.len());
    let code = if failed.is_empty() && checked > 0 { 0 } else { 1 };
    let mut r = Report::new(
        code,
        text,
        json!({ "checked": checked, "failed": failed.len(), "not_applicable": skipped.len() }),
    );
    r.witnesses = failed.into_iter().chain(skipped).collect();
    Ok(r)
}
