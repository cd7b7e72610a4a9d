//! Annotated listings and the JSON form of an analysis.
//!
//! A [`Report`] is built once from an [`AnalysisResult`]; the text listing
//! and the JSON document are both rendered from it.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::absub::{Abs, ModeLattice};
use crate::engine::{AnalysisResult, ProgramPoint};
use crate::mono::Mode;
use crate::poly::{PMode, Params};
use crate::syntax::{Atom, Program, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Mono,
    Poly,
}

/// A mode as it appears in reports: `"g"`/`"u"`, or sorted lists of
/// parameter names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeValue {
    Mono(String),
    Poly(Vec<Vec<String>>),
}

impl fmt::Display for ModeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeValue::Mono(m) => f.write_str(m),
            ModeValue::Poly(sets) => {
                f.write_str("[")?;
                for (i, s) in sets.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "[{}]", s.join(","))?;
                }
                f.write_str("]")
            }
        }
    }
}

type Described = Vec<(Var, ModeValue)>;

#[derive(Clone, Debug)]
pub struct Report {
    pub kind: DomainKind,
    pub params: Vec<String>,
    pub program: Program,
    pub goal: Atom,
    pub goal_input: Described,
    pub goal_output: Described,
    pub points: BTreeMap<ProgramPoint, Described>,
    pub iterations: usize,
    /// Shown in the text header of instantiated reports.
    pub note: Option<String>,
}

fn describe<M: ModeLattice>(abs: &Abs<M>, show: &impl Fn(&M) -> ModeValue) -> Described {
    abs.iter().map(|(v, m)| (v.clone(), show(m))).collect()
}

impl Report {
    fn build<M: ModeLattice>(
        kind: DomainKind,
        params: Vec<String>,
        program: &Program,
        r: &AnalysisResult<M>,
        show: impl Fn(&M) -> ModeValue,
    ) -> Self {
        Report {
            kind,
            params,
            program: program.clone(),
            goal: r.goal.clone(),
            goal_input: describe(&r.goal_input, &show),
            goal_output: describe(&r.goal_output, &show),
            points: r.points.iter().map(|(p, a)| (*p, describe(a, &show))).collect(),
            iterations: r.iterations,
            note: None,
        }
    }

    pub fn mono(program: &Program, r: &AnalysisResult<Mode>) -> Self {
        Report::build(DomainKind::Mono, Vec::new(), program, r, |m| ModeValue::Mono(m.to_string()))
    }

    pub fn poly(program: &Program, params: &Params, r: &AnalysisResult<PMode>) -> Self {
        Report::build(DomainKind::Poly, params.names().to_vec(), program, r, |m| ModeValue::Poly(m.name_lists(params)))
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// The program with a description line before each body literal and
    /// after the last one, `V/T` style. Clauses never entered are marked.
    pub fn text(&self) -> String {
        let mut out = String::new();
        let goal_order: Vec<Var> = self.goal.vars().into_iter().collect();
        let _ = writeln!(out, "{}", self.program.directive);
        if let Some(note) = &self.note {
            let _ = writeln!(out, "% {note}");
        }
        let _ = writeln!(out, "%   {}", render(&self.goal_input, &goal_order));
        let _ = writeln!(out, "%   {}", self.goal);
        let _ = writeln!(out, "%   {}", render(&self.goal_output, &goal_order));
        for clause in &self.program.clauses {
            out.push('\n');
            let order: Vec<Var> = clause.vars().into_iter().collect();
            let line = |k: usize| match self.points.get(&(clause.id, k)) {
                Some(d) => format!("        {}", render(d, &order)),
                None => "        % not reached".to_string(),
            };
            if clause.body.is_empty() {
                let _ = writeln!(out, "{}.", clause.head);
                let _ = writeln!(out, "{}", line(0));
                continue;
            }
            let _ = writeln!(out, "{} :-", clause.head);
            for (k, lit) in clause.body.iter().enumerate() {
                let _ = writeln!(out, "{}", line(k));
                let end = if k + 1 == clause.body.len() { "." } else { "," };
                let _ = writeln!(out, "    {lit}{end}");
            }
            let _ = writeln!(out, "{}", line(clause.body.len()));
        }
        out
    }

    pub fn json(&self) -> JsonReport {
        let obj = |d: &Described| d.iter().map(|(v, m)| (v.to_string(), m.clone())).collect();
        JsonReport {
            program: self.program.to_string(),
            goal: self.goal.to_string(),
            params: self.params.clone(),
            points: self.points.iter().map(|(&(clause, index), d)| JsonPoint { clause, index, abs: obj(d) }).collect(),
            goal_output: obj(&self.goal_output),
            mode: self.kind,
            iterations: self.iterations,
        }
    }
}

fn render(d: &Described, order: &[Var]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for v in order {
        if let Some((_, m)) = d.iter().find(|(w, _)| w == v) {
            parts.push(format!("{v}/{m}"));
        }
    }
    for (v, m) in d {
        if !order.contains(v) {
            parts.push(format!("{v}/{m}"));
        }
    }
    format!("[{}]", parts.join(", "))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonPoint {
    pub clause: usize,
    pub index: usize,
    pub abs: BTreeMap<String, ModeValue>,
}

/// The machine-readable report. Field set and order are stable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonReport {
    pub program: String,
    pub goal: String,
    pub params: Vec<String>,
    pub points: Vec<JsonPoint>,
    pub goal_output: BTreeMap<String, ModeValue>,
    pub mode: DomainKind,
    pub iterations: usize,
}

impl JsonReport {
    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid report: {0}")]
    Invalid(String),
}

/// Parses a JSON report and checks what the types alone cannot: modes
/// match the domain, parameter names are known and everything is sorted.
pub fn validate_json(text: &str) -> Result<JsonReport, ReportError> {
    let r: JsonReport = serde_json::from_str(text)?;
    let bad = |m: String| Err(ReportError::Invalid(m));
    if !r.params.windows(2).all(|w| w[0] < w[1]) {
        return bad("params must be sorted and distinct".into());
    }
    if r.mode == DomainKind::Mono && !r.params.is_empty() {
        return bad("a mono report has no params".into());
    }
    let check = |where_: &str, abs: &BTreeMap<String, ModeValue>| -> Result<(), ReportError> {
        for (v, m) in abs {
            let ok = match (r.mode, m) {
                (DomainKind::Mono, ModeValue::Mono(s)) => s == "g" || s == "u",
                (DomainKind::Poly, ModeValue::Poly(sets)) => {
                    sets.iter().all(|s| s.windows(2).all(|w| w[0] < w[1]) && s.iter().all(|p| r.params.contains(p)))
                        && sets.windows(2).all(|w| w[0] < w[1])
                }
                _ => false,
            };
            if !ok {
                return Err(ReportError::Invalid(format!("{where_}: bad mode for {v}: {m}")));
            }
        }
        Ok(())
    };
    check("goal_output", &r.goal_output)?;
    for p in &r.points {
        check(&format!("clause {} point {}", p.clause, p.index), &p.abs)?;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{analyze, mono_entry, poly_entry, Options};
    use crate::syntax::parse_program;

    const LOOKUP: &str = ":- analyze(lookup(K, D, V), [K = alpha, D = beta, V = gamma]).
        lookup(K, dict(K, X, L, R), V) :- X = V.
        lookup(K, dict(K1, X, L, R), V) :- K < K1, lookup(K, L, V).
        lookup(K, dict(K1, X, L, R), V) :- K > K1, lookup(K, R, V).";

    fn lookup() -> Report {
        let p = parse_program(LOOKUP).unwrap();
        let (params, input) = poly_entry(&p.directive).unwrap();
        let r = analyze(&p, &p.directive.goal, &input, &Options::default()).unwrap();
        Report::poly(&p, &params, &r)
    }

    #[test]
    fn text_annotates_around_literals() {
        let text = lookup().text();
        assert!(text.contains("%   [K/[[alpha,beta]], D/[[beta]], V/[[beta,gamma]]]"), "{text}");
        let lines: Vec<&str> = text.lines().collect();
        let i = lines.iter().position(|l| l.trim() == "K < K1,").unwrap();
        assert!(lines[i - 1].contains("K/[[alpha]]") && lines[i - 1].contains("K1/[[beta]]"));
        assert!(lines[i + 1].trim_start().starts_with('['));
    }

    #[test]
    fn json_round_trips_and_validates() {
        let j = lookup().json();
        let text = j.to_string_pretty();
        assert_eq!(validate_json(&text).unwrap(), j);
        assert_eq!(j.goal_output["K"], ModeValue::Poly(vec![vec!["alpha".into(), "beta".into()]]));
        let fields = ["program", "goal", "params", "points", "goal_output", "mode", "iterations"];
        let mut keys: Vec<String> = match serde_json::from_str::<serde_json::Value>(&text).unwrap() {
            serde_json::Value::Object(m) => m.keys().cloned().collect(),
            _ => unreachable!(),
        };
        keys.sort();
        let mut expected = fields.map(String::from).to_vec();
        expected.sort();
        assert_eq!(keys, expected);
        // Serialized in declaration order.
        let at: Vec<usize> = fields.iter().map(|f| text.find(&format!("\n  \"{f}\"")).unwrap()).collect();
        assert!(at.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn validation_rejects_bad_documents() {
        let mut v: serde_json::Value = serde_json::from_str(&lookup().json().to_string_pretty()).unwrap();
        v["extra"] = 1.into();
        assert!(matches!(validate_json(&v.to_string()), Err(ReportError::Json(_))));
        let mut v: serde_json::Value = serde_json::from_str(&lookup().json().to_string_pretty()).unwrap();
        v["goal_output"]["K"] = serde_json::json!([["delta"]]);
        assert!(matches!(validate_json(&v.to_string()), Err(ReportError::Invalid(_))));
        v["goal_output"]["K"] = serde_json::json!("g");
        assert!(matches!(validate_json(&v.to_string()), Err(ReportError::Invalid(_))));
    }

    #[test]
    fn mono_facts_and_bounds() {
        let p = parse_program(":- analyze(p(X), [X = u]). p(a). q(Y) :- true.").unwrap();
        let r = analyze(&p, &p.directive.goal, &mono_entry(&p.directive, None).unwrap(), &Options::default()).unwrap();
        let rep = Report::mono(&p, &r);
        let text = rep.text();
        assert!(text.contains("p(a).\n        [X/g]") || text.contains("p(a).\n        []"), "{text}");
        assert!(text.contains("% not reached"));
        assert_eq!(rep.json().goal_output["X"], ModeValue::Mono("g".into()));
        assert!(validate_json(&rep.json().to_string_pretty()).is_ok());
    }

    #[test]
    fn shipped_schema_matches_the_fields() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/report.schema.json");
        let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        let required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        let doc: serde_json::Value = serde_json::to_value(lookup().json()).unwrap();
        let mut have: Vec<&str> = doc.as_object().unwrap().keys().map(String::as_str).collect();
        let mut want = required.clone();
        have.sort();
        want.sort();
        assert_eq!(have, want);
        assert_eq!(schema["additionalProperties"], false);
    }

    #[test]
    fn infimum_and_supremum_render() {
        assert_eq!(ModeValue::Poly(vec![]).to_string(), "[]");
        assert_eq!(ModeValue::Poly(vec![vec![]]).to_string(), "[[]]");
        assert_eq!(serde_json::to_string(&ModeValue::Poly(vec![vec![]])).unwrap(), "[[]]");
    }
}
