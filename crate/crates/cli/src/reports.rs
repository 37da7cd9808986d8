//! Tables and reports built from the catalog and the published constants.

use crate::store::{self, CatalogFile};
use crate::table::Table;
use crate::CliError;
use delpezzo::anchors::{self, AnchorReport};
use delpezzo::conic_bundle::{self, CaseBound, CaseLabel, ConicType, ThresholdReport};
use delpezzo::descent::{self, Deg2Class};
use delpezzo::primes;
use delpezzo::tables;
use delpezzo::weyl::{self, Catalog, LatticeAut};
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// Catalog data shared by the table builders.
pub struct Context {
    pub catalog: Catalog,
    pub deg2: Vec<Deg2Class>,
    pub pairs: Vec<(usize, usize)>,
    /// Anchors without Bertini propagation, so that twists can be checked against them.
    pub independent: AnchorReport,
    /// Anchors with propagation.
    pub full: AnchorReport,
}

impl Context {
    pub fn new(file: &CatalogFile) -> Result<Self, CliError> {
        let catalog = file.catalog();
        if !catalog.is_complete() {
            return Err(CliError::BadCatalog(format!("{} classes, expected 112", catalog.entries.len())));
        }
        let deg2 = descent::degree_two_classes(&catalog);
        let pairs = descent::twist_pairs(&catalog).map_err(|e| CliError::Module(e.to_string()))?;
        let independent = anchors::anchor_catalog(&catalog, &deg2, None);
        let full = anchors::anchor_catalog(&catalog, &deg2, Some(&pairs));
        Ok(Context { catalog, deg2, pairs, independent, full })
    }

    pub fn representative(&self, t: u32) -> Result<LatticeAut, CliError> {
        let id = self.full.entry_of(t).ok_or(CliError::Unanchored(t))?;
        Ok(self.catalog.representative(id))
    }
}

fn check_type(t: u8) -> Result<ConicType, CliError> {
    if (1..=7).contains(&t) {
        Ok(ConicType::new(t))
    } else {
        Err(CliError::Usage(format!("conic type {t} is not in 1..7")))
    }
}

fn partition(degrees: &[usize]) -> String {
    let mut d = degrees.to_vec();
    d.sort_unstable();
    tables::profile_string(&d)
}

fn case_bound(b: &CaseBound) -> String {
    match b {
        CaseBound::AtLeast(q) => format!("q ≥ {q}"),
        CaseBound::AllExcept(e) if e.is_empty() => "all q".into(),
        CaseBound::AllExcept(e) => {
            let e: Vec<String> = e.iter().map(|q| q.to_string()).collect();
            format!("q ∉ {{{}}}", e.join(", "))
        }
    }
}

fn case_name(c: CaseLabel) -> &'static str {
    match c {
        CaseLabel::C1 => "1",
        CaseLabel::C2a => "2a",
        CaseLabel::C2b => "2b",
        CaseLabel::C2c => "2c",
        CaseLabel::C3 => "3",
    }
}

fn threshold_cases(r: &ThresholdReport) -> String {
    let parts: Vec<String> = r.per_case.iter().map(|(c, b)| format!("{}: {}", case_name(*c), case_bound(b))).collect();
    parts.join("; ")
}

/// `q = a, b or q ≥ t`, or `q ≥ t`.
fn existence_text(sporadic: &[u64], from: u64) -> String {
    if from == u64::MAX {
        return if sporadic.is_empty() { "none".into() } else { format!("q = {}", list(sporadic)) };
    }
    if sporadic.is_empty() {
        format!("q ≥ {from}")
    } else {
        format!("q = {} or q ≥ {from}", list(sporadic))
    }
}

fn absent_text(absent: &[u64]) -> String {
    let Some(&max) = absent.last() else { return String::new() };
    if absent.len() > 1 && primes::prime_powers_between(2, max) == absent {
        format!("q ≤ {max}")
    } else {
        format!("q = {}", list(absent))
    }
}

fn list(v: &[u64]) -> String {
    v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn orders() -> Table {
    let mut t = Table::new(&["type", "order"]);
    for k in 1..=7u8 {
        let sig = weyl::signature(&anchors::conic_representative(k));
        t.push(vec![json!(k), json!(sig.order)]);
    }
    t
}

pub fn conic_types() -> Table {
    let mut t =
        Table::new(&["type", "singular_fibers", "rational_fibers", "order", "half_power_flips", "twist_trace", "twist_index"]);
    for k in 1..=7u8 {
        let ct = ConicType::new(k);
        let rep = anchors::conic_representative(k);
        let sig = weyl::signature(&rep);
        let twist = weyl::signature(&descent::bertini(&rep).expect("degree 1"));
        t.push(vec![
            json!(k),
            json!(partition(&ct.fiber_degrees)),
            json!(ct.rational_fibers()),
            json!(sig.order),
            json!(ct.half_power_flips()),
            json!(twist.trace),
            json!(twist.index),
        ]);
    }
    t
}

pub fn thresholds() -> Table {
    let mut t = Table::new(&["type", "rational_fibers", "cases", "k", "published_k", "discrepancy"]);
    for k in 1..=7u8 {
        let r = conic_bundle::transition_threshold(&ConicType::new(k));
        t.push(vec![
            json!(k),
            json!(r.rational_fibers),
            json!(threshold_cases(&r)),
            json!(r.k),
            json!(r.published_k),
            json!(r.discrepancy),
        ]);
    }
    t
}

pub fn blowups() -> Table {
    let mut t = Table::new(&["type", "trace", "profile", "exists"]);
    let mut rows: Vec<_> = tables::BLOWUP_ROWS.iter().collect();
    rows.sort_by_key(|r| r.dp1);
    for r in rows {
        let exists = tables::INDEX8_EXISTENCE
            .iter()
            .find(|e| e.0 == r.dp1)
            .map(|&(_, extra, from)| existence_text(extra, from))
            .unwrap_or_default();
        t.push(vec![json!(r.dp1), json!(r.trace), json!(tables::profile_string(r.profile)), json!(exists)]);
    }
    t
}

/// Published twist against the twist computed from independently anchored entries.
pub fn twists(ctx: &Context) -> Table {
    let mut t = Table::new(&["type", "twist", "computed_twist", "entry", "twist_entry", "status"]);
    for ty in 1..=112u32 {
        let entry = ctx.independent.entry_of(ty);
        let twist_entry = entry.map(|e| ctx.pairs[e].1);
        let computed = twist_entry.and_then(|e| ctx.independent.assigned.get(&e).copied());
        let status = match computed {
            Some(c) if c == tables::twist_of(ty) => "agree",
            Some(_) => "differs",
            None => "unanchored",
        };
        t.push(vec![json!(ty), json!(tables::twist_of(ty)), json!(computed), json!(entry), json!(twist_entry), json!(status)]);
    }
    t
}

/// Each degree-2 row with the bound computed from the matching class.
pub fn degree_two(ctx: &Context) -> Table {
    let mut t = Table::new(&["dp2", "dp1", "point_count", "lines", "computed_lines", "candidates", "status"]);
    for row in tables::DP2_ROWS.iter() {
        let m = ctx.full.deg2.iter().find(|m| m.row == Some(row.dp2));
        let candidates: Vec<String> = ctx
            .full
            .deg2
            .iter()
            .filter(|m| m.row.is_none() && m.candidates.contains(&row.dp2))
            .map(|m| m.class.to_string())
            .collect();
        let (computed, status) = match m {
            Some(m) => {
                let ok = m.bound.q == row.lines_q && m.bound.constant == row.lines_const && m.trace == row.trace;
                (json!(m.bound.to_string()), if ok { "agree" } else { "differs" })
            }
            None => (Value::Null, "ambiguous"),
        };
        t.push(vec![
            json!(row.dp2),
            json!(row.blowup),
            json!(tables::point_count_formula(row.trace)),
            json!(tables::linear(row.lines_q, row.lines_const)),
            computed,
            json!(candidates.join(" ")),
            json!(status),
        ]);
    }
    t
}

/// Outcome of the existence inequality for one degree-1 type, joined over its degree-2 ancestors.
struct Scan {
    odd: (Vec<u64>, u64),
    even: (Vec<u64>, u64),
    passes: BTreeMap<u64, bool>,
}

fn split(values: &[(u64, bool)]) -> (Vec<u64>, u64) {
    let from = match values.iter().rposition(|&(_, ok)| !ok) {
        None => values.first().map_or(2, |&(q, _)| q),
        Some(i) => values.get(i + 1).map_or(u64::MAX, |&(q, _)| q),
    };
    (values.iter().filter(|&&(q, ok)| ok && q < from).map(|&(q, _)| q).collect(), from)
}

fn scan_type(ctx: &Context, dp1: u32) -> Option<Scan> {
    let sigs: Vec<_> = ctx
        .full
        .deg2
        .iter()
        .filter(|m| m.row.is_some_and(|r| tables::dp2_row(r).blowup == dp1))
        .map(|m| &ctx.deg2[m.class].signature)
        .collect();
    if sigs.is_empty() {
        return None;
    }
    let cap = sigs.iter().map(|s| descent::scan_cap(s)).max().expect("nonempty");
    let passes: BTreeMap<u64, bool> = primes::prime_powers_between(2, cap)
        .into_iter()
        .map(|q| (q, sigs.iter().any(|s| descent::existence_margin(s, q) >= 0)))
        .collect();
    let odd: Vec<(u64, bool)> = passes.iter().filter(|(q, _)| *q % 2 == 1).map(|(&q, &ok)| (q, ok)).collect();
    let even: Vec<(u64, bool)> = passes.iter().filter(|(q, _)| *q % 2 == 0).map(|(&q, &ok)| (q, ok)).collect();
    Some(Scan { odd: split(&odd), even: split(&even), passes })
}

/// Published existence with the odd and even scans of the point-count inequality.
pub fn existence(ctx: &Context) -> Table {
    let mut t = Table::new(&["type", "nonexistence", "existence", "computed_odd", "computed_even", "odd_agree"]);
    for row in tables::EXISTENCE_ROWS.iter() {
        let published = existence_text(row.sporadic, row.from);
        let (odd, even, agree) = match scan_type(ctx, row.dp1) {
            Some(s) => {
                let agree = s.passes.iter().filter(|(q, _)| *q % 2 == 1).all(|(&q, &ok)| ok == row.exists(q));
                (json!(existence_text(&s.odd.0, s.odd.1)), json!(existence_text(&s.even.0, s.even.1)), json!(agree))
            }
            None => (Value::Null, Value::Null, Value::Null),
        };
        t.push(vec![json!(row.dp1), json!(absent_text(row.absent)), json!(published), odd, even, agree]);
    }
    t
}

/// Signature report for one element, with its type number when the catalog determines it.
pub fn classify(a: &LatticeAut, ctx: Option<&Context>) -> Value {
    let a = a.in_basis(delpezzo::lattice::BasisKind::Standard);
    let sig = weyl::signature(&a);
    let (entry, type_number) = match ctx {
        Some(ctx) => {
            let entry = ctx.catalog.find(&sig);
            (entry, entry.and_then(|e| ctx.full.assigned.get(&e).copied()))
        }
        None => (None, None),
    };
    let conic = conic_bundle::conic_type(&a).ok().map(|c| c.t);
    let twist = weyl::signature(&descent::bertini(&a).expect("degree 1"));
    json!({
        "entry": entry,
        "type_number": type_number,
        "signature": sig,
        "point_count": tables::point_count_formula(sig.trace),
        "conic_type": conic,
        "twist": {
            "entry": ctx.and_then(|c| c.catalog.find(&twist)),
            "type_number": type_number.map(tables::twist_of),
            "trace": twist.trace,
            "index": twist.index,
        },
    })
}

pub fn conic(t: u8) -> Result<Value, CliError> {
    let ct = check_type(t)?;
    let rep = ct.representative();
    let a = rep.lift();
    let sig = weyl::signature(&a);
    let half = conic_bundle::half_power_form(&a).map_err(|e| CliError::Module(e.to_string()))?;
    let threshold = conic_bundle::transition_threshold(&ct);
    let mut cases = serde_json::Map::new();
    for label in CaseLabel::ALL {
        let value = match conic_bundle::case_inventory(&ct, label) {
            Ok(inv) => json!({
                "minus2_classes": inv.minus2_classes.len(),
                "minus1_sections": inv.minus1_section_classes.len(),
                "special_bisections": inv.special_bisections.len(),
                "bound": threshold.per_case.get(&label).map(case_bound),
            }),
            Err(e) => json!({ "unavailable": e.to_string() }),
        };
        cases.insert(case_name(label).to_string(), value);
    }
    let feasible: Vec<u64> = primes::prime_powers_between(2, 16)
        .into_iter()
        .filter(|&q| conic_bundle::p1_config_feasible(q, &ct.fiber_degrees).unwrap_or(false))
        .collect();
    Ok(json!({
        "type": t,
        "representative": rep.to_string(),
        "singular_fibers": partition(&ct.fiber_degrees),
        "rational_fibers": ct.rational_fibers(),
        "order": sig.order,
        "trace": sig.trace,
        "index": sig.index,
        "fixed_rank": sig.fixed_rank,
        "half_power": half.to_string(),
        "half_power_flips": half.flips.len(),
        "cases": cases,
        "k": threshold.k,
        "published_k": threshold.published_k,
        "discrepancy": threshold.discrepancy,
        "p1_feasible_up_to_16": feasible,
    }))
}

/// Degree-2 classes with their matches and scans.
pub fn deg2_all(ctx: &Context) -> Value {
    let rows: Vec<Value> = ctx
        .full
        .deg2
        .iter()
        .map(|m| {
            let class = &ctx.deg2[m.class];
            let r = descent::existence_threshold(&class.signature);
            json!({
                "class": m.class,
                "trace": m.trace,
                "point_count": tables::point_count_formula(m.trace),
                "lines": m.bound.to_string(),
                "blowup_entry": m.blowup,
                "blowup_type": ctx.full.assigned.get(&m.blowup),
                "candidate_rows": m.candidates,
                "row": m.row,
                "odd": { "sporadic": r.odd.sporadic, "from": r.odd.threshold },
                "even_passing_below_odd_threshold": r.even_passing.iter().filter(|&&q| q < r.odd.threshold).collect::<Vec<_>>(),
                "all": { "sporadic": r.sporadic, "from": r.threshold },
                "cap": r.cap,
            })
        })
        .collect();
    json!(rows)
}

pub fn catalog_summary(file: &CatalogFile, path: &str, rebuilt: bool) -> Value {
    json!({
        "out": path,
        "classes": file.entries.len(),
        "anchored": file.entries.iter().filter(|e| e.type_number.is_some()).count(),
        "seed": file.seed,
        "budget": file.budget,
        "content_hash": file.content_hash,
        "rebuilt": rebuilt,
        "format_version": store::VERSION,
    })
}
