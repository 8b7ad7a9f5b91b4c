//! Command-line front end: argument parsing, name resolution, and
//! rendering of results as text or JSON.
//!
//! Every command accumulates its output into a string and returns it
//! with an exit code: 0 for success or a true answer, 1 for a false
//! answer or discovered violations, 2 for any error. That makes runs
//! capturable and byte-for-byte replayable from recorded findings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gsheaf_core::forcing::{
    explain_at, generic_model, is_generic_filter, Evaluator, SemanticsMode,
};
use gsheaf_core::logic::{godel_translate, parse_formula, Formula};
use gsheaf_core::presheaf::{is_sheaf, stalk, GPresheaf, Section};
use gsheaf_core::structures::InvarianceMode;
use gsheaf_core::topology::{enumerate_filters, maximal_filters, Filter, PointSet};
use gsheaf_core::CheckReport;

use crate::document::{document_string, load_document, DocError, LoadedModel, Names};
use crate::generate::{generated_document, random_presheaf, rng_for, Limits};
use crate::search::{self, FuzzConfig};

#[derive(Parser)]
#[command(
    name = "gsheaf",
    version,
    about = "Equivariant presheaves of finite structures: validation, forcing, \
             stalks, filters, generic models, and seeded counterexample search"
)]
pub struct Cli {
    /// Emit structured JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check that a model document is well formed and lawful.
    Validate { document: PathBuf },
    /// Evaluate classical satisfaction in the structure on one open.
    Satisfy {
        document: PathBuf,
        #[arg(long)]
        open: String,
        #[arg(long)]
        formula: String,
        /// Comma-separated bindings like v0=a,v1=b.
        #[arg(long)]
        assign: Option<String>,
    },
    /// Decide whether a section forces a formula at a point or over an open.
    Force {
        document: PathBuf,
        /// Query at a point; the section then lives on the whole space.
        #[arg(long, conflicts_with = "open")]
        point: Option<String>,
        /// Query over an open; the section lives on it.
        #[arg(long)]
        open: Option<String>,
        #[arg(long)]
        formula: String,
        /// Comma-separated element names, one per formula parameter.
        #[arg(long)]
        section: Option<String>,
        /// Override the document's quantifier reading.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Apply the double-negation translation before forcing.
        #[arg(long)]
        godel: bool,
    },
    /// Print the stalk at a point: its opens, germ classes, and representatives.
    Stalk {
        document: PathBuf,
        #[arg(long)]
        point: String,
    },
    /// List the filters of nonempty opens.
    Filters {
        document: PathBuf,
        /// Only the maximal ones.
        #[arg(long)]
        maximal: bool,
    },
    /// Test a filter for genericity and summarize its generic model.
    Generic {
        document: PathBuf,
        /// Comma-separated open names spanning the filter.
        #[arg(long)]
        filter: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Run one named semantic check, or all of them.
    Check {
        document: PathBuf,
        #[arg(long, default_value = "all")]
        theorem: String,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Search random instances for violations; shrink and record replays.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        budget: usize,
        /// Restrict the search to one or more named targets.
        #[arg(long = "target")]
        targets: Vec<String>,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Emit random valid model documents.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Only emit presheaves satisfying the gluing laws.
        #[arg(long)]
        force_sheaf: bool,
        #[arg(long)]
        max_points: Option<usize>,
        #[arg(long)]
        max_opens: Option<usize>,
        #[arg(long)]
        max_universe: Option<usize>,
        #[arg(long)]
        max_group: Option<usize>,
        /// Fix the invariance discipline instead of mixing both.
        #[arg(long, value_enum)]
        invariance: Option<InvarianceArg>,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Copy, Clone, ValueEnum)]
pub enum ModeArg {
    Local,
    Literal,
}

impl From<ModeArg> for SemanticsMode {
    fn from(m: ModeArg) -> SemanticsMode {
        match m {
            ModeArg::Local => SemanticsMode::Local,
            ModeArg::Literal => SemanticsMode::Literal,
        }
    }
}

#[derive(Debug, Copy, Clone, ValueEnum)]
pub enum InvarianceArg {
    Componentwise,
    Diagonal,
}

impl From<InvarianceArg> for InvarianceMode {
    fn from(m: InvarianceArg) -> InvarianceMode {
        match m {
            InvarianceArg::Componentwise => InvarianceMode::Componentwise,
            InvarianceArg::Diagonal => InvarianceMode::Diagonal,
        }
    }
}

/// Parses and runs a full command line (without the program name) and
/// returns the exit code with everything the command printed.
pub fn execute_args(args: &[String]) -> (i32, String) {
    let argv = std::iter::once(String::from("gsheaf")).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let json = cli.json;
    match dispatch(cli) {
        Ok(done) => done,
        Err(msg) => {
            if json {
                (2, pretty(&json!({ "error": msg })))
            } else {
                (2, format!("error: {msg}\n"))
            }
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values render");
    s.push('\n');
    s
}

fn dispatch(cli: Cli) -> Result<(i32, String), String> {
    let json = cli.json;
    match cli.command {
        Command::Validate { document } => cmd_validate(&document, json),
        Command::Satisfy { document, open, formula, assign } => {
            cmd_satisfy(&document, &open, &formula, assign.as_deref(), json)
        }
        Command::Force { document, point, open, formula, section, mode, godel } => cmd_force(
            &document,
            point.as_deref(),
            open.as_deref(),
            &formula,
            section.as_deref(),
            mode,
            godel,
            json,
        ),
        Command::Stalk { document, point } => cmd_stalk(&document, &point, json),
        Command::Filters { document, maximal } => cmd_filters(&document, maximal, json),
        Command::Generic { document, filter, depth } => {
            cmd_generic(&document, &filter, depth, json)
        }
        Command::Check { document, theorem, depth } => {
            cmd_check(&document, &theorem, depth, json)
        }
        Command::Fuzz { seed, budget, targets, depth } => {
            cmd_fuzz(seed, budget, targets, depth, json)
        }
        Command::Generate {
            seed,
            count,
            force_sheaf,
            max_points,
            max_opens,
            max_universe,
            max_group,
            invariance,
            out,
        } => {
            let mut limits = Limits { force_sheaf, ..Limits::default() };
            if let Some(n) = max_points {
                limits.max_points = n;
            }
            if let Some(n) = max_opens {
                limits.max_opens = n;
            }
            if let Some(n) = max_universe {
                limits.max_universe = n;
            }
            if let Some(n) = max_group {
                limits.max_group = n;
            }
            limits.invariance = invariance.map(Into::into);
            cmd_generate(seed, count, &limits, out.as_deref())
        }
    }
}

fn load(path: &Path) -> Result<LoadedModel, String> {
    load_document(path).map_err(|e| match e {
        DocError::Invalid(report) => format!("the document fails validation:\n{report}"),
        other => other.to_string(),
    })
}

fn resolve_open(names: &Names, name: &str) -> Result<PointSet, String> {
    names.open(name).ok_or_else(|| format!("unknown open '{name}'"))
}

fn resolve_point(names: &Names, name: &str) -> Result<usize, String> {
    names.point(name).ok_or_else(|| format!("unknown point '{name}'"))
}

fn resolve_element(names: &Names, u: PointSet, name: &str) -> Result<usize, String> {
    names.element(u, name).ok_or_else(|| {
        format!("unknown element '{name}' on the open {}", names.open_name(u))
    })
}

fn parse_section_values(
    names: &Names,
    domain: PointSet,
    text: Option<&str>,
) -> Result<Vec<usize>, String> {
    let Some(text) = text else { return Ok(Vec::new()) };
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|name| resolve_element(names, domain, name.trim())).collect()
}

fn parse_assignment(
    names: &Names,
    u: PointSet,
    text: Option<&str>,
) -> Result<BTreeMap<usize, usize>, String> {
    let mut env = BTreeMap::new();
    let Some(text) = text else { return Ok(env) };
    if text.trim().is_empty() {
        return Ok(env);
    }
    for piece in text.split(',') {
        let piece = piece.trim();
        let Some((var, value)) = piece.split_once('=') else {
            return Err(format!("assignment '{piece}' is not of the form v0=element"));
        };
        let Some(index) = var.trim().strip_prefix('v').and_then(|d| d.parse::<usize>().ok())
        else {
            return Err(format!("'{}' is not a variable like v0", var.trim()));
        };
        env.insert(index, resolve_element(names, u, value.trim())?);
    }
    Ok(env)
}

fn sorted_opens(p: &GPresheaf) -> Vec<PointSet> {
    let mut opens: Vec<PointSet> = p.space.nonempty_opens().collect();
    opens.sort_by_key(|u| (u.len(), u.bits()));
    opens
}

fn report_json(id: &str, r: &CheckReport) -> Value {
    json!({
        "id": id,
        "check": r.check,
        "ok": r.is_ok(),
        "bounds": r.bounds.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
        "violations": r
            .violations
            .iter()
            .map(|v| json!({ "rule": v.rule, "witness": v.witness }))
            .collect::<Vec<_>>(),
    })
}

fn cmd_validate(path: &Path, json: bool) -> Result<(i32, String), String> {
    let model = load(path)?;
    let p = &model.presheaf;
    let names = &model.names;
    let opens = sorted_opens(p);
    let first = p.objects.values().next().expect("validated presheaves are inhabited");
    let sheaf = is_sheaf(p).is_ok();
    if json {
        let value = json!({
            "valid": true,
            "points": names.points,
            "opens": opens.iter().map(|&u| names.open_name(u)).collect::<Vec<_>>(),
            "group_order": first.group.order(),
            "invariance": first.mode.as_str(),
            "semantics": model.semantics.as_str(),
            "sheaf": sheaf,
            "structures": opens
                .iter()
                .map(|&u| json!({
                    "open": names.open_name(u),
                    "universe": p.objects[&u].universe_size,
                }))
                .collect::<Vec<_>>(),
        });
        return Ok((0, pretty(&value)));
    }
    let mut out = String::new();
    let _ = writeln!(out, "the document is a valid presheaf");
    let _ = writeln!(out, "points: {}", names.points.join(", "));
    let _ = writeln!(
        out,
        "opens: {}",
        opens.iter().map(|&u| names.open_name(u)).collect::<Vec<_>>().join(", ")
    );
    let _ = writeln!(out, "group order: {}", first.group.order());
    let _ = writeln!(out, "invariance: {}", first.mode.as_str());
    let _ = writeln!(out, "quantifier reading: {}", model.semantics.as_str());
    for &u in &opens {
        let _ = writeln!(
            out,
            "  {}: {} element(s)",
            names.open_name(u),
            p.objects[&u].universe_size
        );
    }
    let _ = writeln!(out, "sheaf: {}", if sheaf { "yes" } else { "no" });
    Ok((0, out))
}

fn cmd_satisfy(
    path: &Path,
    open: &str,
    formula: &str,
    assign: Option<&str>,
    json: bool,
) -> Result<(i32, String), String> {
    let model = load(path)?;
    let names = &model.names;
    let u = resolve_open(names, open)?;
    let m = &model.presheaf.objects[&u];
    let phi = parse_formula(formula, &m.sig).map_err(|e| format!("formula: {e}"))?;
    let env = parse_assignment(names, u, assign)?;
    let holds = m.satisfies(&phi, &env).map_err(|e| format!("evaluation: {e}"))?;
    let code = i32::from(!holds);
    if json {
        let value = json!({
            "open": names.open_name(u),
            "formula": phi.to_string(),
            "assignment": env
                .iter()
                .map(|(&v, &e)| (format!("v{v}"), json!(names.element_name(u, e))))
                .collect::<serde_json::Map<_, _>>(),
            "satisfied": holds,
        });
        return Ok((code, pretty(&value)));
    }
    let verdict = if holds { "satisfied" } else { "not satisfied" };
    Ok((code, format!("{phi} is {verdict} on {}\n", names.open_name(u))))
}

#[allow(clippy::too_many_arguments)]
fn cmd_force(
    path: &Path,
    point: Option<&str>,
    open: Option<&str>,
    formula: &str,
    section: Option<&str>,
    mode: Option<ModeArg>,
    godel: bool,
    json: bool,
) -> Result<(i32, String), String> {
    let model = load(path)?;
    let p = &model.presheaf;
    let names = &model.names;
    let mode = mode.map(SemanticsMode::from).unwrap_or(model.semantics);
    let sig =
        &p.objects.values().next().expect("validated presheaves are inhabited").sig;
    let parsed = parse_formula(formula, sig).map_err(|e| format!("formula: {e}"))?;
    let phi: Formula = if godel { godel_translate(&parsed) } else { parsed };
    match (point, open) {
        (Some(point), None) => {
            let x = resolve_point(names, point)?;
            let domain = p.space.full_set();
            let values = parse_section_values(names, domain, section)?;
            let s = Section { domain, values };
            let verdict =
                explain_at(p, mode, x, &phi, &s).map_err(|e| format!("forcing: {e}"))?;
            let code = i32::from(!verdict.forced);
            if json {
                let witnesses: Vec<Value> = verdict
                    .witnesses
                    .iter()
                    .map(|w| {
                        json!({
                            "clause": w.clause,
                            "point": names.point_name(w.point),
                            "domain": names.open_name(w.domain),
                            "open": names.open_name(w.open),
                            "element": w.element.map(|e| names.element_name(w.open, e)),
                            "subformula": w.subformula,
                            "bindings": w
                                .bindings
                                .iter()
                                .map(|&(v, e)| json!([format!("v{v}"), e]))
                                .collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                let value = json!({
                    "mode": mode.as_str(),
                    "point": names.point_name(x),
                    "formula": phi.to_string(),
                    "section": names.section_names(&verdict.section),
                    "forced": verdict.forced,
                    "witnesses": witnesses,
                });
                return Ok((code, pretty(&value)));
            }
            let mut out = String::new();
            let answer = if verdict.forced { "forced" } else { "not forced" };
            let _ = writeln!(
                out,
                "{phi} is {answer} at {} ({} reading)",
                names.point_name(x),
                mode.as_str()
            );
            for w in &verdict.witnesses {
                let elem = match w.element {
                    Some(e) => format!(" with {}", names.element_name(w.open, e)),
                    None => String::new(),
                };
                let _ = writeln!(
                    out,
                    "  {} at {} via {}{}: {}",
                    w.clause,
                    names.point_name(w.point),
                    names.open_name(w.open),
                    elem,
                    w.subformula
                );
            }
            Ok((code, out))
        }
        (None, Some(open)) => {
            let u = resolve_open(names, open)?;
            let values = parse_section_values(names, u, section)?;
            let s = Section { domain: u, values };
            let forced = Evaluator::new(p, mode)
                .forces_on(u, &phi, &s)
                .map_err(|e| format!("forcing: {e}"))?;
            let code = i32::from(!forced);
            if json {
                let value = json!({
                    "mode": mode.as_str(),
                    "open": names.open_name(u),
                    "formula": phi.to_string(),
                    "section": names.section_names(&s),
                    "forced": forced,
                });
                return Ok((code, pretty(&value)));
            }
            let answer = if forced { "forced" } else { "not forced" };
            Ok((
                code,
                format!(
                    "{phi} is {answer} on {} ({} reading)\n",
                    names.open_name(u),
                    mode.as_str()
                ),
            ))
        }
        _ => Err(String::from("pass exactly one of --point or --open")),
    }
}

fn cmd_stalk(path: &Path, point: &str, json: bool) -> Result<(i32, String), String> {
    let model = load(path)?;
    let p = &model.presheaf;
    let names = &model.names;
    let x = resolve_point(names, point)?;
    let st = stalk(p, x).map_err(|r| format!("stalk: {r}"))?;
    let classes = st.colimit.reps.len();
    if json {
        let value = json!({
            "point": names.point_name(x),
            "opens": st.opens.iter().map(|&u| names.open_name(u)).collect::<Vec<_>>(),
            "classes": classes,
            "representatives": st
                .colimit
                .reps
                .iter()
                .map(|&(i, e)| {
                    let u = st.opens[i];
                    json!({
                        "open": names.open_name(u),
                        "element": names.element_name(u, e),
                    })
                })
                .collect::<Vec<_>>(),
            "cocone": st
                .opens
                .iter()
                .enumerate()
                .map(|(i, &u)| json!({
                    "open": names.open_name(u),
                    "classes": st.colimit.cocone[i],
                }))
                .collect::<Vec<_>>(),
        });
        return Ok((0, pretty(&value)));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "stalk at {}: opens {}",
        names.point_name(x),
        st.opens.iter().map(|&u| names.open_name(u)).collect::<Vec<_>>().join(", ")
    );
    let _ = writeln!(out, "germ classes: {classes}");
    for (c, &(i, e)) in st.colimit.reps.iter().enumerate() {
        let u = st.opens[i];
        let members: Vec<String> = st
            .opens
            .iter()
            .enumerate()
            .flat_map(|(j, &v)| {
                let cocone = &st.colimit.cocone[j];
                (0..st.system.objects[j].universe_size)
                    .filter(|&y| cocone[y] == c)
                    .map(move |y| format!("{}@{}", names.element_name(v, y), names.open_name(v)))
                    .collect::<Vec<_>>()
            })
            .collect();
        let _ = writeln!(
            out,
            "  class {c}: representative {}@{}, contains {}",
            names.element_name(u, e),
            names.open_name(u),
            members.join(", ")
        );
    }
    Ok((0, out))
}

fn cmd_filters(path: &Path, maximal: bool, json: bool) -> Result<(i32, String), String> {
    let model = load(path)?;
    let p = &model.presheaf;
    let names = &model.names;
    let top = maximal_filters(&p.space);
    let listed: Vec<Filter> =
        if maximal { top.clone() } else { enumerate_filters(&p.space, true) };
    let is_maximal = |f: &Filter| {
        let mine: std::collections::BTreeSet<PointSet> = f.members().iter().copied().collect();
        top.iter().any(|g| {
            let theirs: std::collections::BTreeSet<PointSet> =
                g.members().iter().copied().collect();
            mine == theirs
        })
    };
    if json {
        let value = json!({
            "count": listed.len(),
            "filters": listed
                .iter()
                .map(|f| json!({
                    "members": f
                        .members()
                        .iter()
                        .map(|&u| names.open_name(u))
                        .collect::<Vec<_>>(),
                    "core": names.open_name(f.core()),
                    "maximal": is_maximal(f),
                }))
                .collect::<Vec<_>>(),
        });
        return Ok((0, pretty(&value)));
    }
    let mut out = String::new();
    let kind = if maximal { "maximal filter(s)" } else { "nontrivial filter(s)" };
    let _ = writeln!(out, "{} {kind}", listed.len());
    for (i, f) in listed.iter().enumerate() {
        let mut members: Vec<PointSet> = f.members().to_vec();
        members.sort_by_key(|u| (u.len(), u.bits()));
        let tag = if !maximal && is_maximal(f) { " (maximal)" } else { "" };
        let _ = writeln!(
            out,
            "  filter {i}{tag}: members {}; core {}",
            members.iter().map(|&u| names.open_name(u)).collect::<Vec<_>>().join(", "),
            names.open_name(f.core())
        );
    }
    Ok((0, out))
}

fn cmd_generic(
    path: &Path,
    filter: &str,
    depth: usize,
    json: bool,
) -> Result<(i32, String), String> {
    let model = load(path)?;
    let p = &model.presheaf;
    let names = &model.names;
    let members: Vec<PointSet> = filter
        .split(',')
        .map(|name| resolve_open(names, name.trim()))
        .collect::<Result<_, _>>()?;
    let f = Filter::from_members(&p.space, members).map_err(|r| format!("filter: {r}"))?;
    let report = is_generic_filter(p, &f, depth, model.semantics)
        .map_err(|r| format!("genericity: {r}"))?;
    let gm = generic_model(p, &f).map_err(|r| format!("generic model: {r}"))?;
    let code = i32::from(!report.generic);
    let member_names: Vec<String> =
        gm.members.iter().map(|&u| names.open_name(u)).collect();
    if json {
        let value = json!({
            "filter": f.members().iter().map(|&u| names.open_name(u)).collect::<Vec<_>>(),
            "depth": report.depth,
            "mode": report.mode.as_str(),
            "generic": report.generic,
            "failures": report
                .failures
                .iter()
                .map(|fail| json!({
                    "condition": fail.condition,
                    "member": names.open_name(fail.member),
                    "formula": fail.formula,
                    "parameters": fail
                        .parameters
                        .iter()
                        .map(|&e| names.element_name(fail.member, e))
                        .collect::<Vec<_>>(),
                }))
                .collect::<Vec<_>>(),
            "model": {
                "members": member_names,
                "universe": gm.structure().universe_size,
                "classes": gm.colimit.reps.len(),
            },
        });
        return Ok((code, pretty(&value)));
    }
    let mut out = String::new();
    let verdict = if report.generic { "generic" } else { "not generic" };
    let _ = writeln!(
        out,
        "the filter is {verdict} at depth {} ({} reading)",
        report.depth,
        report.mode.as_str()
    );
    for fail in &report.failures {
        let values: Vec<String> =
            fail.parameters.iter().map(|&e| names.element_name(fail.member, e)).collect();
        let _ = writeln!(
            out,
            "  condition {}: {} with parameters [{}] on {}",
            fail.condition,
            fail.formula,
            values.join(", "),
            names.open_name(fail.member)
        );
    }
    let _ = writeln!(
        out,
        "generic model: members {}; universe size {}",
        member_names.join(", "),
        gm.structure().universe_size
    );
    Ok((code, out))
}

fn cmd_check(
    path: &Path,
    theorem: &str,
    depth: usize,
    json: bool,
) -> Result<(i32, String), String> {
    let model = load(path)?;
    let p = &model.presheaf;
    let mode = model.semantics;
    let reports: Vec<(String, CheckReport)> = if theorem == "all" {
        search::run_all(p, mode, depth)
    } else {
        match search::run_check(p, mode, theorem, depth) {
            Some(r) => vec![(String::from(theorem), r)],
            None => {
                return Err(format!(
                    "unknown theorem '{theorem}'; known: all, {}",
                    search::CHECK_IDS.join(", ")
                ))
            }
        }
    };
    let total: usize = reports.iter().map(|(_, r)| r.violations.len()).sum();
    let code = i32::from(total != 0);
    if json {
        let value = json!({
            "depth": depth,
            "mode": mode.as_str(),
            "violations": total,
            "reports": reports
                .iter()
                .map(|(id, r)| report_json(id, r))
                .collect::<Vec<_>>(),
        });
        return Ok((code, pretty(&value)));
    }
    let mut out = String::new();
    for (id, report) in &reports {
        if report.is_ok() {
            let _ = writeln!(out, "{id}: ok");
        } else {
            let _ = writeln!(out, "{id}: {} violation(s)", report.violations.len());
            for v in report.violations.iter().take(8) {
                let _ = writeln!(out, "  [{}] {}", v.rule, v.witness);
            }
            if report.violations.len() > 8 {
                let _ = writeln!(out, "  ... and {} more", report.violations.len() - 8);
            }
        }
    }
    let _ = writeln!(out, "violations: {total}");
    Ok((code, out))
}

fn cmd_fuzz(
    seed: u64,
    budget: usize,
    targets: Vec<String>,
    depth: usize,
    json: bool,
) -> Result<(i32, String), String> {
    let config = FuzzConfig { seed, budget, targets, depth, ..FuzzConfig::default() };
    let outcome = search::fuzz(&config)?;
    let code = i32::from(!outcome.violations.is_empty());
    if json {
        let value = serde_json::to_value(&outcome).expect("outcomes serialize");
        return Ok((code, pretty(&value)));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "fuzz: {} round(s) over {} target(s), seed {}",
        outcome.rounds,
        outcome.targets.len(),
        outcome.seed
    );
    let _ = writeln!(out, "violations: {}", outcome.violations.len());
    let _ = writeln!(out, "findings: {}", outcome.findings.len());
    for finding in outcome.violations.iter().chain(&outcome.findings) {
        let kind = if finding.experiment { "finding" } else { "violation" };
        let _ = writeln!(
            out,
            "{kind} [{}] round {}: {}",
            finding.target, finding.round, finding.details
        );
        let doc =
            serde_json::to_string(&finding.document).expect("documents serialize");
        let _ = writeln!(out, "  document: {doc}");
        for q in &finding.queries {
            let shown: Vec<String> = q
                .argv
                .iter()
                .map(|a| {
                    if a.contains(' ') {
                        format!("'{a}'")
                    } else {
                        a.clone()
                    }
                })
                .collect();
            let _ = writeln!(
                out,
                "  replay (exit {}): gsheaf {}",
                q.exit,
                shown.join(" ")
            );
        }
    }
    Ok((code, out))
}

fn cmd_generate(
    seed: u64,
    count: usize,
    limits: &Limits,
    out: Option<&Path>,
) -> Result<(i32, String), String> {
    let docs: Vec<_> = (0..count)
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            generated_document(&random_presheaf(&mut rng, limits))
        })
        .collect();
    let payload = if count == 1 {
        document_string(&docs[0])
    } else {
        pretty(&serde_json::to_value(&docs).expect("documents serialize"))
    };
    match out {
        Some(path) => {
            std::fs::write(path, &payload).map_err(|e| format!("cannot write: {e}"))?;
            Ok((0, format!("wrote {count} document(s) to {}\n", path.display())))
        }
        None => Ok((0, payload)),
    }
}
