use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ample_core::grpd::GroupoidPresentation;
use ample_core::io::{self, CellDto};
use ample_core::orbitlat;
use ample_core::par::Exec;
use ample_core::paradox::{search_witness, verify_witness};
use ample_core::search::{search_equiv, search_leq, SearchOutcome, SearchParams, DEFAULT_BUDGET};
use ample_core::starconv::{isometries_from_witness, matrix_isometries};
use ample_core::states::{self, StateOutcome, TarskiOutcome, Verdict};
use ample_core::stone::{Cell, Clopen, UnitSpace};
use ample_core::typesg::{verify_equiv, verify_leq, LabeledFamily};
use ample_core::Error;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

const MAX_K: usize = 4;
const MAX_L: usize = 3;
const MAX_DEPTH: usize = 4;

/// Paradoxical decompositions, type semigroups and invariant states of
/// ample groupoids.
#[derive(Parser, Debug)]
#[command(name = "ample", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Print a prose summary instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    /// Write the certificate or report to this file.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Search node budget.
    #[arg(long, global = true, env = "AMPLE_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Run without worker threads.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a paradoxical decomposition.
    VerifyWitness { file: PathBuf },
    /// Search for a (k, l)-paradoxical decomposition of a set.
    FindWitness {
        presentation: String,
        #[arg(long, default_value = "whole")]
        set: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Search for a certificate of [left] = [right] (or ≤ with --leq).
    TypeEq {
        presentation: String,
        /// Family entries separated by `;`, each a set.
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        leq: bool,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Check any certificate, state or Farkas file.
    VerifyCert { file: PathBuf },
    /// Solve for an invariant state at a depth truncation.
    State {
        presentation: String,
        #[arg(long, default_value_t = 0)]
        depth: usize,
        /// Maximize the measure of this set.
        #[arg(long)]
        maximize: Option<String>,
    },
    /// Decide between a paradoxical decomposition and a state.
    Tarski {
        presentation: String,
        #[arg(long, default_value = "whole")]
        set: String,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Purely infinite or stably finite, at a depth truncation.
    Dichotomy {
        presentation: String,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Orbits, quasi-orbits and invariant subsets of a finite presentation.
    Orbits { presentation: String },
    /// Ideal lattice against invariant subsets on a finite principal
    /// presentation, or over all small ones with --sweep.
    IdealCheck {
        presentation: Option<String>,
        #[arg(long)]
        sweep: bool,
        #[arg(long, default_value_t = 5)]
        max_points: usize,
        #[arg(long, default_value_t = 3)]
        max_orbits: usize,
    },
    /// Isometries in the convolution algebra built from a witness.
    Isometries {
        file: PathBuf,
        /// Check the matrix amplification instead of the (2, 1) relations.
        #[arg(long)]
        matrix: bool,
    },
    /// Random order-unit and almost-unperforation probes.
    Probe {
        presentation: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Unverified(_)) { 1 } else { 3 };
        Failure { code, message: e.to_string() }
    }
}

/// Report, human summary and exit code.
struct Outcome {
    report: Value,
    summary: String,
    code: u8,
}

fn outcome(report: Value, summary: impl Into<String>, code: u8) -> Result<Outcome, Failure> {
    Ok(Outcome { report, summary: summary.into(), code })
}

fn load_presentation(arg: &str) -> Result<GroupoidPresentation, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{arg}: {e}")))?;
        return io::parse_presentation(&text).map_err(|e| Failure::input(format!("{arg}: {e}")));
    }
    GroupoidPresentation::builtin(arg).map_err(|e| Failure::input(format!("{e} (and no such file)")))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_doc<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, Failure> {
    io::parse(text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// `whole`, `empty`, or comma-separated cells (digit words or points).
fn parse_set(space: UnitSpace, s: &str) -> Result<Clopen, Failure> {
    match s.trim() {
        "whole" => return Ok(Clopen::whole(space)),
        "empty" => return Ok(Clopen::empty(space)),
        _ => {}
    }
    let cells = s
        .split(',')
        .map(|c| {
            let c = c.trim();
            let dto = match space {
                UnitSpace::Finite(_) => {
                    CellDto::Point(c.parse().map_err(|_| Failure::input(format!("invalid point {c:?}")))?)
                }
                UnitSpace::Shift(_) => CellDto::Cyl(if c == "ε" { String::new() } else { c.to_string() }),
            };
            Ok(dto)
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(io::clopen_from_cells(space, &cells)?)
}

fn parse_family(space: UnitSpace, s: &str) -> Result<LabeledFamily, Failure> {
    let entries = s
        .split(';')
        .enumerate()
        .map(|(i, e)| Ok((parse_set(space, e)?, i + 1)))
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(LabeledFamily::normalize(space, entries)?)
}

fn check_depth(depth: usize) -> Result<(), Failure> {
    if depth > MAX_DEPTH {
        return Err(Failure::input(format!("depth {depth} exceeds the cap {MAX_DEPTH}")));
    }
    Ok(())
}

fn to_value<T: serde::Serialize>(doc: &T) -> Value {
    serde_json::to_value(doc).expect("documents serialize")
}

fn cells_str(c: &Clopen) -> String {
    let cells: Vec<String> = c.cells().iter().map(Cell::to_string).collect();
    format!("{{{}}}", cells.join(", "))
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let exec = if cli.common.sequential { Exec::Sequential } else { Exec::default() };
    let params = |depth: usize| SearchParams::new(depth).budget(cli.common.budget).exec(exec);
    match &cli.command {
        Command::VerifyWitness { file } => {
            let doc: io::WitnessDoc = parse_doc(file, &read(file)?)?;
            let (pres, w) = io::witness_from_doc(&doc)?;
            verify_witness_outcome(&pres, &w)
        }
        Command::FindWitness { presentation, set, k, l, depth } => {
            check_depth(*depth)?;
            if *k > MAX_K || *l > MAX_L || *l == 0 || k <= l {
                return Err(Failure::input(format!("need {MAX_K} >= k > l >= 1 and l <= {MAX_L}, got k = {k}, l = {l}")));
            }
            let pres = load_presentation(presentation)?;
            let a = parse_set(pres.space(), set)?;
            match search_witness(&pres, &a, *k, *l, params(*depth))? {
                SearchOutcome::Found(w) => {
                    verify_witness(&pres, &w).map_err(Error::Unverified)?;
                    let pieces: usize = w.rows.iter().map(Vec::len).sum();
                    outcome(
                        to_value(&io::witness_doc(&pres, &w)),
                        format!("found a ({k}, {l}) witness for {} with {pieces} bisections", cells_str(&a)),
                        0,
                    )
                }
                SearchOutcome::NotFound { budget_hit } => outcome(
                    json!({ "found": false, "depth": depth, "budget_hit": budget_hit }),
                    format!("no ({k}, {l}) witness up to depth {depth}{}", if budget_hit { " (budget hit)" } else { "" }),
                    2,
                ),
            }
        }
        Command::TypeEq { presentation, left, right, leq, depth } => {
            check_depth(*depth)?;
            let pres = load_presentation(presentation)?;
            let f1 = parse_family(pres.space(), left)?;
            let f2 = parse_family(pres.space(), right)?;
            let rel = if *leq { "≤" } else { "∼" };
            let found = if *leq {
                search_leq(&pres, &f1, &f2, params(*depth))?.map(|c| to_value(&io::leq_doc(&pres, &f1, &f2, &c)))
            } else {
                search_equiv(&pres, &f1, &f2, params(*depth))?.map(|c| to_value(&io::equiv_doc(&pres, &f1, &f2, &c)))
            };
            match found {
                SearchOutcome::Found(doc) => outcome(doc, format!("certificate found for left {rel} right"), 0),
                SearchOutcome::NotFound { budget_hit } => outcome(
                    json!({ "found": false, "depth": depth, "budget_hit": budget_hit }),
                    format!("no certificate for left {rel} right up to depth {depth}"),
                    2,
                ),
            }
        }
        Command::VerifyCert { file } => verify_cert(file),
        Command::State { presentation, depth, maximize } => {
            let pres = load_presentation(presentation)?;
            let cs = states::build_constraints(&pres, *depth);
            let target = maximize.as_deref().map(|s| parse_set(pres.space(), s)).transpose()?;
            match states::solve_state(&cs, target.as_ref())? {
                StateOutcome::State(s) => {
                    s.verify(&cs).map_err(Error::Unverified)?;
                    let values: Vec<String> = s.values.iter().map(|(c, v)| format!("μ({c}) = {v}")).collect();
                    let partial = if cs.is_partial() { " (some generators too deep to constrain)" } else { "" };
                    outcome(
                        to_value(&io::state_doc(&pres, &s)),
                        format!("state at depth {}{partial}: {}", s.depth, values.join(", ")),
                        0,
                    )
                }
                StateOutcome::Infeasible(f) => {
                    f.verify(&cs).map_err(Error::Unverified)?;
                    outcome(
                        to_value(&io::farkas_doc(&pres, &f)),
                        format!("no state at depth {}; Farkas certificate over {} rows", f.depth, f.multipliers.len()),
                        1,
                    )
                }
            }
        }
        Command::Tarski { presentation, set, depth } => {
            check_depth(*depth)?;
            let pres = load_presentation(presentation)?;
            let a = parse_set(pres.space(), set)?;
            tarski(&pres, &a, params(*depth))
        }
        Command::Dichotomy { presentation, depth } => {
            check_depth(*depth)?;
            let pres = load_presentation(presentation)?;
            let rep = states::dichotomy(&pres, params(*depth))?;
            let verdict = match rep.verdict {
                Verdict::PurelyInfinite => "purely_infinite",
                Verdict::StablyFinite => "stably_finite",
                Verdict::Inconclusive => "inconclusive",
            };
            let report = json!({
                "depth": rep.depth,
                "lp_depth": rep.lp_depth,
                "minimal": format!("{:?}", rep.minimal).to_lowercase(),
                "cells": rep.cells,
                "paradoxical_cells": rep.paradoxical_cells,
                "faithful_state": rep.faithful_state.as_ref().map(|s| to_value(&io::state_doc(&pres, s))),
                "farkas": rep.farkas.as_ref().map(|f| to_value(&io::farkas_doc(&pres, f))),
                "verdict": verdict,
            });
            let code = if rep.verdict == Verdict::Inconclusive { 2 } else { 0 };
            outcome(
                report,
                format!(
                    "{verdict}: minimal {:?}, {}/{} cells (2, 1)-paradoxical, faithful state {}",
                    rep.minimal,
                    rep.paradoxical_cells,
                    rep.cells,
                    if rep.faithful_state.is_some() { "found" } else { "not found" }
                ),
                code,
            )
        }
        Command::Orbits { presentation } => {
            let pres = load_presentation(presentation)?;
            let (o, q) = orbitlat::orbits_and_quasiorbits(&pres)?;
            let lattice = orbitlat::invariant_lattice(&pres)?;
            let sets: Vec<Vec<usize>> =
                lattice.sets.iter().map(|&s| (0..o.n).filter(|&x| s >> x & 1 == 1).collect()).collect();
            outcome(
                json!({ "orbits": o.blocks, "quasi_orbit_of": q, "invariant_sets": sets }),
                format!("{} orbits {:?}; {} invariant subsets", o.len(), o.blocks, sets.len()),
                0,
            )
        }
        Command::IdealCheck { presentation, sweep, max_points, max_orbits } => {
            if *sweep {
                if *max_points > 6 {
                    return Err(Failure::input("sweeps are limited to 6 points"));
                }
                let rep = orbitlat::sweep(*max_points, *max_orbits, exec)?;
                let code = if rep.failures.is_empty() { 0 } else { 1 };
                return outcome(
                    json!({ "presentations": rep.presentations, "failures": rep.failures }),
                    format!("{} presentations checked, {} failures", rep.presentations, rep.failures.len()),
                    code,
                );
            }
            let Some(p) = presentation else {
                return Err(Failure::input("give a presentation or --sweep"));
            };
            let pres = load_presentation(p)?;
            let rep = orbitlat::ideal_check(&pres)?;
            let failures = rep.failures();
            let report = json!({
                "points": rep.points,
                "orbits": rep.orbits,
                "arrows": rep.arrows,
                "ideals": rep.ideals,
                "invariant_sets": rep.invariant_sets,
                "exhaustive_ideals": rep.brute_force_ideals,
                "primes": rep.primes.iter().map(|&(t, q)| json!({ "theta": t, "quasi_orbit": q })).collect::<Vec<_>>(),
                "failures": failures,
            });
            let code = if rep.holds() { 0 } else { 1 };
            outcome(
                report,
                format!(
                    "{} ideals, {} invariant subsets, {} orbits; {}",
                    rep.ideals,
                    rep.invariant_sets,
                    rep.orbits.len(),
                    if failures.is_empty() { "all checks pass".to_string() } else { format!("failed: {}", failures.join(", ")) }
                ),
                code,
            )
        }
        Command::Isometries { file, matrix } => {
            let doc: io::WitnessDoc = parse_doc(file, &read(file)?)?;
            let (pres, w) = io::witness_from_doc(&doc)?;
            if *matrix {
                let (_, rep) = matrix_isometries(&pres, &w)?;
                let report = json!({
                    "k": rep.k, "l": rep.l, "pieces": rep.pieces,
                    "orthogonal": rep.orthogonal,
                    "sources_fill": rep.sources_fill,
                    "ranges_dominated": rep.ranges_dominated,
                });
                let summary = format!(
                    "({}, {}) amplification with {} partial isometries: Σa*a = 1⊗1_A {}, Σaa* ≤ 1_l⊗1_A {}",
                    rep.k, rep.l, rep.pieces, rep.sources_fill, rep.ranges_dominated
                );
                outcome(report, summary, if rep.holds() { 0 } else { 1 })
            } else {
                let rep = isometries_from_witness(&pres, &w)?;
                let report = json!({
                    "f": to_value(&io::element_doc(&pres, &rep.f)),
                    "g": to_value(&io::element_doc(&pres, &rep.g)),
                    "f_isometry": rep.f_isometry,
                    "g_isometry": rep.g_isometry,
                    "ranges_dominated": rep.ranges_dominated,
                    "range_sum": to_value(&io::element_doc(&pres, &rep.range_sum)),
                });
                let summary = format!(
                    "f*f = 1_A {}, g*g = 1_A {}, ff* + gg* ≤ 1_A {}",
                    rep.f_isometry, rep.g_isometry, rep.ranges_dominated
                );
                outcome(report, summary, if rep.holds() { 0 } else { 1 })
            }
        }
        Command::Probe { presentation, samples, seed, depth } => {
            check_depth(*depth)?;
            let pres = load_presentation(presentation)?;
            let rep = states::probes(&pres, *samples, *seed, params(*depth))?;
            let units = rep
                .order_unit
                .iter()
                .map(|p| {
                    json!({
                        "x": io::cells_dto(&p.x),
                        "y": io::cells_dto(&p.y),
                        "n": p.found.as_ref().map(|(n, _)| n),
                    })
                })
                .collect::<Vec<_>>();
            let counter = rep
                .counterexamples
                .iter()
                .map(|c| {
                    json!({
                        "x": io::cells_dto(&c.x),
                        "y": io::cells_dto(&c.y),
                        "n": c.n,
                        "search_depth": c.search_depth,
                        "certificate": to_value(&io::leq_doc(
                            &pres,
                            &LabeledFamily::multiple(&c.x, c.n + 1),
                            &LabeledFamily::multiple(&c.y, c.n),
                            &c.certificate,
                        )),
                    })
                })
                .collect::<Vec<_>>();
            let bounded = rep.order_unit.iter().filter(|p| p.found.is_some()).count();
            outcome(
                json!({
                    "depth": rep.depth,
                    "seed": rep.seed,
                    "samples": rep.samples,
                    "order_unit": units,
                    "unperforation_tested": rep.unperforation_tested,
                    "counterexamples": counter,
                }),
                format!(
                    "{bounded}/{} pairs with [y] ≤ n[x] for some n ≤ 4; {} almost-unperforation counterexamples",
                    rep.samples,
                    rep.counterexamples.len()
                ),
                0,
            )
        }
    }
}

fn verify_witness_outcome(pres: &GroupoidPresentation, w: &ample_core::paradox::ParadoxWitness) -> Result<Outcome, Failure> {
    match verify_witness(pres, w) {
        Ok(()) => outcome(
            json!({ "verified": true }),
            format!("verified: {} is ({}, {})-paradoxical", cells_str(&w.a), w.k, w.l),
            0,
        ),
        Err(reason) => outcome(json!({ "verified": false, "reason": reason }), format!("rejected: {reason}"), 1),
    }
}

fn check_outcome(check: Result<(), String>, what: &str) -> Result<Outcome, Failure> {
    match check {
        Ok(()) => outcome(json!({ "verified": true, "kind": what }), format!("verified {what}"), 0),
        Err(reason) => outcome(
            json!({ "verified": false, "kind": what, "reason": reason }),
            format!("rejected {what}: {reason}"),
            1,
        ),
    }
}

fn verify_cert(file: &Path) -> Result<Outcome, Failure> {
    let text = read(file)?;
    let head: Value = parse_doc(file, &text)?;
    let schema = head.get("schema").and_then(Value::as_str).unwrap_or_default().to_string();
    match schema.as_str() {
        io::WITNESS_SCHEMA => {
            let (pres, w) = io::witness_from_doc(&parse_doc(file, &text)?)?;
            verify_witness_outcome(&pres, &w)
        }
        io::EQUIV_SCHEMA => {
            let c = io::equiv_from_doc(&parse_doc(file, &text)?)?;
            check_outcome(verify_equiv(&c.pres, &c.left, &c.right, &c.cert), "equivalence certificate")
        }
        io::LEQ_SCHEMA => {
            let c = io::leq_from_doc(&parse_doc(file, &text)?)?;
            check_outcome(verify_leq(&c.pres, &c.left, &c.right, &c.cert), "subequivalence certificate")
        }
        io::STATE_SCHEMA => {
            let (pres, s) = io::state_from_doc(&parse_doc(file, &text)?)?;
            check_outcome(s.verify(&states::build_constraints(&pres, s.depth)), "state")
        }
        io::FARKAS_SCHEMA => {
            let (pres, f) = match io::farkas_from_doc(&parse_doc(file, &text)?) {
                Err(Error::Unverified(reason)) => return check_outcome(Err(reason), "Farkas certificate"),
                r => r?,
            };
            check_outcome(f.verify(&states::build_constraints(&pres, f.depth)), "Farkas certificate")
        }
        other => Err(Failure::input(format!("{}: unknown schema {other:?}", file.display()))),
    }
}

fn tarski(pres: &GroupoidPresentation, a: &Clopen, params: SearchParams) -> Result<Outcome, Failure> {
    let rep = states::tarski_report(pres, a, params)?;
    let base = |kind: &str, body: Value| {
        json!({ "depth": rep.depth, "lp_depth": rep.lp_depth, "outcome": kind, "certificate": body })
    };
    match &rep.outcome {
        TarskiOutcome::Paradox { witness, n } => {
            verify_witness(pres, witness).map_err(Error::Unverified)?;
            outcome(
                base("paradox", to_value(&io::witness_doc(pres, witness))),
                format!("paradox: {} is ({}, {n})-paradoxical", cells_str(a), n + 1),
                0,
            )
        }
        TarskiOutcome::State { state, partial } => {
            state.verify(&states::build_constraints(pres, state.depth)).map_err(Error::Unverified)?;
            let mut report = base("state", to_value(&io::state_doc(pres, state)));
            report["partial"] = json!(partial);
            let values: Vec<String> = state.values.iter().map(|(c, v)| format!("μ({c}) = {v}")).collect();
            outcome(report, format!("state with μ(A) = 1 at depth {}: {}", state.depth, values.join(", ")), 0)
        }
        TarskiOutcome::Vanishing { state } => outcome(
            base("vanishing", to_value(&io::state_doc(pres, state))),
            format!("inconclusive: every state at depth {} vanishes on A", rep.lp_depth),
            2,
        ),
        TarskiOutcome::Inconclusive { farkas, budget_hit } => {
            let body = farkas.as_ref().map(|f| to_value(&io::farkas_doc(pres, f))).unwrap_or(Value::Null);
            let mut report = base("inconclusive", body);
            report["budget_hit"] = json!(budget_hit);
            outcome(report, "inconclusive: no state at the LP depth and no witness found", 2)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let json = io::to_json(&out.report);
            if let Some(path) = &cli.common.output {
                if let Err(e) = fs::write(path, &json) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(3);
                }
            }
            if cli.common.human {
                println!("{}", out.summary);
            } else if cli.common.output.is_none() {
                print!("{json}");
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
