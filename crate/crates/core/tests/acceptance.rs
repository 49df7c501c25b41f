//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ample_core::grpd::{Bisection, GroupoidPresentation, PartialMap};
use ample_core::lp::{rat, Rational};
use ample_core::orbitlat;
use ample_core::par::Exec;
use ample_core::paradox::{cuntz_witness, leq_to_witness, search_witness, verify_witness, weaken, witness_to_leq, ParadoxWitness, RowEntry};
use ample_core::search::SearchParams;
use ample_core::starconv::{isometries_from_witness, matrix_isometries, ConvAlgebra, ConvElement, TraceFunctional};
use ample_core::states::{
    build_constraints, dichotomy, solve_state, tarski_report, FarkasCertificate, StateOutcome, StateVector, TarskiOutcome,
};
use ample_core::stone::{boolean, BoolOp, Cell, Clopen, LocallyConstant, UnitSpace};
use ample_core::typesg::{rho_decomposition, rho_invariance_cert, rho_welldef_cert, verify_equiv, verify_leq, LabeledFamily};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Wall-clock limit for each Cuntz witness search.
const SEARCH_LIMIT: Duration = Duration::from_secs(1);
/// Wall-clock limit for the ideal sweep.
const SWEEP_LIMIT: Duration = Duration::from_secs(10);
const FUZZED_WITNESSES: usize = 500;
const FINITE_CONTROLS: usize = 100;
const RHO_CASES: usize = 100;
const TRACE_PAIRS: usize = 200;
const ALGEBRA_CHECKS: usize = 300;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn cuntz(n: u8) -> GroupoidPresentation {
    GroupoidPresentation::cuntz(n).unwrap()
}

fn prefixes(n: u8, max: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    let mut level = vec![vec![]];
    for _ in 0..max {
        level = level
            .iter()
            .flat_map(|w: &Vec<u8>| {
                (1..=n).map(move |i| {
                    let mut v = w.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

fn criterion_1() -> Verdict {
    let mut checked = 0;
    let mut slowest = Duration::ZERO;
    for n in [2u8, 3] {
        let c = cuntz(n);
        for alpha in prefixes(n, 2) {
            let w = cuntz_witness(&c, &alpha).unwrap();
            if let Err(e) = verify_witness(&c, &w) {
                return verdict(false, format!("constructed witness for cuntz:{n}, α = {alpha:?} rejected: {e}"));
            }
            let start = Instant::now();
            let found = search_witness(&c, &w.a, 2, 1, SearchParams::new(alpha.len() + 1)).unwrap();
            let took = start.elapsed();
            slowest = slowest.max(took);
            match found.found() {
                Some(f) if verify_witness(&c, &f).is_ok() && took < SEARCH_LIMIT => checked += 1,
                Some(_) if took >= SEARCH_LIMIT => {
                    return verdict(false, format!("cuntz:{n}, α = {alpha:?}: search took {took:?}"))
                }
                _ => return verdict(false, format!("cuntz:{n}, α = {alpha:?}: no verifying witness at depth {}", alpha.len() + 1)),
            }
        }
    }
    verdict(true, format!("{checked} prefixes, constructed and searched witnesses verify, slowest search {slowest:?}"))
}

/// Splits every entry along the cells one level below its domain.
fn split(pres: &GroupoidPresentation, w: &ParadoxWitness, rng: &mut ChaCha8Rng) -> ParadoxWitness {
    let mut out = w.clone();
    for row in out.rows.iter_mut() {
        let mut next = Vec::new();
        for e in row.drain(..) {
            let dom = e.bisection.dom();
            if pres.space().is_finite() || !rng.gen_bool(0.5) {
                next.push(e);
                continue;
            }
            for cell in dom.expand_to_depth(dom.max_depth() + 1).unwrap() {
                let c = Clopen::canonicalize(pres.space(), [cell]).unwrap();
                next.push(RowEntry { bisection: pres.restrict(&e.bisection, &c).unwrap(), m: e.m });
            }
        }
        next.shuffle(rng);
        *row = next;
    }
    out
}

fn relabel(w: &ParadoxWitness, rng: &mut ChaCha8Rng) -> ParadoxWitness {
    let mut perm: Vec<usize> = (1..=w.l).collect();
    perm.shuffle(rng);
    let mut out = w.clone();
    for row in out.rows.iter_mut() {
        for e in row.iter_mut() {
            e.m = perm[e.m - 1];
        }
    }
    out.rows.shuffle(rng);
    out
}

fn fuzzed_witness(rng: &mut ChaCha8Rng) -> (GroupoidPresentation, ParadoxWitness) {
    let n = if rng.gen_bool(0.5) { 2 } else { 3 };
    let c = cuntz(n);
    let alphas = prefixes(n, 2);
    let alpha = alphas.choose(rng).unwrap();
    let mut w = cuntz_witness(&c, alpha).unwrap();
    if rng.gen_bool(0.5) {
        let l2 = rng.gen_range(1..=3);
        let k2 = rng.gen_range(l2 + 1..=4);
        w = weaken(&c, &w, k2, l2).unwrap();
    }
    if rng.gen_bool(0.6) {
        w = split(&c, &w, rng);
    }
    (c, relabel(&w, rng))
}

/// A random finite presentation: a few random partial injections.
fn random_finite(rng: &mut ChaCha8Rng) -> GroupoidPresentation {
    let n = rng.gen_range(2..=5);
    let gens = rng.gen_range(1..=3);
    let mut arrows = Vec::new();
    for _ in 0..gens {
        let s = rng.gen_range(0..n);
        let t = rng.gen_range(0..n);
        arrows.push((s, t));
    }
    GroupoidPresentation::finite_groupoid(n, &arrows).unwrap()
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = Vec::new();
    for i in 0..FUZZED_WITNESSES {
        let (c, w) = fuzzed_witness(&mut rng);
        if let Err(e) = verify_witness(&c, &w) {
            failures.push(format!("#{i} fuzzed witness rejected: {e}"));
            continue;
        }
        let cert = match witness_to_leq(&c, &w) {
            Ok(cert) => cert,
            Err(e) => {
                failures.push(format!("#{i} witness_to_leq: {e}"));
                continue;
            }
        };
        let (lhs, rhs) = (LabeledFamily::multiple(&w.a, w.k), LabeledFamily::multiple(&w.a, w.l));
        if let Err(e) = verify_leq(&c, &lhs, &rhs, &cert) {
            failures.push(format!("#{i} certificate rejected: {e}"));
            continue;
        }
        match leq_to_witness(&c, &w.a, w.k, w.l, &cert) {
            Ok(back) if verify_witness(&c, &back).is_ok() => {}
            Ok(_) => failures.push(format!("#{i} round-tripped witness rejected")),
            Err(e) => failures.push(format!("#{i} leq_to_witness: {e}")),
        }
    }
    // finite presentations admit no witness (count |k·A| > |l·A|), so
    // random candidates there must be rejected and searches must fail
    let mut controls = 0;
    for i in 0..FINITE_CONTROLS {
        let p = random_finite(&mut rng);
        let a = common::nonempty_clopen(p.space(), 0, &mut rng);
        let bis = p.enumerate_bisections(2, 500, Exec::Sequential).bisections;
        let rows = (0..2)
            .map(|_| {
                let b = bis.choose(&mut rng).unwrap();
                vec![RowEntry { bisection: p.restrict(b, &a).unwrap(), m: 1 }]
            })
            .collect();
        let candidate = ParadoxWitness { a: a.clone(), k: 2, l: 1, rows };
        if verify_witness(&p, &candidate).is_ok() {
            failures.push(format!("finite control #{i} accepted"));
        }
        if search_witness(&p, &a, 2, 1, SearchParams::new(2)).unwrap().is_found() {
            failures.push(format!("finite control #{i} found a witness"));
        }
        controls += 1;
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{FUZZED_WITNESSES} fuzzed witnesses round-trip, {controls} finite negative controls rejected")
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
    )
}

/// Expected states: equal mass on the points, or `2^{-|w|}` on cells.
fn expected_state(space: UnitSpace, depth: usize) -> BTreeMap<Cell, Rational> {
    match space {
        UnitSpace::Finite(n) => (0..n).map(|x| (Cell::Point(x), q(1, n as i64))).collect(),
        UnitSpace::Shift(k) => {
            let cells = space.cells_at_depth(depth);
            let m = (k as i64).pow(depth as u32);
            cells.into_iter().map(|c| (c, q(1, m))).collect()
        }
    }
}

fn full(values: &BTreeMap<Cell, Rational>, s: &StateVector) -> BTreeMap<Cell, Rational> {
    let _ = values;
    s.space.cells_at_depth(s.depth).into_iter().map(|c| (c.clone(), s.value(&c))).collect()
}

/// Invariance of a state under every generator, recomputed through the
/// bisection calculus: `μ(C) = μ(α_g(C))` for each cell `C` inside the
/// domain of `g` whose image is expressible at the state's depth.
fn independent_state_check(pres: &GroupoidPresentation, s: &StateVector, strict: bool) -> Result<(), String> {
    if s.values.values().any(|v| v.is_negative()) {
        return Err("negative mass".into());
    }
    let total: Rational = s.values.values().cloned().sum();
    if total != s.total {
        return Err(format!("masses sum to {total}, not {}", s.total));
    }
    for g in 0..pres.generators().len() {
        let b = pres.generator_bisection(g).unwrap();
        let map = pres.generator_maps()[g].clone();
        for cell in s.space.cells_at_depth(s.depth) {
            let c = Clopen::canonicalize(s.space, [cell.clone()]).unwrap();
            if !c.is_subset(&b.dom()).unwrap() {
                continue;
            }
            let image = pres.image(&b, &c).unwrap();
            let image_mass = match s.measure(&image) {
                Ok(m) => m,
                Err(_) if !strict => continue,
                Err(e) => return Err(e.to_string()),
            };
            if let PartialMap::Prefix { .. } = map {
                // the image may be coarser than the depth; compare exactly
            }
            if image_mass != s.value(&cell) {
                return Err(format!("g{} moves mass {} on {cell} to {image_mass}", g + 1, s.value(&cell)));
            }
        }
    }
    Ok(())
}

/// `yᵀA ≤ 0` and `yᵀb > 0`, recomputed here from the rows.
fn independent_farkas_check(pres: &GroupoidPresentation, f: &FarkasCertificate) -> Result<(), String> {
    let cs = build_constraints(pres, f.depth);
    let rows = cs.lp_rows(&rat(1));
    if rows.len() != f.multipliers.len() {
        return Err("multiplier count".into());
    }
    let mut combo = vec![Rational::zero(); cs.cells.len()];
    let mut rhs = Rational::zero();
    for (row, y) in rows.iter().zip(&f.multipliers) {
        for (j, a) in &row.coeffs {
            combo[*j] += a * y;
        }
        rhs += &row.rhs * y;
    }
    if combo.iter().any(|v| v.is_positive()) || !rhs.is_positive() {
        return Err("combination does not certify infeasibility".into());
    }
    Ok(())
}

struct Emitted {
    states: Vec<(GroupoidPresentation, StateVector)>,
    farkas: Vec<(GroupoidPresentation, FarkasCertificate)>,
}

fn suite() -> Vec<(&'static str, GroupoidPresentation)> {
    ["cuntz:2", "cuntz:3", "rotation:3", "pair:3", "odometer"]
        .into_iter()
        .map(|n| (n, GroupoidPresentation::builtin(n).unwrap()))
        .collect()
}

fn criterion_3(emitted: &mut Emitted) -> Verdict {
    let mut failures = Vec::new();
    let mut reports = 0;
    for (name, p) in suite() {
        let whole = Clopen::whole(p.space());
        for depth in 0..=3 {
            let rep = tarski_report(&p, &whole, SearchParams::new(depth)).unwrap();
            reports += 1;
            let is_cuntz = name.starts_with("cuntz");
            match &rep.outcome {
                TarskiOutcome::Paradox { witness, .. } => {
                    if verify_witness(&p, witness).is_err() {
                        failures.push(format!("{name} depth {depth}: witness does not verify"));
                    }
                    // never both: the LP at the report depth has no state
                    match solve_state(&build_constraints(&p, rep.lp_depth), None).unwrap() {
                        StateOutcome::State(s) => {
                            failures.push(format!("{name} depth {depth}: paradox and a state"));
                            emitted.states.push((p.clone(), s));
                        }
                        StateOutcome::Infeasible(f) => emitted.farkas.push((p.clone(), f)),
                    }
                    if !is_cuntz {
                        failures.push(format!("{name} depth {depth}: unexpected paradox"));
                    }
                }
                TarskiOutcome::State { state, .. } => {
                    emitted.states.push((p.clone(), state.clone()));
                    if search_witness(&p, &whole, 2, 1, SearchParams::new(depth)).unwrap().is_found() {
                        failures.push(format!("{name} depth {depth}: state and a witness"));
                    }
                    let want = expected_state(p.space(), state.depth);
                    if is_cuntz || full(&want, state) != want {
                        failures.push(format!("{name} depth {depth}: state {:?}", state.values));
                    }
                }
                other => failures.push(format!("{name} depth {depth}: {other:?}")),
            }
            if is_cuntz && depth == 1 && !matches!(rep.outcome, TarskiOutcome::Paradox { .. }) {
                failures.push(format!("{name}: no paradox at depth 1"));
            }
        }
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{reports} reports: cuntz paradoxical, rotation 1/3 each, pair uniform, odometer 2^-|w|")
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
    )
}

fn criterion_4(emitted: &mut Emitted) -> Verdict {
    // more certificates: plain and maximizing solves, dichotomy reports
    for (_, p) in suite() {
        for depth in 0..=3 {
            let cs = build_constraints(&p, depth);
            let cells = cs.cells.clone();
            for target in std::iter::once(None).chain(cells.iter().take(3).map(Some)) {
                let set = target.map(|c| Clopen::canonicalize(p.space(), [c.clone()]).unwrap());
                match solve_state(&cs, set.as_ref()).unwrap() {
                    StateOutcome::State(s) => emitted.states.push((p.clone(), s)),
                    StateOutcome::Infeasible(f) => emitted.farkas.push((p.clone(), f)),
                }
            }
        }
        let rep = dichotomy(&p, SearchParams::new(1)).unwrap();
        emitted.states.extend(rep.faithful_state.map(|s| (p.clone(), s)));
        emitted.farkas.extend(rep.farkas.map(|f| (p.clone(), f)));
    }
    let mut failures = Vec::new();
    for (p, s) in &emitted.states {
        let cs = build_constraints(p, s.depth);
        if let Err(e) = s.verify(&cs) {
            failures.push(format!("state fails its own check: {e}"));
        }
        if let Err(e) = independent_state_check(p, s, !cs.is_partial()) {
            failures.push(format!("state fails recomputation: {e}"));
        }
    }
    for (p, f) in &emitted.farkas {
        if let Err(e) = f.verify(&build_constraints(p, f.depth)) {
            failures.push(format!("Farkas certificate fails its own check: {e}"));
        }
        if let Err(e) = independent_farkas_check(p, f) {
            failures.push(format!("Farkas certificate fails recomputation: {e}"));
        }
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} states and {} Farkas certificates re-verify", emitted.states.len(), emitted.farkas.len())
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
    )
}

fn criterion_5() -> Verdict {
    let c = cuntz(2);
    let alg = ConvAlgebra::new(&c);
    let x = Clopen::whole(c.space());
    let one = ConvElement::unit_indicator(&x);
    let rep = isometries_from_witness(&c, &cuntz_witness(&c, &[]).unwrap()).unwrap();
    let f = ConvElement::indicator(&c.generator_bisection(0).unwrap());
    let g = ConvElement::indicator(&c.generator_bisection(1).unwrap());
    let ff = alg.conv(&alg.star(&f).unwrap(), &f).unwrap();
    let gg = alg.conv(&alg.star(&g).unwrap(), &g).unwrap();
    let sum = alg
        .conv(&f, &alg.star(&f).unwrap())
        .unwrap()
        .add(&alg.conv(&g, &alg.star(&g).unwrap()).unwrap())
        .unwrap();
    let fg = alg.conv(&alg.star(&f).unwrap(), &g).unwrap();
    let ok = rep.holds() && rep.f == f && rep.g == g && ff == one && gg == one && sum == one && rep.range_sum == one && fg.is_zero();
    verdict(ok, "f*f = g*g = 1_X, ff* + gg* = 1_X, f*g = 0")
}

fn criterion_6() -> Verdict {
    let c = cuntz(2);
    let w = cuntz_witness(&c, &[]).unwrap();
    let (_, r21) = matrix_isometries(&c, &w).unwrap();
    let w32 = weaken(&c, &w, 3, 2).unwrap();
    let ok32 = verify_witness(&c, &w32).is_ok();
    let (_, r32) = matrix_isometries(&c, &w32).unwrap();
    verdict(
        r21.holds() && r32.holds() && ok32,
        format!("(2,1) with {} partial isometries, (3,2) with {}", r21.pieces, r32.pieces),
    )
}

fn int_sum(space: UnitSpace, sets: &[Clopen]) -> LocallyConstant<u64> {
    LocallyConstant::from_sum(space, sets.iter().map(|c| (c.clone(), 1u64))).unwrap()
}

/// A second decomposition of `Σ 1_{A_i}`: layers `{f > t}` cut into
/// random pieces along cells.
fn redecompose(space: UnitSpace, sets: &[Clopen], rng: &mut ChaCha8Rng) -> Vec<Clopen> {
    let f = int_sum(space, sets);
    let depth = f.max_depth() + 1;
    let fine = f.at_depth(depth).unwrap();
    let top = fine.values().copied().max().unwrap_or(0);
    let mut out = Vec::new();
    for t in 0..top {
        let layer: Vec<Cell> = fine.iter().filter(|(_, v)| **v > t).map(|(c, _)| c.clone()).collect();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for c in layer {
            if rng.gen_bool(0.5) {
                a.push(c)
            } else {
                b.push(c)
            }
        }
        out.push(Clopen::canonicalize(space, a).unwrap());
        out.push(Clopen::canonicalize(space, b).unwrap());
    }
    out.retain(|c| !c.is_empty());
    out.shuffle(rng);
    out
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c = cuntz(2);
    let space = c.space();
    let mut failures = Vec::new();
    for i in 0..RHO_CASES {
        let n = rng.gen_range(1..=4);
        let a: Vec<Clopen> = (0..n).map(|_| common::nonempty_clopen(space, 2, &mut rng)).collect();
        let b = redecompose(space, &a, &mut rng);
        if int_sum(space, &a) != int_sum(space, &b) {
            failures.push(format!("#{i}: decompositions differ"));
            continue;
        }
        let cert = rho_welldef_cert(space, &a, &b).unwrap();
        let fa = rho_decomposition(space, &a).unwrap();
        let fb = rho_decomposition(space, &b).unwrap();
        if let Err(e) = verify_equiv(&c, &fa, &fb, &cert) {
            failures.push(format!("well-definedness #{i}: {e}"));
        }
    }
    let bis = c.enumerate_bisections(2, 5_000, Exec::Sequential).bisections;
    let mut done = 0;
    while done < RHO_CASES {
        let s: &Bisection = bis.choose(&mut rng).unwrap();
        let range = c.ran(s);
        if range.is_empty() {
            continue;
        }
        let sets: Vec<Clopen> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let d = range.max_depth() + rng.gen_range(0..=1);
                let cells: Vec<Cell> = range.expand_to_depth(d).unwrap().into_iter().filter(|_| rng.gen_bool(0.6)).collect();
                Clopen::canonicalize(space, cells).unwrap()
            })
            .collect();
        let (f, g, cert) = rho_invariance_cert(&c, s, &sets).unwrap();
        if let Err(e) = verify_equiv(&c, &f, &g, &cert) {
            failures.push(format!("invariance #{done}: {e}"));
        }
        // f ∘ α_S computed pointwise on cells of the domain
        let fsum = int_sum(space, &sets);
        let pulled = g.to_function();
        let d = s.dom().max_depth().max(fsum.max_depth()) + 1;
        for cell in s.dom().expand_to_depth(d).unwrap() {
            let cc = Clopen::canonicalize(space, [cell.clone()]).unwrap();
            let img = c.image(s, &cc).unwrap();
            let want = img.cells().first().and_then(|ic| fsum.value_on(ic)).unwrap_or(0);
            let img_ok = img.cells().iter().all(|ic| fsum.value_on(ic) == Some(want) || (want == 0 && fsum.value_on(ic).is_none()));
            if !img_ok || pulled.value_on(&cell).unwrap_or(0) != want {
                failures.push(format!("invariance #{done}: f∘α_S wrong on {cell}"));
                break;
            }
        }
        done += 1;
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{RHO_CASES} well-definedness and {RHO_CASES} invariance certificates verify")
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
    )
}

fn criterion_8() -> Verdict {
    let odo = GroupoidPresentation::odometer(3).unwrap();
    let alg = ConvAlgebra::new(&odo);
    let state = match solve_state(&build_constraints(&odo, 3), None).unwrap() {
        StateOutcome::State(s) => s,
        StateOutcome::Infeasible(_) => return verdict(false, "no odometer state at depth 3"),
    };
    let want = expected_state(odo.space(), 3);
    if full(&want, &state) != want {
        return verdict(false, format!("odometer state is not 2^-|w|: {:?}", state.values));
    }
    let tau = TraceFunctional::new(state);
    let unit = tau.tau(&ConvElement::unit_indicator(&Clopen::whole(odo.space()))).unwrap();
    let words = common::words(&odo, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();
    let (mut pairs, mut attempts) = (0, 0);
    while pairs < TRACE_PAIRS && attempts < 20 * TRACE_PAIRS {
        attempts += 1;
        let a = common::element(&odo, &words, 3, 1, &mut rng);
        let b = common::element(&odo, &words, 3, 1, &mut rng);
        let (ab, ba) = (alg.conv(&a, &b).unwrap(), alg.conv(&b, &a).unwrap());
        let (Ok(x), Ok(y)) = (tau.tau(&ab), tau.tau(&ba)) else { continue };
        pairs += 1;
        if x != y {
            failures.push(format!("τ(ab) = {x} but τ(ba) = {y}"));
        }
    }
    let mut faithful = 0;
    let mut zeros = 0;
    attempts = 0;
    while faithful < TRACE_PAIRS && attempts < 20 * TRACE_PAIRS {
        attempts += 1;
        let a = common::element(&odo, &words, 3, 1, &mut rng);
        if a.is_zero() {
            zeros += 1;
            continue;
        }
        let Ok(t) = tau.tau(&alg.conv(&alg.star(&a).unwrap(), &a).unwrap()) else { continue };
        if t.is_negative() || (t.is_zero() != a.is_zero()) {
            failures.push(format!("τ(a*a) = {t} for a with {} terms", a.term_list().len()));
        }
        faithful += 1;
    }
    let ok = unit == rat(1) && pairs == TRACE_PAIRS && faithful == TRACE_PAIRS && failures.is_empty();
    verdict(
        ok,
        if ok {
            format!("τ(1_X) = 1, {pairs} expressible pairs commute under τ, {faithful} nonzero faithfulness cases ({zeros} zero draws skipped)")
        } else if pairs < TRACE_PAIRS || faithful < TRACE_PAIRS {
            format!("only {pairs} expressible pairs and {faithful} faithfulness cases")
        } else {
            format!("τ(1_X) = {unit}; {} failures, first: {}", failures.len(), failures.first().cloned().unwrap_or_default())
        },
    )
}

fn criterion_9() -> Verdict {
    let start = Instant::now();
    let rep = orbitlat::sweep(5, 5, Exec::default()).unwrap();
    let took = start.elapsed();
    let ok = rep.failures.is_empty() && took < SWEEP_LIMIT;
    verdict(
        ok,
        if rep.failures.is_empty() {
            format!("{} principal presentations on at most 5 points in {took:?}", rep.presentations)
        } else {
            format!("{} failures, first: {}", rep.failures.len(), rep.failures[0])
        },
    )
}

/// `E(a*a)(x) = Σ_w |a(w, x)|²`, evaluated from the terms of `a`.
fn expectation_formula(a: &ConvElement, depth: usize) -> BTreeMap<Cell, Rational> {
    let mut out: BTreeMap<Cell, Rational> = BTreeMap::new();
    for (_, c, v) in a.term_list() {
        let set = Clopen::canonicalize(a.space(), [c]).unwrap();
        for fine in set.expand_to_depth(depth).unwrap() {
            *out.entry(fine).or_insert_with(Rational::zero) += &v * &v;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn criterion_10() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let presentations = [cuntz(2), GroupoidPresentation::odometer(2).unwrap(), GroupoidPresentation::rotation_table(3).unwrap(), GroupoidPresentation::pair(3).unwrap()];
    let words: Vec<_> = presentations.iter().map(|p| common::words(p, 2)).collect();
    let mut failures = Vec::new();
    let mut counts = [0usize; 4];
    for i in 0..ALGEBRA_CHECKS {
        let k = i % presentations.len();
        let (p, ws) = (&presentations[k], &words[k]);
        let alg = ConvAlgebra::new(p);
        let a = common::element(p, ws, 3, 1, &mut rng);
        let b = common::element(p, ws, 3, 1, &mut rng);
        let c = common::element(p, ws, 3, 1, &mut rng);
        let left = alg.conv(&alg.conv(&a, &b).unwrap(), &c).unwrap();
        let right = alg.conv(&a, &alg.conv(&b, &c).unwrap()).unwrap();
        if left != right {
            failures.push(format!("associativity on {}", p.name().unwrap_or("?")));
        }
        counts[0] += 1;
        let ab_star = alg.star(&alg.conv(&a, &b).unwrap()).unwrap();
        let b_star_a_star = alg.conv(&alg.star(&b).unwrap(), &alg.star(&a).unwrap()).unwrap();
        if ab_star != b_star_a_star || alg.star(&alg.star(&a).unwrap()).unwrap() != a {
            failures.push("involution".into());
        }
        counts[1] += 1;
        let e = alg.conv(&alg.star(&a).unwrap(), &a).unwrap().expectation();
        let depth = e.max_depth().max(a.max_depth());
        let got: BTreeMap<Cell, Rational> = e.at_depth(depth).unwrap().into_iter().filter(|(_, v)| !v.is_zero()).collect();
        if got != expectation_formula(&a, depth) || got.values().any(|v| v.is_negative()) || got.is_empty() != a.is_zero() {
            failures.push("E(a*a) formula".into());
        }
        counts[2] += 1;
    }
    // Boolean laws against cell sets at a common depth
    for space in [UnitSpace::shift(2).unwrap(), UnitSpace::shift(3).unwrap(), UnitSpace::finite(5).unwrap()] {
        for _ in 0..ALGEBRA_CHECKS / 3 + 1 {
            let [x, y, z] = [0; 3].map(|_| common::clopen(space, 3, &mut rng));
            let d = 4;
            let cells = |c: &Clopen| -> std::collections::BTreeSet<Cell> {
                let depth = if space.is_finite() { 0 } else { d };
                c.expand_to_depth(depth).unwrap().into_iter().collect()
            };
            let (cx, cy) = (cells(&x), cells(&y));
            let u = boolean(BoolOp::Union, &x, Some(&y)).unwrap();
            let i = boolean(BoolOp::Intersect, &x, Some(&y)).unwrap();
            let dif = boolean(BoolOp::Difference, &x, Some(&y)).unwrap();
            let comp = boolean(BoolOp::Complement, &x, None).unwrap();
            let all = cells(&Clopen::whole(space));
            let laws = [
                cells(&u) == cx.union(&cy).cloned().collect(),
                cells(&i) == cx.intersection(&cy).cloned().collect(),
                cells(&dif) == cx.difference(&cy).cloned().collect(),
                cells(&comp) == all.difference(&cx).cloned().collect(),
                x.intersect(&y.union(&z).unwrap()).unwrap() == x.intersect(&y).unwrap().union(&x.intersect(&z).unwrap()).unwrap(),
                u.complement() == comp.intersect(&y.complement()).unwrap(),
                x.union(&x.intersect(&y).unwrap()).unwrap() == x,
                comp.complement() == x,
                x.union(&comp).unwrap().is_whole() && x.intersect(&comp).unwrap().is_empty(),
                u == y.union(&x).unwrap() && i == y.intersect(&x).unwrap(),
            ];
            if laws.iter().any(|ok| !ok) {
                failures.push(format!("Boolean law on {x} and {y}"));
            }
            counts[3] += 1;
        }
    }
    let ok = failures.is_empty() && counts.iter().all(|&c| c >= ALGEBRA_CHECKS);
    verdict(
        ok,
        if failures.is_empty() {
            format!(
                "associativity {}, involution {}, E(a*a) {}, Boolean {} checks",
                counts[0], counts[1], counts[2], counts[3]
            )
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
    )
}

fn main() -> ExitCode {
    let mut emitted = Emitted { states: Vec::new(), farkas: Vec::new() };
    let mut results: Vec<(usize, Verdict)> = Vec::new();
    let mut run = |n: usize, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = f();
        println!(
            "criterion {n:>2} {}: {} [{:.2?}]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed()
        );
        results.push((n, v));
    };
    run(1, &mut criterion_1);
    run(2, &mut criterion_2);
    run(3, &mut || criterion_3(&mut emitted));
    run(4, &mut || criterion_4(&mut emitted));
    run(5, &mut criterion_5);
    run(6, &mut criterion_6);
    run(7, &mut criterion_7);
    run(8, &mut criterion_8);
    run(9, &mut criterion_9);
    run(10, &mut criterion_10);
    let failed: Vec<usize> = results.iter().filter(|(_, v)| !v.pass).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("all {} criteria pass", results.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
