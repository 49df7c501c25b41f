//! Invariant states at depth truncations.
//!
//! At depth `d` a state is a nonnegative measure on the depth-`d` cells that
//! is invariant under every generator piece expressible at that depth. The
//! exact LP either produces such a measure or a Farkas certificate showing
//! that none exists.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grpd::{GroupoidPresentation, Minimality, PartialMap};
use crate::lp::{self, rat, LpResult, Rational, Row};
use crate::paradox::{search_witness, ParadoxWitness};
use crate::par::Exec;
use crate::search::{search_leq, SearchOutcome, SearchParams};
use crate::starconv::TraceFunctional;
use crate::stone::{words_at_depth, Cell, Clopen, UnitSpace};
use crate::typesg::{Check, LabeledFamily, LeqCertificate};

/// Largest `n` tried for `(n+1)[A] ≤ n[A]` in reports.
pub const PARADOX_CAP: usize = 3;
/// How far past the requested depth a report escalates the witness search
/// after the LP has ruled out states.
pub const ESCALATION: usize = 3;

/// Invariance equations on the depth-`depth` cells. The normalization
/// `Σ μ = 1` is kept separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub space: UnitSpace,
    pub depth: usize,
    pub cells: Vec<Cell>,
    /// Homogeneous rows `Σ c_j μ_j = 0`.
    pub rows: Vec<Row>,
    /// Generator pieces too deep to be expressed; their constraints are
    /// missing and the system is only a relaxation.
    pub skipped: Vec<String>,
}

impl ConstraintSystem {
    pub fn is_partial(&self) -> bool {
        !self.skipped.is_empty()
    }

    pub fn index(&self, cell: &Cell) -> Option<usize> {
        self.cells.binary_search(cell).ok()
    }

    /// The rows followed by `Σ μ = total`.
    pub fn lp_rows(&self, total: &Rational) -> Vec<Row> {
        let mut rows = self.rows.clone();
        rows.push(Row { coeffs: (0..self.cells.len()).map(|j| (j, rat(1))).collect(), rhs: total.clone() });
        rows
    }

    /// Indices of the cells making up `set`.
    pub fn cells_of(&self, set: &Clopen) -> Result<Vec<usize>> {
        if set.max_depth() > self.depth {
            return Err(Error::NotExpressible { depth: self.depth, what: format!("clopen {set}") });
        }
        Ok(set.expand_to_depth(self.depth)?.iter().map(|c| self.index(c).expect("cell of the depth")).collect())
    }
}

/// Deepest generator piece, i.e. the least depth expressing every generator.
pub fn expressibility_depth(pres: &GroupoidPresentation) -> usize {
    pres.generator_maps()
        .iter()
        .map(|m| match m {
            PartialMap::Prefix { pieces, .. } => pieces.iter().map(|(a, b)| a.len().max(b.len())).max().unwrap_or(0),
            PartialMap::Points { .. } => 0,
        })
        .max()
        .unwrap_or(0)
}

pub fn build_constraints(pres: &GroupoidPresentation, depth: usize) -> ConstraintSystem {
    let space = pres.space();
    let d = if space.is_finite() { 0 } else { depth };
    let cells = space.cells_at_depth(d);
    let index: BTreeMap<Cell, usize> = cells.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let mut rows: BTreeSet<Vec<(usize, i64)>> = BTreeSet::new();
    let mut skipped = Vec::new();
    let mut push = |long: usize, short: Vec<usize>| {
        if short == [long] {
            return;
        }
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        *acc.entry(long).or_default() += 1;
        for s in short {
            *acc.entry(s).or_default() -= 1;
        }
        let row: Vec<(usize, i64)> = acc.into_iter().filter(|(_, v)| *v != 0).collect();
        if !row.is_empty() {
            rows.insert(row);
        }
    };
    for (g, map) in pres.generator_maps().iter().enumerate() {
        match map {
            PartialMap::Points { images } => {
                for (x, y) in images.iter().enumerate() {
                    if let Some(y) = y {
                        push(index[&Cell::Point(x)], vec![index[&Cell::Point(*y)]]);
                    }
                }
            }
            PartialMap::Prefix { k, pieces } => {
                for (alpha, beta) in pieces {
                    let (long, short) = if alpha.len() >= beta.len() { (alpha, beta) } else { (beta, alpha) };
                    if long.len() > d {
                        skipped.push(format!(
                            "g{} piece {}→{}",
                            g + 1,
                            crate::stone::word_string(alpha),
                            crate::stone::word_string(beta)
                        ));
                        continue;
                    }
                    for eta in words_at_depth(*k, d - long.len()) {
                        let mut l = long.clone();
                        l.extend_from_slice(&eta);
                        let shorts = words_at_depth(*k, long.len() - short.len())
                            .into_iter()
                            .map(|zeta| {
                                let mut s = short.clone();
                                s.extend_from_slice(&eta);
                                s.extend_from_slice(&zeta);
                                index[&Cell::Cyl(s)]
                            })
                            .collect();
                        push(index[&Cell::Cyl(l)], shorts);
                    }
                }
            }
        }
    }
    let rows = rows
        .into_iter()
        .map(|r| Row { coeffs: r.into_iter().map(|(j, v)| (j, rat(v))).collect(), rhs: Rational::zero() })
        .collect();
    ConstraintSystem { space, depth: d, cells, rows, skipped }
}

/// A measure on the depth-`depth` cells with total mass `total`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateVector {
    pub space: UnitSpace,
    pub depth: usize,
    pub values: BTreeMap<Cell, Rational>,
    pub total: Rational,
}

impl StateVector {
    pub fn value(&self, cell: &Cell) -> Rational {
        self.values.get(cell).cloned().unwrap_or_else(Rational::zero)
    }

    fn vector(&self, cs: &ConstraintSystem) -> Vec<Rational> {
        cs.cells.iter().map(|c| self.value(c)).collect()
    }

    /// Exact check against the system of its own depth.
    pub fn verify(&self, cs: &ConstraintSystem) -> Check {
        if cs.space != self.space || cs.depth != self.depth {
            return Err("state and system differ in space or depth".into());
        }
        if let Some(c) = self.values.keys().find(|c| cs.index(c).is_none()) {
            return Err(format!("cell {c} is not a variable of the system"));
        }
        if !self.total.is_positive() {
            return Err("total mass is not positive".into());
        }
        lp::check_solution(&cs.lp_rows(&self.total), &self.vector(cs))
    }

    pub fn scaled(&self, factor: &Rational) -> StateVector {
        StateVector {
            space: self.space,
            depth: self.depth,
            values: self.values.iter().map(|(c, v)| (c.clone(), v * factor)).collect(),
            total: &self.total * factor,
        }
    }

    pub fn measure(&self, set: &Clopen) -> Result<Rational> {
        if set.max_depth() > self.depth {
            return Err(Error::NotExpressible { depth: self.depth, what: format!("clopen {set}") });
        }
        Ok(set.expand_to_depth(self.depth)?.iter().map(|c| self.value(c)).sum())
    }
}

/// Multipliers `y` (one per row, the normalization last) with `yᵀA ≤ 0`
/// and `yᵀb > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub depth: usize,
    pub multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    pub fn verify(&self, cs: &ConstraintSystem) -> Check {
        if cs.depth != self.depth {
            return Err("certificate and system differ in depth".into());
        }
        lp::check_farkas(cs.cells.len(), &cs.lp_rows(&rat(1)), &self.multipliers)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateOutcome {
    State(StateVector),
    Infeasible(FarkasCertificate),
}

/// Solves the system; with `maximize` the returned vertex maximizes the
/// measure of that set.
pub fn solve_state(cs: &ConstraintSystem, maximize: Option<&Clopen>) -> Result<StateOutcome> {
    let objective = match maximize {
        Some(a) => Some(cs.cells_of(a)?.into_iter().map(|j| (j, rat(1))).collect::<Vec<_>>()),
        None => None,
    };
    match lp::solve(cs.cells.len(), &cs.lp_rows(&rat(1)), objective.as_deref()) {
        LpResult::Feasible { x, .. } => Ok(StateOutcome::State(StateVector {
            space: cs.space,
            depth: cs.depth,
            values: cs.cells.iter().cloned().zip(x).filter(|(_, v)| !v.is_zero()).collect(),
            total: rat(1),
        })),
        LpResult::Infeasible { y } => Ok(StateOutcome::Infeasible(FarkasCertificate { depth: cs.depth, multipliers: y })),
        LpResult::Unbounded => unreachable!("the normalization bounds every variable"),
    }
}

/// `φ(F) = Σ μ(A_i)`.
pub fn evaluate(phi: &StateVector, f: &LabeledFamily) -> Result<Rational> {
    f.entries().iter().map(|c| phi.measure(c)).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TarskiOutcome {
    /// A state with `φ([A]) = 1` on the truncated system.
    State { state: StateVector, partial: bool },
    /// `A` is `(n+1, n)`-paradoxical.
    Paradox { witness: ParadoxWitness, n: usize },
    /// States exist at the LP depth but all vanish on `A`.
    Vanishing { state: StateVector },
    Inconclusive { farkas: Option<FarkasCertificate>, budget_hit: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TarskiReport {
    pub depth: usize,
    pub lp_depth: usize,
    pub outcome: TarskiOutcome,
}

fn paradox_sweep(
    pres: &GroupoidPresentation,
    a: &Clopen,
    params: SearchParams,
    budget_hit: &mut bool,
) -> Result<Option<(ParadoxWitness, usize)>> {
    for n in 1..=PARADOX_CAP {
        match search_witness(pres, a, n + 1, n, params)? {
            SearchOutcome::Found(w) => return Ok(Some((w, n))),
            SearchOutcome::NotFound { budget_hit: b } => *budget_hit |= b,
        }
    }
    Ok(None)
}

/// Looks for an `(n+1, n)` witness on `A` first; otherwise solves the LP
/// at the least depth expressing the generators and `A`; when the LP
/// excludes every state, the witness search is retried at larger depths.
pub fn tarski_report(pres: &GroupoidPresentation, a: &Clopen, params: SearchParams) -> Result<TarskiReport> {
    if a.is_empty() {
        return Err(Error::Precondition("A must be nonempty".into()));
    }
    let depth = params.depth;
    let lp_depth = if pres.space().is_finite() {
        0
    } else {
        depth.max(expressibility_depth(pres)).max(a.max_depth())
    };
    let report = |outcome| Ok(TarskiReport { depth, lp_depth, outcome });
    let mut budget_hit = false;
    if let Some((witness, n)) = paradox_sweep(pres, a, params, &mut budget_hit)? {
        return report(TarskiOutcome::Paradox { witness, n });
    }
    let cs = build_constraints(pres, lp_depth);
    match solve_state(&cs, Some(a))? {
        StateOutcome::State(s) => {
            let mass = s.measure(a)?;
            if mass.is_positive() {
                let state = s.scaled(&(Rational::one() / mass));
                report(TarskiOutcome::State { state, partial: cs.is_partial() })
            } else {
                report(TarskiOutcome::Vanishing { state: s })
            }
        }
        StateOutcome::Infeasible(farkas) => {
            for d in depth + 1..=depth + ESCALATION {
                let p = SearchParams { depth: d, ..params };
                if let Some((witness, n)) = paradox_sweep(pres, a, p, &mut budget_hit)? {
                    return report(TarskiOutcome::Paradox { witness, n });
                }
            }
            report(TarskiOutcome::Inconclusive { farkas: Some(farkas), budget_hit })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderUnitProbe {
    pub x: Clopen,
    pub y: Clopen,
    /// Least `n ≤ max` with `[y] ≤ n[x]` found, with its certificate.
    pub found: Option<(usize, LeqCertificate)>,
}

/// `(n+1)[x] ≤ n[y]` holds but `[x] ≤ [y]` was not found within the
/// search depth; budget-relative, not a proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnperforationCounterexample {
    pub x: Clopen,
    pub y: Clopen,
    pub n: usize,
    pub certificate: LeqCertificate,
    pub search_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    pub order_unit: Vec<OrderUnitProbe>,
    pub unperforation_tested: usize,
    pub counterexamples: Vec<UnperforationCounterexample>,
}

/// Least `n ≤ max_n` with `[y] ≤ n[x]` found by search.
pub fn order_unit(
    pres: &GroupoidPresentation,
    x: &Clopen,
    y: &Clopen,
    max_n: usize,
    params: SearchParams,
) -> Result<Option<(usize, LeqCertificate)>> {
    for n in 1..=max_n {
        if let SearchOutcome::Found(c) =
            search_leq(pres, &LabeledFamily::single(y), &LabeledFamily::multiple(x, n), params)?
        {
            return Ok(Some((n, c)));
        }
    }
    Ok(None)
}

/// A random nonempty clopen of depth at most `depth` (and at most 2).
pub fn random_clopen(space: UnitSpace, depth: usize, rng: &mut impl Rng) -> Clopen {
    let d = match space {
        UnitSpace::Finite(_) => 0,
        UnitSpace::Shift(_) => rng.gen_range(0..=depth.min(2)),
    };
    let cells = space.cells_at_depth(d);
    let take = rng.gen_range(1..=cells.len());
    let chosen: Vec<Cell> = cells.choose_multiple(rng, take).cloned().collect();
    Clopen::canonicalize(space, chosen).expect("cells of the space")
}

/// Order-unit and almost-unperforation probes on `samples` random pairs.
pub fn probes(pres: &GroupoidPresentation, samples: usize, seed: u64, params: SearchParams) -> Result<ProbeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Clopen, Clopen, usize)> = (0..samples)
        .map(|_| {
            let x = random_clopen(pres.space(), params.depth, &mut rng);
            let y = random_clopen(pres.space(), params.depth, &mut rng);
            (x, y, rng.gen_range(1..=2))
        })
        .collect();
    let inner = SearchParams { exec: Exec::Sequential, ..params };
    let results = params.exec.map(&pairs, |(x, y, n)| -> Result<(OrderUnitProbe, Option<UnperforationCounterexample>)> {
        let found = order_unit(pres, x, y, 4, inner)?;
        let probe = OrderUnitProbe { x: x.clone(), y: y.clone(), found };
        let lhs = LabeledFamily::multiple(x, n + 1);
        let rhs = LabeledFamily::multiple(y, *n);
        let counter = match search_leq(pres, &lhs, &rhs, inner)? {
            SearchOutcome::Found(certificate) => {
                let search_depth = params.depth + 2;
                let p = SearchParams { depth: search_depth, ..inner };
                let direct = search_leq(pres, &LabeledFamily::single(x), &LabeledFamily::single(y), p)?;
                (!direct.is_found()).then(|| UnperforationCounterexample {
                    x: x.clone(),
                    y: y.clone(),
                    n: *n,
                    certificate,
                    search_depth,
                })
            }
            SearchOutcome::NotFound { .. } => None,
        };
        Ok((probe, counter))
    });
    let mut order_unit = Vec::with_capacity(samples);
    let mut counterexamples = Vec::new();
    for r in results {
        let (probe, counter) = r?;
        order_unit.push(probe);
        counterexamples.extend(counter);
    }
    Ok(ProbeReport { depth: params.depth, samples, seed, order_unit, unperforation_tested: samples, counterexamples })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Minimal and every basis cell is `(2, 1)`-paradoxical.
    PurelyInfinite,
    /// A faithful state exists on the truncated system.
    StablyFinite,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DichotomyReport {
    pub depth: usize,
    pub lp_depth: usize,
    pub minimal: Minimality,
    pub cells: usize,
    pub paradoxical_cells: usize,
    pub faithful_state: Option<StateVector>,
    pub farkas: Option<FarkasCertificate>,
    pub verdict: Verdict,
}

/// A state positive on every cell, if one exists: the average of states
/// maximizing each cell.
pub fn faithful_state(cs: &ConstraintSystem) -> Result<std::result::Result<Option<StateVector>, FarkasCertificate>> {
    let mut sum: BTreeMap<Cell, Rational> = BTreeMap::new();
    for cell in &cs.cells {
        let set = Clopen::from_cells_unchecked(cs.space, vec![cell.clone()]);
        match solve_state(cs, Some(&set))? {
            StateOutcome::Infeasible(f) => return Ok(Err(f)),
            StateOutcome::State(s) => {
                if !s.value(cell).is_positive() {
                    return Ok(Ok(None));
                }
                for (c, v) in s.values {
                    *sum.entry(c).or_insert_with(Rational::zero) += v;
                }
            }
        }
    }
    let n = rat(cs.cells.len() as i64);
    let values = sum.into_iter().map(|(c, v)| (c, v / &n)).collect();
    Ok(Ok(Some(StateVector { space: cs.space, depth: cs.depth, values, total: rat(1) })))
}

pub fn dichotomy(pres: &GroupoidPresentation, params: SearchParams) -> Result<DichotomyReport> {
    let depth = params.depth;
    let minimal = pres.is_minimal_with(depth, params.exec);
    let basis = pres.space().cells_at_depth(if pres.space().is_finite() { 0 } else { depth });
    // a cell of length m needs words one longer to map into itself twice
    let inner = SearchParams { exec: Exec::Sequential, depth: depth + 1, ..params };
    let hits = params.exec.map(&basis, |c| {
        let a = Clopen::from_cells_unchecked(pres.space(), vec![c.clone()]);
        search_witness(pres, &a, 2, 1, inner).map(|o| o.is_found())
    });
    let paradoxical_cells = hits.into_iter().collect::<Result<Vec<_>>>()?.into_iter().filter(|&b| b).count();
    let lp_depth = if pres.space().is_finite() { 0 } else { depth.max(expressibility_depth(pres)) };
    let cs = build_constraints(pres, lp_depth);
    let (faithful, farkas) = match faithful_state(&cs)? {
        Ok(s) => (s, None),
        Err(f) => (None, Some(f)),
    };
    let verdict = if minimal == Minimality::Yes && paradoxical_cells == basis.len() {
        Verdict::PurelyInfinite
    } else if faithful.is_some() {
        Verdict::StablyFinite
    } else {
        Verdict::Inconclusive
    };
    Ok(DichotomyReport {
        depth,
        lp_depth,
        minimal,
        cells: basis.len(),
        paradoxical_cells,
        faithful_state: faithful,
        farkas,
        verdict,
    })
}

/// The trace `τ = μ ∘ E` of a verified state.
pub fn trace_from_state(pres: &GroupoidPresentation, phi: &StateVector) -> Result<TraceFunctional> {
    let cs = build_constraints(pres, phi.depth);
    phi.verify(&cs).map_err(Error::Unverified)?;
    Ok(TraceFunctional::new(phi.clone()))
}
