//! Bounded search for certificates, posed as exact cover with secondary
//! columns and solved with dancing links.
//!
//! Source atoms (a label of the left family and a cell of it) must each be
//! moved by exactly one candidate `(word, target label)`; target atoms are
//! hit exactly once for `∼` and at most once for `≤`. The column with the
//! fewest remaining rows is branched on first, ties broken by index, and
//! rows are tried in (cell, word, label) order, so the first solution found
//! is deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::grpd::{ArrowPiece, GroupoidPresentation, PartialMap, Word};
use crate::par::Exec;
use crate::stone::{Cell, Clopen, UnitSpace};
use crate::typesg::{verify_equiv, verify_leq, EquivCertificate, LabeledFamily, LeqCertificate, Triple};

/// Default node budget for searches.
pub const DEFAULT_BUDGET: u64 = 2_000_000;
/// Cap on the number of enumerated words.
pub const WORD_CAP: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchParams {
    /// Maximal word length.
    pub depth: usize,
    /// Maximal number of search nodes.
    pub budget: u64,
    pub exec: Exec,
}

impl SearchParams {
    pub fn new(depth: usize) -> Self {
        SearchParams { depth, budget: DEFAULT_BUDGET, exec: Exec::default() }
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    /// Nothing found. `budget_hit` tells whether the node or word budget cut
    /// the search short; either way this is no proof of absence.
    NotFound { budget_hit: bool },
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            SearchOutcome::NotFound { .. } => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> SearchOutcome<U> {
        match self {
            SearchOutcome::Found(t) => SearchOutcome::Found(f(t)),
            SearchOutcome::NotFound { budget_hit } => SearchOutcome::NotFound { budget_hit },
        }
    }
}

/// Dancing-links exact cover with primary and secondary columns.
pub struct ExactCover {
    left: Vec<usize>,
    right: Vec<usize>,
    up: Vec<usize>,
    down: Vec<usize>,
    col: Vec<usize>,
    row: Vec<usize>,
    size: Vec<usize>,
    rows: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverResult {
    Solution(Vec<usize>),
    Infeasible,
    BudgetExhausted,
}

impl ExactCover {
    /// Columns `0..primary` must be covered exactly once, the remaining
    /// `secondary` at most once.
    pub fn new(primary: usize, secondary: usize) -> Self {
        let n = primary + secondary;
        // node 0 is the root, headers are 1..=n
        let mut left: Vec<usize> = (0..=n).map(|i| if i == 0 { primary } else { i - 1 }).collect();
        let mut right: Vec<usize> = (0..=n).map(|i| if i == primary { 0 } else { i + 1 }).collect();
        for h in primary + 1..=n {
            left[h] = h;
            right[h] = h;
        }
        ExactCover {
            left,
            right,
            up: (0..=n).collect(),
            down: (0..=n).collect(),
            col: (0..=n).collect(),
            row: vec![usize::MAX; n + 1],
            size: vec![0; n + 1],
            rows: 0,
        }
    }

    /// Appends a row covering the given (distinct, 0-based) columns.
    pub fn add_row(&mut self, cols: &[usize]) -> usize {
        let r = self.rows;
        self.rows += 1;
        let mut first: Option<usize> = None;
        for &c in cols {
            let h = c + 1;
            let x = self.col.len();
            self.col.push(h);
            self.row.push(r);
            self.up.push(self.up[h]);
            self.down.push(h);
            let last = self.up[h];
            self.down[last] = x;
            self.up[h] = x;
            self.size[h] += 1;
            match first {
                None => {
                    self.left.push(x);
                    self.right.push(x);
                    first = Some(x);
                }
                Some(f) => {
                    let l = self.left[f];
                    self.left.push(l);
                    self.right.push(f);
                    self.right[l] = x;
                    self.left[f] = x;
                }
            }
        }
        r
    }

    fn cover(&mut self, h: usize) {
        let (l, r) = (self.left[h], self.right[h]);
        self.right[l] = r;
        self.left[r] = l;
        let mut i = self.down[h];
        while i != h {
            let mut j = self.right[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = d;
                self.up[d] = u;
                self.size[self.col[j]] -= 1;
                j = self.right[j];
            }
            i = self.down[i];
        }
    }

    fn uncover(&mut self, h: usize) {
        let mut i = self.up[h];
        while i != h {
            let mut j = self.left[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = j;
                self.up[d] = j;
                self.size[self.col[j]] += 1;
                j = self.left[j];
            }
            i = self.up[i];
        }
        let (l, r) = (self.left[h], self.right[h]);
        self.right[l] = h;
        self.left[r] = h;
    }

    /// First solution in branching order, within `budget` nodes.
    pub fn solve(&mut self, budget: u64) -> (CoverResult, u64) {
        let mut used = 0;
        let mut partial = Vec::new();
        let res = self.search(&mut partial, budget, &mut used);
        let out = match res {
            Some(true) => CoverResult::Solution(partial),
            Some(false) => CoverResult::Infeasible,
            None => CoverResult::BudgetExhausted,
        };
        (out, used)
    }

    // Some(true): solved, Some(false): exhausted branch, None: out of budget.
    fn search(&mut self, partial: &mut Vec<usize>, budget: u64, used: &mut u64) -> Option<bool> {
        if self.right[0] == 0 {
            return Some(true);
        }
        let mut best = self.right[0];
        let mut h = best;
        while h != 0 {
            if self.size[h] < self.size[best] {
                best = h;
            }
            h = self.right[h];
        }
        if self.size[best] == 0 {
            return Some(false);
        }
        self.cover(best);
        let mut r = self.down[best];
        while r != best {
            *used += 1;
            if *used > budget {
                self.uncover(best);
                return None;
            }
            partial.push(self.row[r]);
            let mut j = self.right[r];
            while j != r {
                self.cover(self.col[j]);
                j = self.right[j];
            }
            let res = self.search(partial, budget, used);
            if res == Some(true) {
                return res;
            }
            let mut j = self.left[r];
            while j != r {
                self.uncover(self.col[j]);
                j = self.left[j];
            }
            partial.pop();
            if res.is_none() {
                self.uncover(best);
                return None;
            }
            r = self.down[r];
        }
        self.uncover(best);
        Some(false)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Exact,
    AtMost,
}

struct Candidate {
    atom: usize,
    word: usize,
    m: usize,
    image: Clopen,
}

/// Result of a cover search: the triples moving the left family, and the
/// part of each right entry they hit.
struct Cover {
    triples: Vec<Triple>,
    covered: Vec<Clopen>,
}

fn expand(c: &Clopen, depth: usize) -> Vec<Cell> {
    c.expand_to_depth(depth).expect("depth at least the clopen depth")
}

fn cover_search(
    pres: &GroupoidPresentation,
    f1: &LabeledFamily,
    f2: &LabeledFamily,
    mode: Mode,
    params: SearchParams,
) -> Result<SearchOutcome<Cover>> {
    let space = pres.space();
    if f1.space() != space || f2.space() != space {
        return Err(Error::SpaceMismatch(space, f1.space()));
    }
    let (words, words_complete) = pres.enumerate_words(params.depth, WORD_CAP, params.exec);
    let d0 = f1.max_depth();
    let src_depths: Vec<usize> = match space {
        UnitSpace::Finite(_) => vec![0],
        UnitSpace::Shift(_) => (d0..=d0 + params.depth).collect(),
    };
    let mut remaining = params.budget;
    let mut budget_hit = !words_complete;
    for d in src_depths {
        let atoms: Vec<(usize, Cell)> = f1
            .entries()
            .iter()
            .enumerate()
            .flat_map(|(i, c)| expand(c, d).into_iter().map(move |cell| (i + 1, cell)))
            .collect();
        let per_atom = params.exec.map_range(atoms.len(), |a| candidates_for(pres, &words, f2, a, &atoms[a].1));
        let cands: Vec<Candidate> = per_atom.into_iter().flatten().collect();
        let t = cands.iter().map(|c| c.image.max_depth()).chain([f2.max_depth()]).max().unwrap_or(0);
        let mut targets: HashMap<(usize, Cell), usize> = HashMap::new();
        let mut target_list = Vec::new();
        for (i, c) in f2.entries().iter().enumerate() {
            for cell in expand(c, t) {
                targets.insert((i + 1, cell.clone()), target_list.len());
                target_list.push((i + 1, cell));
            }
        }
        let (primary, secondary, offset) = match mode {
            Mode::Exact => (atoms.len() + target_list.len(), 0, atoms.len()),
            Mode::AtMost => (atoms.len(), target_list.len(), atoms.len()),
        };
        let mut dlx = ExactCover::new(primary, secondary);
        for c in &cands {
            let mut cols = vec![c.atom];
            cols.extend(expand(&c.image, t).into_iter().map(|cell| offset + targets[&(c.m, cell)]));
            dlx.add_row(&cols);
        }
        let (res, used) = dlx.solve(remaining);
        remaining = remaining.saturating_sub(used);
        match res {
            CoverResult::Solution(rows) => return Ok(SearchOutcome::Found(assemble(pres, f2, &atoms, &words, &cands, &rows)?)),
            CoverResult::Infeasible => {}
            CoverResult::BudgetExhausted => {
                return Ok(SearchOutcome::NotFound { budget_hit: true });
            }
        }
        if remaining == 0 {
            budget_hit = true;
            break;
        }
    }
    Ok(SearchOutcome::NotFound { budget_hit })
}

fn candidates_for(
    pres: &GroupoidPresentation,
    words: &[(Word, PartialMap)],
    f2: &LabeledFamily,
    atom: usize,
    cell: &Cell,
) -> Vec<Candidate> {
    let space = pres.space();
    let single = Clopen::from_cells_unchecked(space, vec![cell.clone()]);
    let mut seen: BTreeSet<(usize, Clopen)> = BTreeSet::new();
    let mut out = Vec::new();
    for (wi, (_, map)) in words.iter().enumerate() {
        if !map.domain().contains_cell(cell) {
            continue;
        }
        let image = map.image(&single);
        for (mi, target) in f2.entries().iter().enumerate() {
            if image.is_subset(target).expect("one space") && seen.insert((mi + 1, image.clone())) {
                out.push(Candidate { atom, word: wi, m: mi + 1, image: image.clone() });
            }
        }
    }
    out
}

fn assemble(
    pres: &GroupoidPresentation,
    f2: &LabeledFamily,
    atoms: &[(usize, Cell)],
    words: &[(Word, PartialMap)],
    cands: &[Candidate],
    rows: &[usize],
) -> Result<Cover> {
    let space = pres.space();
    let mut groups: BTreeMap<(usize, usize), Vec<ArrowPiece>> = BTreeMap::new();
    let mut covered = vec![Clopen::empty(space); f2.len()];
    for &r in rows {
        let c = &cands[r];
        let (n, cell) = &atoms[c.atom];
        let domain = Clopen::from_cells_unchecked(space, vec![cell.clone()]);
        groups.entry((*n, c.m)).or_default().push(ArrowPiece { word: words[c.word].0.clone(), domain });
        covered[c.m - 1] = covered[c.m - 1].union(&c.image)?;
    }
    let triples = groups
        .into_iter()
        .map(|((n, m), pieces)| Ok(Triple { bisection: pres.bisection(pieces)?, n, m }))
        .collect::<Result<Vec<_>>>()?;
    Ok(Cover { triples, covered })
}

/// Searches for a certificate of `F1 ∼ F2`.
pub fn search_equiv(
    pres: &GroupoidPresentation,
    f1: &LabeledFamily,
    f2: &LabeledFamily,
    params: SearchParams,
) -> Result<SearchOutcome<EquivCertificate>> {
    let out = cover_search(pres, f1, f2, Mode::Exact, params)?.map(|c| EquivCertificate { triples: c.triples });
    if let SearchOutcome::Found(cert) = &out {
        verify_equiv(pres, f1, f2, cert).map_err(Error::Unverified)?;
    }
    Ok(out)
}

/// Searches for a certificate of `F1 ≤ F2`.
pub fn search_leq(
    pres: &GroupoidPresentation,
    f1: &LabeledFamily,
    f2: &LabeledFamily,
    params: SearchParams,
) -> Result<SearchOutcome<LeqCertificate>> {
    let out = cover_search(pres, f1, f2, Mode::AtMost, params)?;
    let SearchOutcome::Found(cover) = out else {
        return Ok(out.map(|_| unreachable!()));
    };
    let rest: Vec<Clopen> = f2
        .entries()
        .iter()
        .zip(&cover.covered)
        .map(|(e, c)| e.difference(c))
        .collect::<Result<_>>()?;
    let (remainder, labels) = LabeledFamily::indexed(pres.space(), &rest)?;
    let mut triples = cover.triples;
    for (m, (part, label)) in rest.iter().zip(labels).enumerate() {
        if let Some(label) = label {
            triples.push(Triple { bisection: crate::grpd::Bisection::identity_on(part), n: f1.len() + label, m: m + 1 });
        }
    }
    let cert = LeqCertificate { remainder, equivalence: EquivCertificate { triples } };
    verify_leq(pres, f1, f2, &cert).map_err(Error::Unverified)?;
    Ok(SearchOutcome::Found(cert))
}
