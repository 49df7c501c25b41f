use std::collections::BTreeMap;
use std::fmt;

use super::{GroupoidPresentation, Isotropy, Letter, PartialMap, Word};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::stone::{Clopen, UnitSpace};

/// A basic compact open bisection: the arrows `(word, x)` for `x ∈ domain`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowPiece {
    pub word: Word,
    pub domain: Clopen,
}

/// A compact open bisection as a finite disjoint union of arrow pieces,
/// one piece per (reduced) word, sorted by word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bisection {
    space: UnitSpace,
    pieces: Vec<ArrowPiece>,
}

impl Bisection {
    pub fn empty(space: UnitSpace) -> Self {
        Bisection { space, pieces: Vec::new() }
    }

    pub fn identity_on(set: &Clopen) -> Self {
        let mut b = Bisection::empty(set.space());
        if !set.is_empty() {
            b.pieces.push(ArrowPiece { word: Word::identity(), domain: set.clone() });
        }
        b
    }

    pub fn space(&self) -> UnitSpace {
        self.space
    }

    pub fn pieces(&self) -> &[ArrowPiece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn dom(&self) -> Clopen {
        self.pieces
            .iter()
            .fold(Clopen::empty(self.space), |acc, p| acc.union(&p.domain).expect("same space"))
    }

    /// Longest word among the pieces.
    pub fn word_length(&self) -> usize {
        self.pieces.iter().map(|p| p.word.len()).max().unwrap_or(0)
    }
}

impl fmt::Display for Bisection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.pieces.iter().map(|p| format!("[{}] on {}", p.word, p.domain)).collect();
        write!(f, "{}", parts.join(" ⊔ "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Minimality {
    Yes,
    /// Only reported for finite spaces, where the check is exact.
    No,
    Unknown,
}

/// Result of a budgeted enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub bisections: Vec<Bisection>,
    /// False when the budget cut the enumeration short.
    pub complete: bool,
}

impl GroupoidPresentation {
    fn same_space(&self, space: UnitSpace) -> Result<()> {
        if space != self.space {
            return Err(Error::SpaceMismatch(self.space, space));
        }
        Ok(())
    }

    /// Builds a canonical bisection from arbitrary pieces: words are reduced,
    /// pieces with equal words merged, empty pieces dropped, and both the
    /// domain and range disjointness conditions checked.
    pub fn bisection(&self, pieces: Vec<ArrowPiece>) -> Result<Bisection> {
        let mut merged: BTreeMap<Word, Clopen> = BTreeMap::new();
        for p in pieces {
            self.same_space(p.domain.space())?;
            self.check_word(&p.word)?;
            let w = self.reduce(&p.word);
            let map = self.word_map(&w);
            if !p.domain.is_subset(&map.domain())? {
                return Err(Error::InvalidBisection(format!(
                    "domain {} is not inside the domain {} of word {}",
                    p.domain,
                    map.domain(),
                    w
                )));
            }
            match merged.get_mut(&w) {
                Some(d) => {
                    if !d.is_disjoint(&p.domain)? {
                        return Err(Error::InvalidBisection(format!("repeated arrows for word {w}")));
                    }
                    *d = d.union(&p.domain)?;
                }
                None => {
                    merged.insert(w, p.domain);
                }
            }
        }
        let pieces: Vec<ArrowPiece> = merged
            .into_iter()
            .filter(|(_, d)| !d.is_empty())
            .map(|(word, domain)| ArrowPiece { word, domain })
            .collect();
        let b = Bisection { space: self.space, pieces };
        self.validate(&b)?;
        Ok(b)
    }

    /// Checks the disjointness invariants of an already canonical bisection.
    pub fn validate(&self, b: &Bisection) -> Result<()> {
        self.same_space(b.space)?;
        let ranges: Vec<Clopen> = b.pieces.iter().map(|p| self.word_map(&p.word).image(&p.domain)).collect();
        for i in 0..b.pieces.len() {
            for j in i + 1..b.pieces.len() {
                if !b.pieces[i].domain.is_disjoint(&b.pieces[j].domain)? {
                    return Err(Error::InvalidBisection(format!(
                        "domains of {} and {} overlap",
                        b.pieces[i].word, b.pieces[j].word
                    )));
                }
                if !ranges[i].is_disjoint(&ranges[j])? {
                    return Err(Error::InvalidBisection(format!(
                        "ranges of {} and {} overlap",
                        b.pieces[i].word, b.pieces[j].word
                    )));
                }
            }
        }
        Ok(())
    }

    /// The bisection of a single word over its maximal domain.
    pub fn word_bisection(&self, w: &Word) -> Result<Bisection> {
        self.check_word(w)?;
        let w = self.reduce(w);
        let d = self.word_map(&w).domain();
        self.bisection(vec![ArrowPiece { word: w, domain: d }])
    }

    pub fn generator_bisection(&self, index: usize) -> Result<Bisection> {
        self.word_bisection(&Word::new(vec![Letter::gen(index)]))
    }

    pub fn ran(&self, s: &Bisection) -> Clopen {
        s.pieces.iter().fold(Clopen::empty(self.space), |acc, p| {
            acc.union(&self.word_map(&p.word).image(&p.domain)).expect("same space")
        })
    }

    pub fn inverse(&self, s: &Bisection) -> Result<Bisection> {
        self.same_space(s.space)?;
        let pieces = s
            .pieces
            .iter()
            .map(|p| ArrowPiece { word: p.word.inverse(), domain: self.word_map(&p.word).image(&p.domain) })
            .collect();
        self.bisection(pieces)
    }

    /// `s · t`: first `t`, then `s`.
    pub fn compose(&self, s: &Bisection, t: &Bisection) -> Result<Bisection> {
        self.same_space(s.space)?;
        self.same_space(t.space)?;
        let mut pieces = Vec::new();
        for tp in &t.pieces {
            let tmap = self.word_map(&tp.word);
            for sp in &s.pieces {
                let d = tmap.preimage(&sp.domain).intersect(&tp.domain)?;
                if !d.is_empty() {
                    pieces.push(ArrowPiece { word: sp.word.concat(&tp.word), domain: d });
                }
            }
        }
        self.bisection(pieces)
    }

    pub fn restrict(&self, s: &Bisection, d: &Clopen) -> Result<Bisection> {
        self.same_space(s.space)?;
        self.same_space(d.space())?;
        let pieces = s
            .pieces
            .iter()
            .map(|p| Ok(ArrowPiece { word: p.word.clone(), domain: p.domain.intersect(d)? }))
            .collect::<Result<Vec<_>>>()?;
        self.bisection(pieces)
    }

    /// Restriction by range: the arrows of `s` landing in `r`.
    pub fn corestrict(&self, s: &Bisection, r: &Clopen) -> Result<Bisection> {
        let d = self.preimage(s, r)?;
        self.restrict(s, &d)
    }

    /// Disjoint union; fails if the result is not a bisection.
    pub fn union(&self, s: &Bisection, t: &Bisection) -> Result<Bisection> {
        self.same_space(s.space)?;
        self.same_space(t.space)?;
        let mut pieces = s.pieces.clone();
        pieces.extend(t.pieces.iter().cloned());
        self.bisection(pieces)
    }

    /// `α_S(A)` for `A ⊆ d(S)`.
    pub fn apply(&self, s: &Bisection, a: &Clopen) -> Result<Clopen> {
        self.same_space(s.space)?;
        if !a.is_subset(&s.dom())? {
            return Err(Error::NotSubset(format!("{a} is not inside the domain {}", s.dom())));
        }
        self.image(s, a)
    }

    /// `α_S(A ∩ d(S))`, with no subset requirement.
    pub fn image(&self, s: &Bisection, a: &Clopen) -> Result<Clopen> {
        let mut out = Clopen::empty(self.space);
        for p in &s.pieces {
            let part = p.domain.intersect(a)?;
            out = out.union(&self.word_map(&p.word).image(&part))?;
        }
        Ok(out)
    }

    /// `α_S^{-1}(B ∩ r(S))`.
    pub fn preimage(&self, s: &Bisection, b: &Clopen) -> Result<Clopen> {
        let mut out = Clopen::empty(self.space);
        for p in &s.pieces {
            let part = self.word_map(&p.word).preimage(b).intersect(&p.domain)?;
            out = out.union(&part)?;
        }
        Ok(out)
    }

    /// Reduced words of length at most `depth` with nonempty maps, in
    /// shortlex order, with their maps. At most `budget` words are returned.
    pub fn enumerate_words(&self, depth: usize, budget: usize, exec: Exec) -> (Vec<(Word, PartialMap)>, bool) {
        let letters: Vec<Letter> = (0..self.maps.len())
            .map(Letter::gen)
            .chain((0..self.maps.len()).map(Letter::inv))
            .collect();
        let table = matches!(self.isotropy, Isotropy::Table(_));
        let mut out = vec![(Word::identity(), PartialMap::identity(self.space))];
        let mut frontier = out.clone();
        let mut complete = true;
        for _ in 0..depth {
            if frontier.is_empty() {
                break;
            }
            let children: Vec<Vec<(Word, PartialMap)>> = exec.map(&frontier, |(w, m)| {
                letters
                    .iter()
                    .filter(|l| w.letters().last() != Some(&l.flip()))
                    .filter_map(|&l| {
                        let mut v = w.letters().to_vec();
                        v.push(l);
                        let nw = Word::new(v);
                        if table && !self.is_reduced(&nw) {
                            return None;
                        }
                        let nm = m.after(&self.letter_map(l));
                        (!nm.is_empty()).then_some((nw, nm))
                    })
                    .collect()
            });
            let mut next: Vec<(Word, PartialMap)> = children.into_iter().flatten().collect();
            next.sort_by(|a, b| a.0.cmp(&b.0));
            if table {
                next.dedup_by(|a, b| a.0 == b.0);
            }
            if out.len() + next.len() > budget {
                next.truncate(budget.saturating_sub(out.len()));
                complete = false;
            }
            out.extend(next.iter().cloned());
            frontier = next;
            if !complete {
                break;
            }
        }
        (out, complete)
    }

    /// All single-piece bisections (word, maximal domain) with
    /// `|word| ≤ depth`, at most `max_pieces` of them.
    pub fn enumerate_bisections(&self, depth: usize, max_pieces: usize, exec: Exec) -> Enumeration {
        let (words, complete) = self.enumerate_words(depth, max_pieces, exec);
        let bisections = words
            .into_iter()
            .map(|(word, m)| Bisection { space: self.space, pieces: vec![ArrowPiece { word, domain: m.domain() }] })
            .collect();
        Enumeration { bisections, complete }
    }

    /// `⋃ α_w(A ∩ dom w)` over reduced words with `|w| ≤ depth`.
    pub fn saturate(&self, a: &Clopen, depth: usize) -> Result<Clopen> {
        self.same_space(a.space())?;
        let (words, _) = self.enumerate_words(depth, usize::MAX, Exec::Sequential);
        let mut out = Clopen::empty(self.space);
        for (_, m) in &words {
            out = out.union(&m.image(a))?;
        }
        Ok(out)
    }

    pub fn is_minimal(&self, depth: usize) -> Minimality {
        self.is_minimal_with(depth, Exec::default())
    }

    /// On a finite space of `n` points words of length `n - 1` reach every
    /// orbit, so `depth` is raised to that and the answer is exact.
    pub fn is_minimal_with(&self, depth: usize, exec: Exec) -> Minimality {
        let (depth, exact) = match self.space {
            UnitSpace::Finite(n) => (n.saturating_sub(1), true),
            UnitSpace::Shift(_) => (depth, false),
        };
        let (words, _) = self.enumerate_words(depth, usize::MAX, exec);
        let cells = self.space.cells_at_depth(depth);
        let all = exec.map(&cells, |c| {
            let a = Clopen::from_cells_unchecked(self.space, vec![c.clone()]);
            let mut sat = Clopen::empty(self.space);
            for (_, m) in &words {
                sat = sat.union(&m.image(&a)).expect("same space");
                if sat.is_whole() {
                    return true;
                }
            }
            sat.is_whole()
        });
        if all.into_iter().all(|b| b) {
            Minimality::Yes
        } else if exact {
            Minimality::No
        } else {
            Minimality::Unknown
        }
    }
}
