//! The rational convolution *-algebra of a presentation.
//!
//! An element is a finite combination of arrow indicators, stored per
//! reduced word as a locally constant function on the sources: the term
//! `(w, f)` is `Σ_x f(x)·δ_{(w, x)}`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::grpd::{Bisection, GroupoidPresentation, Isotropy, Letter, Word};
use crate::lp::{rat, Rational};
use crate::paradox::{disjointify, verify_witness, ParadoxWitness};
use crate::states::StateVector;
use crate::stone::{Cell, Clopen, LocallyConstant, UnitSpace};

pub type UnitFunction = LocallyConstant<Rational>;

/// Default cap on the cell depth of products.
pub const DEPTH_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConvElement {
    space: UnitSpace,
    terms: BTreeMap<Word, UnitFunction>,
}

impl ConvElement {
    pub fn zero(space: UnitSpace) -> Self {
        ConvElement { space, terms: BTreeMap::new() }
    }

    /// A unit-supported element.
    pub fn unit(f: UnitFunction) -> Self {
        let mut e = Self::zero(f.space());
        if !f.is_zero() {
            e.terms.insert(Word::identity(), f);
        }
        e
    }

    /// `1_A` for a clopen `A` of the unit space.
    pub fn unit_indicator(a: &Clopen) -> Self {
        Self::unit(LocallyConstant::indicator(a, rat(1)))
    }

    pub fn indicator(s: &Bisection) -> Self {
        let mut e = Self::zero(s.space());
        for p in s.pieces() {
            e.terms.insert(p.word.clone(), LocallyConstant::indicator(&p.domain, rat(1)));
        }
        e
    }

    pub fn space(&self) -> UnitSpace {
        self.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &UnitFunction)> {
        self.terms.iter()
    }

    /// `(word, cell, coefficient)` triples.
    pub fn term_list(&self) -> Vec<(Word, Cell, Rational)> {
        self.terms
            .iter()
            .flat_map(|(w, f)| f.regions().map(move |(c, v)| (w.clone(), c.clone(), v.clone())))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.terms.values().map(LocallyConstant::max_depth).max().unwrap_or(0)
    }

    pub fn is_unit_supported(&self) -> bool {
        self.terms.keys().all(Word::is_empty)
    }

    fn insert_add(&mut self, w: Word, f: UnitFunction) {
        let sum = match self.terms.remove(&w) {
            Some(g) => g.add(&f).expect("one space"),
            None => f,
        };
        if !sum.is_zero() {
            self.terms.insert(w, sum);
        }
    }

    pub fn add(&self, other: &ConvElement) -> Result<ConvElement> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(self.space, other.space));
        }
        let mut out = self.clone();
        for (w, f) in &other.terms {
            out.insert_add(w.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> ConvElement {
        let mut out = ConvElement::zero(self.space);
        if c.is_zero() {
            return out;
        }
        for (w, f) in &self.terms {
            out.terms.insert(w.clone(), f.map_values(|v| v * c));
        }
        out
    }

    pub fn sub(&self, other: &ConvElement) -> Result<ConvElement> {
        self.add(&other.scale(&rat(-1)))
    }

    /// `E(a)`: the restriction to unit arrows.
    pub fn expectation(&self) -> UnitFunction {
        self.terms.get(&Word::identity()).cloned().unwrap_or_else(|| LocallyConstant::zero(self.space))
    }
}

/// Convolution and involution relative to a presentation.
#[derive(Clone, Copy, Debug)]
pub struct ConvAlgebra<'a> {
    pub pres: &'a GroupoidPresentation,
    pub cap: usize,
}

impl<'a> ConvAlgebra<'a> {
    pub fn new(pres: &'a GroupoidPresentation) -> Self {
        ConvAlgebra { pres, cap: DEPTH_CAP }
    }

    fn check(&self, a: &ConvElement) -> Result<()> {
        if a.space != self.pres.space() {
            return Err(Error::SpaceMismatch(self.pres.space(), a.space));
        }
        for w in a.terms.keys() {
            self.pres.check_word(w)?;
        }
        Ok(())
    }

    /// Builds an element from `(word, cell, coefficient)` terms, reducing
    /// words and checking that each cell lies in the domain of its word.
    pub fn element(&self, terms: Vec<(Word, Cell, Rational)>) -> Result<ConvElement> {
        let space = self.pres.space();
        let mut grouped: BTreeMap<Word, Vec<(Clopen, Rational)>> = BTreeMap::new();
        for (w, c, v) in terms {
            self.pres.check_word(&w)?;
            space.check_cell(&c)?;
            let w = self.pres.reduce(&w);
            if !self.pres.word_map(&w).domain().contains_cell(&c) {
                return Err(Error::InvalidBisection(format!("cell {c} is not in the domain of {w}")));
            }
            grouped.entry(w).or_default().push((Clopen::from_cells_unchecked(space, vec![c]), v));
        }
        let mut out = ConvElement::zero(space);
        for (w, parts) in grouped {
            out.insert_add(w, LocallyConstant::from_sum(space, parts)?);
        }
        Ok(out)
    }

    pub fn conv(&self, a: &ConvElement, b: &ConvElement) -> Result<ConvElement> {
        self.check(a)?;
        self.check(b)?;
        let space = self.pres.space();
        let mut out = ConvElement::zero(space);
        for (w2, f2) in &b.terms {
            let m2 = self.pres.word_map(w2);
            for (w1, f1) in &a.terms {
                // (w1, α_{w2}(x))·(w2, x) = (w1 w2, x)
                let mut parts = Vec::new();
                for (r1, v1) in f1.regions() {
                    let pulled = m2.preimage(&Clopen::from_cells_unchecked(space, vec![r1.clone()]));
                    if pulled.is_empty() {
                        continue;
                    }
                    for (r2, v2) in f2.regions() {
                        let cell = Clopen::from_cells_unchecked(space, vec![r2.clone()]);
                        let c = pulled.intersect(&cell)?;
                        if !c.is_empty() {
                            parts.push((c, v1 * v2));
                        }
                    }
                }
                if parts.is_empty() {
                    continue;
                }
                let g = LocallyConstant::from_sum(space, parts)?;
                if g.max_depth() > self.cap {
                    return Err(Error::DepthOverflow { depth: g.max_depth(), cap: self.cap });
                }
                out.insert_add(self.pres.reduce(&w1.concat(w2)), g);
            }
        }
        Ok(out)
    }

    pub fn star(&self, a: &ConvElement) -> Result<ConvElement> {
        self.check(a)?;
        let space = self.pres.space();
        let mut out = ConvElement::zero(space);
        for (w, f) in &a.terms {
            let m = self.pres.word_map(w);
            let parts = f
                .regions()
                .map(|(c, v)| (m.image_cell(c), v.clone()))
                .collect::<Vec<_>>();
            out.insert_add(self.pres.reduce(&w.inverse()), LocallyConstant::from_sum(space, parts)?);
        }
        Ok(out)
    }

    pub fn expectation(&self, a: &ConvElement) -> UnitFunction {
        a.expectation()
    }
}

/// `a` is a unit-supported `{0, 1}`-valued function.
pub fn is_unit_projection(a: &ConvElement) -> bool {
    a.is_unit_supported() && a.expectation().regions().all(|(_, v)| v.is_one())
}

/// `p ≤ q` for unit-supported projections: `q − p` is a projection.
pub fn proj_leq(p: &ConvElement, q: &ConvElement) -> Result<bool> {
    Ok(is_unit_projection(p) && is_unit_projection(q) && is_unit_projection(&q.sub(p)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsometryReport {
    pub f: ConvElement,
    pub g: ConvElement,
    pub a: Clopen,
    /// `f*∗f = 1_A`.
    pub f_isometry: bool,
    /// `g*∗g = 1_A`.
    pub g_isometry: bool,
    /// `f∗f* + g∗g* ≤ 1_A`.
    pub ranges_dominated: bool,
    /// `f∗f* + g∗g*`.
    pub range_sum: ConvElement,
}

impl IsometryReport {
    pub fn holds(&self) -> bool {
        self.f_isometry && self.g_isometry && self.ranges_dominated
    }
}

/// `f = Σ 1_{V_{1,j}}` and `g = Σ 1_{V_{2,j}}` from a `(2, 1)` witness.
pub fn isometries_from_witness(pres: &GroupoidPresentation, w: &ParadoxWitness) -> Result<IsometryReport> {
    verify_witness(pres, w).map_err(Error::Unverified)?;
    if (w.k, w.l) != (2, 1) {
        return Err(Error::Precondition(format!("need a (2, 1) witness, got ({}, {})", w.k, w.l)));
    }
    let w = disjointify(pres, w)?;
    let alg = ConvAlgebra::new(pres);
    let row = |i: usize| -> Result<ConvElement> {
        w.rows[i]
            .iter()
            .try_fold(ConvElement::zero(pres.space()), |acc, e| acc.add(&ConvElement::indicator(&e.bisection)))
    };
    let (f, g) = (row(0)?, row(1)?);
    let one_a = ConvElement::unit_indicator(&w.a);
    let f_isometry = alg.conv(&alg.star(&f)?, &f)? == one_a;
    let g_isometry = alg.conv(&alg.star(&g)?, &g)? == one_a;
    let range_sum = alg.conv(&f, &alg.star(&f)?)?.add(&alg.conv(&g, &alg.star(&g)?)?)?;
    let ranges_dominated = proj_leq(&range_sum, &one_a)?;
    Ok(IsometryReport { f, g, a: w.a.clone(), f_isometry, g_isometry, ranges_dominated, range_sum })
}

/// A `size × size` matrix over the convolution algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatConvElement {
    pub size: usize,
    pub entries: Vec<Vec<ConvElement>>,
}

impl MatConvElement {
    pub fn zero(space: UnitSpace, size: usize) -> Self {
        MatConvElement { size, entries: vec![vec![ConvElement::zero(space); size]; size] }
    }

    /// `e_{r,c} ⊗ x` (0-based indices).
    pub fn unit_matrix(size: usize, r: usize, c: usize, x: ConvElement) -> Self {
        let mut m = Self::zero(x.space(), size);
        m.entries[r][c] = x;
        m
    }

    pub fn add(&self, other: &MatConvElement) -> Result<MatConvElement> {
        let mut out = self.clone();
        for (i, row) in out.entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = e.add(&other.entries[i][j])?;
            }
        }
        Ok(out)
    }

    pub fn mul(&self, alg: &ConvAlgebra<'_>, other: &MatConvElement) -> Result<MatConvElement> {
        let space = alg.pres.space();
        let mut out = Self::zero(space, self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                let mut acc = ConvElement::zero(space);
                for t in 0..self.size {
                    let (x, y) = (&self.entries[i][t], &other.entries[t][j]);
                    if !x.is_zero() && !y.is_zero() {
                        acc = acc.add(&alg.conv(x, y)?)?;
                    }
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    pub fn star(&self, alg: &ConvAlgebra<'_>) -> Result<MatConvElement> {
        let mut out = Self::zero(alg.pres.space(), self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                out.entries[j][i] = alg.star(&self.entries[i][j])?;
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixReport {
    pub k: usize,
    pub l: usize,
    pub a: Clopen,
    pub pieces: usize,
    /// The `a*a` are pairwise orthogonal, and so are the `a a*`.
    pub orthogonal: bool,
    /// `Σ a*a = 1_k ⊗ 1_A`.
    pub sources_fill: bool,
    /// `Σ a a* ≤ 1_l ⊗ 1_A` entrywise, zero off the first `l` diagonal slots.
    pub ranges_dominated: bool,
}

impl MatrixReport {
    pub fn holds(&self) -> bool {
        self.orthogonal && self.sources_fill && self.ranges_dominated
    }
}

/// `a_{i,j} = e_{m_{i,j}, i} ⊗ 1_{V_{i,j}}` for a `(k, l)` witness.
pub fn matrix_isometries(pres: &GroupoidPresentation, w: &ParadoxWitness) -> Result<(Vec<MatConvElement>, MatrixReport)> {
    verify_witness(pres, w).map_err(Error::Unverified)?;
    let w = disjointify(pres, w)?;
    let alg = ConvAlgebra::new(pres);
    let space = pres.space();
    let k = w.k;
    let mut mats = Vec::new();
    for (i, row) in w.rows.iter().enumerate() {
        for e in row {
            mats.push(MatConvElement::unit_matrix(k, e.m - 1, i, ConvElement::indicator(&e.bisection)));
        }
    }
    let mut sources = Vec::with_capacity(mats.len());
    let mut ranges = Vec::with_capacity(mats.len());
    for a in &mats {
        let s = a.star(&alg)?;
        sources.push(s.mul(&alg, a)?);
        ranges.push(a.mul(&alg, &s)?);
    }
    let zero = MatConvElement::zero(space, k);
    let mut orthogonal = true;
    'outer: for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            if sources[i].mul(&alg, &sources[j])? != zero || ranges[i].mul(&alg, &ranges[j])? != zero {
                orthogonal = false;
                break 'outer;
            }
        }
    }
    let source_sum = sources.iter().try_fold(zero.clone(), |acc, m| acc.add(m))?;
    let range_sum = ranges.iter().try_fold(zero.clone(), |acc, m| acc.add(m))?;
    let one_a = ConvElement::unit_indicator(&w.a);
    let mut sources_fill = true;
    let mut ranges_dominated = true;
    for i in 0..k {
        for j in 0..k {
            let s = &source_sum.entries[i][j];
            let r = &range_sum.entries[i][j];
            if i == j {
                sources_fill &= *s == one_a;
                ranges_dominated &= if i < w.l { proj_leq(r, &one_a)? } else { r.is_zero() };
            } else {
                sources_fill &= s.is_zero();
                ranges_dominated &= r.is_zero();
            }
        }
    }
    let report = MatrixReport { k, l: w.l, a: w.a.clone(), pieces: mats.len(), orthogonal, sources_fill, ranges_dominated };
    Ok((mats, report))
}

/// Maximal walk length explored before `G_u` is declared infinite.
fn walk_cap(n: usize) -> usize {
    n.max(1)
}

/// The regular representation at a point `u` of a finite presentation,
/// on the free module with basis `G_u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularRep {
    pub u: usize,
    /// Basis arrows `(h, u)`, identified by their reduced words.
    pub arrows: Vec<Word>,
    /// Range `r(h)` of each basis arrow.
    pub ranges: Vec<usize>,
    index: HashMap<Word, usize>,
}

pub fn regular_rep(pres: &GroupoidPresentation, u: usize) -> Result<RegularRep> {
    let n = match pres.space() {
        UnitSpace::Finite(n) => n,
        UnitSpace::Shift(_) => return Err(Error::NotFinite),
    };
    if u >= n {
        return Err(Error::CellOutOfRange { cell: u.to_string(), space: pres.space() });
    }
    let letters: Vec<Letter> =
        (0..pres.generators().len()).map(Letter::gen).chain((0..pres.generators().len()).map(Letter::inv)).collect();
    let mut arrows = vec![Word::identity()];
    let mut ranges = vec![u];
    let mut seen: HashMap<Word, usize> = HashMap::from([(Word::identity(), 0)]);
    let table = matches!(pres.isotropy(), Isotropy::Table(_));
    let mut frontier = vec![(Word::identity(), u)];
    let mut len = 0;
    while !frontier.is_empty() {
        if !table && len >= walk_cap(n) {
            return Err(Error::Infinite(format!(
                "G_{u} contains a cycle of reduced words; free-words isotropy makes it infinite"
            )));
        }
        let mut next = Vec::new();
        for (w, x) in &frontier {
            for &l in &letters {
                if w.letters().first() == Some(&l.flip()) {
                    continue;
                }
                let Some(y) = pres.letter_map(l).point(*x) else { continue };
                let mut v = vec![l];
                v.extend_from_slice(w.letters());
                let nw = pres.reduce(&Word::new(v));
                if seen.contains_key(&nw) {
                    continue;
                }
                seen.insert(nw.clone(), arrows.len());
                arrows.push(nw.clone());
                ranges.push(y);
                next.push((nw, y));
            }
        }
        frontier = next;
        len += 1;
    }
    Ok(RegularRep { u, arrows, ranges, index: seen })
}

impl RegularRep {
    pub fn dim(&self) -> usize {
        self.arrows.len()
    }

    /// Matrix of `π_u(a)`: `δ_h ↦ Σ_g a(g) δ_{gh}` over `g` with `d(g) = r(h)`.
    pub fn matrix(&self, pres: &GroupoidPresentation, a: &ConvElement) -> Result<Vec<Vec<Rational>>> {
        let d = self.dim();
        let mut m = vec![vec![Rational::zero(); d]; d];
        for (w, f) in a.terms() {
            for (hi, h) in self.arrows.iter().enumerate() {
                let x = self.ranges[hi];
                let v = f.value_on(&Cell::Point(x)).expect("points are cells");
                if v.is_zero() {
                    continue;
                }
                let gh = pres.reduce(&w.concat(h));
                let Some(&gi) = self.index.get(&gh) else {
                    return Err(Error::Infinite(format!("arrow {gh} escapes the enumerated G_{}", self.u)));
                };
                m[gi][hi] += v;
            }
        }
        Ok(m)
    }
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let mut out = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for t in 0..n {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[t][j].is_zero() {
                    out[i][j] += &a[i][t] * &b[t][j];
                }
            }
        }
    }
    out
}

/// `τ(a) = Σ_cells μ(cell)·E(a)(cell)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceFunctional {
    state: StateVector,
}

impl TraceFunctional {
    pub fn new(state: StateVector) -> Self {
        TraceFunctional { state }
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn tau(&self, a: &ConvElement) -> Result<Rational> {
        let e = a.expectation();
        let fine = e.at_depth(self.state.depth)?;
        Ok(fine.iter().map(|(c, v)| v * self.state.value(c)).sum())
    }
}

/// Whether `E(a)` is pointwise nonnegative.
pub fn expectation_nonnegative(a: &ConvElement) -> bool {
    a.expectation().regions().all(|(_, v)| !v.is_negative())
}
