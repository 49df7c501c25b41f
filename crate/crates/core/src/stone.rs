//! Compact open subsets of the unit space.
//!
//! Two kinds of unit space are supported: a finite discrete set `{0..n-1}` and
//! the one-sided full shift `{1..k}^N`. In the shift, a compact open set is a
//! finite union of cylinders `wX`; we keep it as a prefix antichain that is
//! maximally merged (never all `k` children of a node present), which makes
//! the representation unique and equality structural.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};

/// Largest supported shift alphabet; letters are written as single digits.
pub const MAX_ALPHABET: u8 = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnitSpace {
    Finite(usize),
    Shift(u8),
}

impl UnitSpace {
    pub fn finite(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpace("finite space needs n >= 1".into()));
        }
        Ok(UnitSpace::Finite(n))
    }

    pub fn shift(k: u8) -> Result<Self> {
        if !(2..=MAX_ALPHABET).contains(&k) {
            return Err(Error::InvalidSpace(format!(
                "shift alphabet must satisfy 2 <= k <= {MAX_ALPHABET}, got {k}"
            )));
        }
        Ok(UnitSpace::Shift(k))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, UnitSpace::Finite(_))
    }

    /// All cells of the given depth (points, for a finite space).
    pub fn cells_at_depth(&self, depth: usize) -> Vec<Cell> {
        match *self {
            UnitSpace::Finite(n) => (0..n).map(Cell::Point).collect(),
            UnitSpace::Shift(k) => words_at_depth(k, depth).into_iter().map(Cell::Cyl).collect(),
        }
    }

    pub fn check_cell(&self, cell: &Cell) -> Result<()> {
        let ok = match (self, cell) {
            (UnitSpace::Finite(n), Cell::Point(p)) => p < n,
            (UnitSpace::Shift(k), Cell::Cyl(w)) => w.iter().all(|&c| c >= 1 && c <= *k),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::CellOutOfRange { cell: cell.to_string(), space: *self })
        }
    }
}

impl fmt::Display for UnitSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitSpace::Finite(n) => write!(f, "Finite({n})"),
            UnitSpace::Shift(k) => write!(f, "Shift({k})"),
        }
    }
}

/// A basic clopen: a point of a finite space or a cylinder `wX` of the shift.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Point(usize),
    Cyl(Vec<u8>),
}

impl Cell {
    /// Parses a cylinder word written with the digits `1..=9`.
    pub fn cyl(word: &str) -> Result<Cell> {
        parse_word(word).map(Cell::Cyl)
    }

    pub fn depth(&self) -> usize {
        match self {
            Cell::Point(_) => 0,
            Cell::Cyl(w) => w.len(),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Point(p) => write!(f, "{p}"),
            Cell::Cyl(w) if w.is_empty() => write!(f, "ε"),
            Cell::Cyl(w) => write!(f, "{}", word_string(w)),
        }
    }
}

pub fn parse_word(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c.to_digit(10) {
            Some(d) if d >= 1 => Ok(d as u8),
            _ => Err(Error::Parse(format!("invalid letter {c:?} in word {s:?}"))),
        })
        .collect()
}

pub fn word_string(w: &[u8]) -> String {
    w.iter().map(|&c| char::from(b'0' + c)).collect()
}

pub(crate) fn words_at_depth(k: u8, depth: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..depth {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=k).map(move |c| {
                    let mut v = w.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Cells {
    Points(Vec<usize>),
    Words(Vec<Vec<u8>>),
}

/// A compact open subset of a [`UnitSpace`] in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clopen {
    space: UnitSpace,
    cells: Cells,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    Union,
    Intersect,
    Difference,
    Complement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Equal,
    Subset,
    Superset,
    Disjoint,
    Overlapping,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub relation: Relation,
    pub lhs_empty: bool,
    pub rhs_empty: bool,
}

impl Clopen {
    pub fn empty(space: UnitSpace) -> Self {
        let cells = match space {
            UnitSpace::Finite(_) => Cells::Points(Vec::new()),
            UnitSpace::Shift(_) => Cells::Words(Vec::new()),
        };
        Clopen { space, cells }
    }

    pub fn whole(space: UnitSpace) -> Self {
        let cells = match space {
            UnitSpace::Finite(n) => Cells::Points((0..n).collect()),
            UnitSpace::Shift(_) => Cells::Words(vec![Vec::new()]),
        };
        Clopen { space, cells }
    }

    /// Canonical clopen denoting the union of `cells`.
    pub fn canonicalize<I>(space: UnitSpace, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = Cell>,
    {
        match space {
            UnitSpace::Finite(_) => {
                let mut pts = Vec::new();
                for c in cells {
                    space.check_cell(&c)?;
                    if let Cell::Point(p) = c {
                        pts.push(p);
                    }
                }
                Ok(Self::from_points(space, pts))
            }
            UnitSpace::Shift(_) => {
                let mut words = Vec::new();
                for c in cells {
                    space.check_cell(&c)?;
                    if let Cell::Cyl(w) = c {
                        words.push(w);
                    }
                }
                Ok(Self::from_words(space, words))
            }
        }
    }

    /// Convenience for tests and builtins: cylinders given as digit strings.
    pub fn cylinders(space: UnitSpace, words: &[&str]) -> Result<Self> {
        let cells = words.iter().map(|w| Cell::cyl(w)).collect::<Result<Vec<_>>>()?;
        Self::canonicalize(space, cells)
    }

    pub fn points(space: UnitSpace, pts: &[usize]) -> Result<Self> {
        Self::canonicalize(space, pts.iter().map(|&p| Cell::Point(p)))
    }

    pub(crate) fn from_points(space: UnitSpace, mut pts: Vec<usize>) -> Self {
        pts.sort_unstable();
        pts.dedup();
        Clopen { space, cells: Cells::Points(pts) }
    }

    pub(crate) fn from_words(space: UnitSpace, words: Vec<Vec<u8>>) -> Self {
        let k = match space {
            UnitSpace::Shift(k) => k,
            UnitSpace::Finite(_) => unreachable!("words over a finite space"),
        };
        Clopen { space, cells: Cells::Words(canonical_words(words, k)) }
    }

    pub(crate) fn from_cells_unchecked(space: UnitSpace, cells: Vec<Cell>) -> Self {
        match space {
            UnitSpace::Finite(_) => Self::from_points(
                space,
                cells
                    .into_iter()
                    .filter_map(|c| match c {
                        Cell::Point(p) => Some(p),
                        _ => None,
                    })
                    .collect(),
            ),
            UnitSpace::Shift(_) => Self::from_words(
                space,
                cells
                    .into_iter()
                    .filter_map(|c| match c {
                        Cell::Cyl(w) => Some(w),
                        _ => None,
                    })
                    .collect(),
            ),
        }
    }

    pub fn space(&self) -> UnitSpace {
        self.space
    }

    pub fn cells(&self) -> Vec<Cell> {
        match &self.cells {
            Cells::Points(p) => p.iter().map(|&x| Cell::Point(x)).collect(),
            Cells::Words(w) => w.iter().cloned().map(Cell::Cyl).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match &self.cells {
            Cells::Points(p) => p.len(),
            Cells::Words(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_whole(&self) -> bool {
        *self == Clopen::whole(self.space)
    }

    pub(crate) fn point_list(&self) -> &[usize] {
        match &self.cells {
            Cells::Points(p) => p,
            Cells::Words(_) => &[],
        }
    }

    pub(crate) fn word_list(&self) -> &[Vec<u8>] {
        match &self.cells {
            Cells::Words(w) => w,
            Cells::Points(_) => &[],
        }
    }

    /// Deepest cell of the representation (0 for finite spaces).
    pub fn max_depth(&self) -> usize {
        self.word_list().iter().map(Vec::len).max().unwrap_or(0)
    }

    fn same_space(&self, other: &Clopen) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(self.space, other.space));
        }
        Ok(())
    }

    /// Whether the basic clopen `cell` is contained in `self`.
    pub fn contains_cell(&self, cell: &Cell) -> bool {
        match (&self.cells, cell) {
            (Cells::Points(p), Cell::Point(x)) => p.binary_search(x).is_ok(),
            (Cells::Words(ws), Cell::Cyl(c)) => ws.iter().any(|w| c.starts_with(w)),
            _ => false,
        }
    }

    /// Whether `cell` meets `self`.
    pub fn meets_cell(&self, cell: &Cell) -> bool {
        match (&self.cells, cell) {
            (Cells::Points(p), Cell::Point(x)) => p.binary_search(x).is_ok(),
            (Cells::Words(ws), Cell::Cyl(c)) => ws.iter().any(|w| c.starts_with(w) || w.starts_with(c)),
            _ => false,
        }
    }

    pub fn union(&self, other: &Clopen) -> Result<Clopen> {
        self.same_space(other)?;
        Ok(match (&self.cells, &other.cells) {
            (Cells::Points(a), Cells::Points(b)) => {
                Self::from_points(self.space, a.iter().chain(b).copied().collect())
            }
            (Cells::Words(a), Cells::Words(b)) => {
                Self::from_words(self.space, a.iter().chain(b).cloned().collect())
            }
            _ => unreachable!(),
        })
    }

    pub fn intersect(&self, other: &Clopen) -> Result<Clopen> {
        self.same_space(other)?;
        Ok(match (&self.cells, &other.cells) {
            (Cells::Points(a), Cells::Points(b)) => Self::from_points(
                self.space,
                a.iter().filter(|x| b.binary_search(x).is_ok()).copied().collect(),
            ),
            (Cells::Words(a), Cells::Words(b)) => {
                let mut out = Vec::new();
                for x in a {
                    for y in b {
                        if y.starts_with(x) {
                            out.push(y.clone());
                        } else if x.starts_with(y) {
                            out.push(x.clone());
                        }
                    }
                }
                Self::from_words(self.space, out)
            }
            _ => unreachable!(),
        })
    }

    pub fn complement(&self) -> Clopen {
        match (&self.cells, self.space) {
            (Cells::Points(a), UnitSpace::Finite(n)) => {
                Self::from_points(self.space, (0..n).filter(|x| a.binary_search(x).is_err()).collect())
            }
            (Cells::Words(a), UnitSpace::Shift(k)) => {
                let mut out = Vec::new();
                complement_rec(Vec::new(), a, k, &mut out);
                Self::from_words(self.space, out)
            }
            _ => unreachable!(),
        }
    }

    pub fn difference(&self, other: &Clopen) -> Result<Clopen> {
        self.same_space(other)?;
        self.intersect(&other.complement())
    }

    pub fn is_subset(&self, other: &Clopen) -> Result<bool> {
        self.same_space(other)?;
        Ok(self.cells().iter().all(|c| other.contains_cell(c)))
    }

    pub fn is_disjoint(&self, other: &Clopen) -> Result<bool> {
        self.same_space(other)?;
        Ok(!self.cells().iter().any(|c| other.meets_cell(c)))
    }

    pub fn compare(&self, other: &Clopen) -> Result<Comparison> {
        let sub = self.is_subset(other)?;
        let sup = other.is_subset(self)?;
        let relation = if sub && sup {
            Relation::Equal
        } else if sub {
            Relation::Subset
        } else if sup {
            Relation::Superset
        } else if self.is_disjoint(other)? {
            Relation::Disjoint
        } else {
            Relation::Overlapping
        };
        Ok(Comparison { relation, lhs_empty: self.is_empty(), rhs_empty: other.is_empty() })
    }

    /// The cells of depth `depth` making up `self` (points, for a finite
    /// space). Fails if some cell of `self` is deeper than `depth`.
    pub fn expand_to_depth(&self, depth: usize) -> Result<Vec<Cell>> {
        match (&self.cells, self.space) {
            (Cells::Points(p), _) => Ok(p.iter().map(|&x| Cell::Point(x)).collect()),
            (Cells::Words(ws), UnitSpace::Shift(k)) => {
                let mut out = Vec::new();
                for w in ws {
                    if w.len() > depth {
                        return Err(Error::NotExpressible {
                            depth,
                            what: format!("cylinder {}", word_string(w)),
                        });
                    }
                    for tail in words_at_depth(k, depth - w.len()) {
                        let mut v = w.clone();
                        v.extend(tail);
                        out.push(Cell::Cyl(v));
                    }
                }
                out.sort();
                Ok(out)
            }
            _ => unreachable!(),
        }
    }
}

pub fn boolean(op: BoolOp, a: &Clopen, b: Option<&Clopen>) -> Result<Clopen> {
    let need = |b: Option<&Clopen>| {
        b.cloned().ok_or_else(|| Error::Precondition("binary operation needs two operands".into()))
    };
    match op {
        BoolOp::Complement => {
            if b.is_some() {
                return Err(Error::Precondition("complement takes one operand".into()));
            }
            Ok(a.complement())
        }
        BoolOp::Union => a.union(&need(b)?),
        BoolOp::Intersect => a.intersect(&need(b)?),
        BoolOp::Difference => a.difference(&need(b)?),
    }
}

impl fmt::Display for Clopen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.cells().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", cells.join(","))
    }
}

fn canonical_words(mut words: Vec<Vec<u8>>, k: u8) -> Vec<Vec<u8>> {
    words.sort();
    words.dedup();
    // sorted order puts a prefix right before the block of its extensions
    let mut kept: Vec<Vec<u8>> = Vec::with_capacity(words.len());
    for w in words {
        if kept.last().is_some_and(|last| w.starts_with(last)) {
            continue;
        }
        kept.push(w);
    }
    let mut set: BTreeSet<Vec<u8>> = kept.into_iter().collect();
    let max_len = set.iter().map(Vec::len).max().unwrap_or(0);
    for len in (1..=max_len).rev() {
        let mut parents: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
        for w in set.iter().filter(|w| w.len() == len) {
            *parents.entry(w[..len - 1].to_vec()).or_default() += 1;
        }
        for (p, count) in parents {
            if count == k as usize {
                for c in 1..=k {
                    let mut child = p.clone();
                    child.push(c);
                    set.remove(&child);
                }
                set.insert(p);
            }
        }
    }
    set.into_iter().collect()
}

fn complement_rec(node: Vec<u8>, inside: &[Vec<u8>], k: u8, out: &mut Vec<Vec<u8>>) {
    if inside.is_empty() {
        out.push(node);
        return;
    }
    if inside.iter().any(|w| w.len() <= node.len()) {
        return;
    }
    for c in 1..=k {
        let mut child = node.clone();
        child.push(c);
        let sub: Vec<Vec<u8>> = inside.iter().filter(|w| w.starts_with(&child)).cloned().collect();
        complement_rec(child, &sub, k, out);
    }
}

/// A partition refining a list of clopen families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    /// Pairwise disjoint cells whose union is the union of all inputs.
    pub cells: Vec<Cell>,
    /// For each family and each clopen in it, the cells covering that clopen.
    pub assignment: Vec<Vec<Vec<Cell>>>,
}

/// Common refinement of clopen families. In the shift all cells have the
/// depth of the deepest input cell.
pub fn common_refinement(families: &[Vec<Clopen>]) -> Result<Refinement> {
    let all: Vec<&Clopen> = families.iter().flatten().collect();
    let Some(first) = all.first() else {
        return Ok(Refinement { cells: Vec::new(), assignment: vec![Vec::new(); families.len()] });
    };
    let space = first.space();
    for c in &all {
        first.same_space(c)?;
    }
    let depth = all.iter().map(|c| c.max_depth()).max().unwrap_or(0);
    let mut cells: BTreeSet<Cell> = BTreeSet::new();
    let mut assignment = Vec::with_capacity(families.len());
    for fam in families {
        let mut per = Vec::with_capacity(fam.len());
        for c in fam {
            let expanded = c.expand_to_depth(depth)?;
            cells.extend(expanded.iter().cloned());
            per.push(expanded);
        }
        assignment.push(per);
    }
    let _ = space;
    Ok(Refinement { cells: cells.into_iter().collect(), assignment })
}

/// A locally constant function on the unit space with finitely many nonzero
/// values, in canonical form: regions form a merged antichain and zero
/// regions are omitted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocallyConstant<V> {
    space: UnitSpace,
    values: BTreeMap<Cell, V>,
}

impl<V> LocallyConstant<V>
where
    V: Clone + PartialEq + Zero,
{
    pub fn zero(space: UnitSpace) -> Self {
        LocallyConstant { space, values: BTreeMap::new() }
    }

    pub fn space(&self) -> UnitSpace {
        self.space
    }

    /// Sum of `value * 1_region` over the given regions.
    pub fn from_sum<I>(space: UnitSpace, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Clopen, V)>,
    {
        let terms: Vec<(Clopen, V)> = terms.into_iter().collect();
        for (c, _) in &terms {
            if c.space() != space {
                return Err(Error::SpaceMismatch(space, c.space()));
            }
        }
        let depth = terms.iter().map(|(c, _)| c.max_depth()).max().unwrap_or(0);
        let mut acc: BTreeMap<Cell, V> = BTreeMap::new();
        for (c, v) in terms {
            for cell in c.expand_to_depth(depth)? {
                let slot = acc.entry(cell).or_insert_with(V::zero);
                *slot = slot.clone() + v.clone();
            }
        }
        Ok(Self::from_fine(space, acc))
    }

    pub fn indicator(set: &Clopen, value: V) -> Self {
        Self::from_sum(set.space(), [(set.clone(), value)]).expect("single region in its own space")
    }

    fn from_fine(space: UnitSpace, fine: BTreeMap<Cell, V>) -> Self {
        let mut values: BTreeMap<Cell, V> = fine.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        if let UnitSpace::Shift(k) = space {
            let max_len = values.keys().map(Cell::depth).max().unwrap_or(0);
            for len in (1..=max_len).rev() {
                let mut groups: BTreeMap<Vec<u8>, Vec<V>> = BTreeMap::new();
                for (cell, v) in values.iter() {
                    if let Cell::Cyl(w) = cell {
                        if w.len() == len {
                            groups.entry(w[..len - 1].to_vec()).or_default().push(v.clone());
                        }
                    }
                }
                for (p, vs) in groups {
                    if vs.len() == k as usize && vs.iter().all(|v| *v == vs[0]) {
                        for c in 1..=k {
                            let mut child = p.clone();
                            child.push(c);
                            values.remove(&Cell::Cyl(child));
                        }
                        values.insert(Cell::Cyl(p), vs[0].clone());
                    }
                }
            }
        }
        LocallyConstant { space, values }
    }

    pub fn regions(&self) -> impl Iterator<Item = (&Cell, &V)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.values.keys().map(Cell::depth).max().unwrap_or(0)
    }

    pub fn support(&self) -> Clopen {
        Clopen::from_cells_unchecked(self.space, self.values.keys().cloned().collect())
    }

    /// Value on `cell`, provided the function is constant there.
    pub fn value_on(&self, cell: &Cell) -> Option<V> {
        match cell {
            Cell::Point(_) => Some(self.values.get(cell).cloned().unwrap_or_else(V::zero)),
            Cell::Cyl(w) => {
                for (region, v) in &self.values {
                    if let Cell::Cyl(r) = region {
                        if w.starts_with(r) {
                            return Some(v.clone());
                        }
                        if r.starts_with(w) {
                            return None;
                        }
                    }
                }
                Some(V::zero())
            }
        }
    }

    /// Values on every cell of depth `depth`, zero cells included.
    pub fn at_depth(&self, depth: usize) -> Result<BTreeMap<Cell, V>> {
        if self.max_depth() > depth {
            return Err(Error::NotExpressible { depth, what: "locally constant function".into() });
        }
        let mut out = BTreeMap::new();
        for (cell, v) in &self.values {
            let region = Clopen::from_cells_unchecked(self.space, vec![cell.clone()]);
            for c in region.expand_to_depth(depth)? {
                out.insert(c, v.clone());
            }
        }
        Ok(out)
    }

    /// Pointwise combination of two functions.
    pub fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self>
    where
        F: Fn(&V, &V) -> V,
    {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(self.space, other.space));
        }
        let depth = self.max_depth().max(other.max_depth());
        let a = self.at_depth(depth)?;
        let b = other.at_depth(depth)?;
        let zero = V::zero();
        let keys: BTreeSet<&Cell> = a.keys().chain(b.keys()).collect();
        let fine = keys
            .into_iter()
            .map(|c| (c.clone(), f(a.get(c).unwrap_or(&zero), b.get(c).unwrap_or(&zero))))
            .collect();
        Ok(Self::from_fine(self.space, fine))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x.clone() + y.clone())
    }

    pub fn map_values<F>(&self, f: F) -> Self
    where
        F: Fn(&V) -> V,
    {
        let fine = self.values.iter().map(|(c, v)| (c.clone(), f(v))).collect();
        Self::from_fine(self.space, fine)
    }
}

impl LocallyConstant<u64> {
    /// Level sets `{f >= i}` for `i = 1..=max f`; summing their indicators
    /// gives back `f`.
    pub fn level_sets(&self) -> Vec<Clopen> {
        let max = self.values.values().copied().max().unwrap_or(0);
        (1..=max)
            .map(|i| {
                Clopen::from_cells_unchecked(
                    self.space,
                    self.values.iter().filter(|(_, &v)| v >= i).map(|(c, _)| c.clone()).collect(),
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> UnitSpace {
        UnitSpace::shift(2).unwrap()
    }

    fn cyl(ws: &[&str]) -> Clopen {
        Clopen::cylinders(s2(), ws).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(cyl(&["1", "2"]), Clopen::whole(s2()));
        assert_eq!(cyl(&["11", "12", "1"]), cyl(&["1"]));
        let f4 = UnitSpace::finite(4).unwrap();
        let c = Clopen::points(f4, &[2, 0, 2]).unwrap();
        assert_eq!(c.cells(), vec![Cell::Point(0), Cell::Point(2)]);
    }

    #[test]
    fn canonicalize_rejects_out_of_range() {
        assert!(Clopen::cylinders(s2(), &["13"]).is_err());
        let f4 = UnitSpace::finite(4).unwrap();
        assert!(Clopen::points(f4, &[4]).is_err());
        assert!(Clopen::canonicalize(f4, [Cell::cyl("1").unwrap()]).is_err());
    }

    #[test]
    fn boolean_examples() {
        assert_eq!(cyl(&["1"]).intersect(&cyl(&["12"])).unwrap(), cyl(&["12"]));
        assert_eq!(cyl(&["1"]).complement(), cyl(&["2"]));
        let f4 = UnitSpace::finite(4).unwrap();
        let a = Clopen::points(f4, &[0, 1, 2]).unwrap();
        let b = Clopen::points(f4, &[2, 3]).unwrap();
        assert_eq!(boolean(BoolOp::Difference, &a, Some(&b)).unwrap(), Clopen::points(f4, &[0, 1]).unwrap());
        assert!(boolean(BoolOp::Union, &a, None).is_err());
        assert!(a.union(&cyl(&["1"])).is_err());
    }

    #[test]
    fn whole_and_empty() {
        assert!(Clopen::whole(s2()).complement().is_empty());
        assert!(Clopen::empty(s2()).complement().is_whole());
        assert_eq!(cyl(&["121"]).complement().complement(), cyl(&["121"]));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(cyl(&["11"]).compare(&cyl(&["1"])).unwrap().relation, Relation::Subset);
        assert_eq!(cyl(&["1"]).compare(&cyl(&["2"])).unwrap().relation, Relation::Disjoint);
        let f3 = UnitSpace::finite(3).unwrap();
        let a = Clopen::points(f3, &[0, 1]).unwrap();
        let b = Clopen::points(f3, &[1, 2]).unwrap();
        assert_eq!(a.compare(&b).unwrap().relation, Relation::Overlapping);
        assert_eq!(a.compare(&a).unwrap().relation, Relation::Equal);
        let e = Clopen::empty(f3).compare(&a).unwrap();
        assert!(e.lhs_empty && !e.rhs_empty);
    }

    #[test]
    fn refinement_examples() {
        let r = common_refinement(&[vec![cyl(&["1"])], vec![cyl(&["12"])]]).unwrap();
        assert_eq!(r.cells, vec![Cell::cyl("11").unwrap(), Cell::cyl("12").unwrap()]);
        assert_eq!(r.assignment[0][0], vec![Cell::cyl("11").unwrap(), Cell::cyl("12").unwrap()]);
        assert_eq!(r.assignment[1][0], vec![Cell::cyl("12").unwrap()]);

        let f3 = UnitSpace::finite(3).unwrap();
        let r = common_refinement(&[vec![
            Clopen::points(f3, &[0, 1]).unwrap(),
            Clopen::points(f3, &[1, 2]).unwrap(),
        ]])
        .unwrap();
        assert_eq!(r.cells, vec![Cell::Point(0), Cell::Point(1), Cell::Point(2)]);
        assert_eq!(r.assignment[0][1], vec![Cell::Point(1), Cell::Point(2)]);

        // f = 1_{1X} + 1_X written two ways
        let r = common_refinement(&[
            vec![Clopen::whole(s2()), cyl(&["1"])],
            vec![cyl(&["1"]), cyl(&["1"]), cyl(&["2"])],
        ])
        .unwrap();
        assert_eq!(r.cells, vec![Cell::cyl("1").unwrap(), Cell::cyl("2").unwrap()]);
    }

    #[test]
    fn locally_constant_merges_and_levels() {
        let f = LocallyConstant::from_sum(s2(), [(Clopen::whole(s2()), 1u64), (cyl(&["1"]), 1)]).unwrap();
        assert_eq!(f.value_on(&Cell::cyl("12").unwrap()), Some(2));
        assert_eq!(f.value_on(&Cell::cyl("").unwrap()), None);
        assert_eq!(f.level_sets(), vec![Clopen::whole(s2()), cyl(&["1"])]);
        let g = LocallyConstant::from_sum(s2(), [(cyl(&["11"]), 3u64), (cyl(&["12"]), 3)]).unwrap();
        assert_eq!(g.regions().count(), 1);
        assert!(LocallyConstant::<u64>::zero(s2()).level_sets().is_empty());
    }
}
