//! Groupoid presentations by generating compact open bisections.
//!
//! An arrow is identified by an isotropy key together with its source point:
//! under [`Isotropy::FreeWords`] the key is the freely reduced word, under
//! [`Isotropy::Table`] it is the group element the word evaluates to. Words
//! act by composition, rightmost letter first, so the word `(g1, g2⁻¹)` strips
//! a leading `2` and then prepends a `1`.

mod bisection;
mod map;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

pub use bisection::{ArrowPiece, Bisection, Enumeration, Minimality};
pub use map::PartialMap;

use crate::error::{Error, Result};
use crate::stone::{parse_word, word_string, UnitSpace};

/// A generator or its formal inverse. Ordered positive-before-inverse, then
/// by generator index, which gives the shortlex order used in enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub inverse: bool,
    pub generator: usize,
}

impl Letter {
    pub fn gen(generator: usize) -> Self {
        Letter { inverse: false, generator }
    }

    pub fn inv(generator: usize) -> Self {
        Letter { inverse: true, generator }
    }

    pub fn flip(self) -> Self {
        Letter { inverse: !self.inverse, ..self }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.generator + 1)?;
        if self.inverse {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// A word in the generators; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self · other` (apply `other` first), not reduced.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.flip()).collect())
    }

    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.flip()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].flip())
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Action of a group element: a partial injection of a finite space or a
/// finite family of prefix maps with disjoint domains and disjoint ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupAction {
    Injection(Vec<(usize, usize)>),
    Pieces(Vec<(Vec<u8>, Vec<u8>)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// The bisection `U_{β,α}` sending `αγ ↦ βγ`.
    PrefixMap { alpha: Vec<u8>, beta: Vec<u8> },
    PartialInjection { pairs: Vec<(usize, usize)> },
    GroupElement { label: String, action: GroupAction },
}

impl Generator {
    fn to_map(&self, space: UnitSpace, index: usize) -> Result<PartialMap> {
        let bad = |reason: String| Error::MalformedGenerator { index: index + 1, reason };
        match (self, space) {
            (Generator::PrefixMap { alpha, beta }, UnitSpace::Shift(k)) => {
                check_letters(alpha, k).map_err(bad)?;
                check_letters(beta, k).map_err(bad)?;
                Ok(PartialMap::Prefix { k, pieces: vec![(alpha.clone(), beta.clone())] })
            }
            (Generator::PartialInjection { pairs }, UnitSpace::Finite(n))
            | (Generator::GroupElement { action: GroupAction::Injection(pairs), .. }, UnitSpace::Finite(n)) => {
                let mut images = vec![None; n];
                let mut hit = vec![false; n];
                for &(s, t) in pairs {
                    if s >= n || t >= n {
                        return Err(bad(format!("pair ({s},{t}) out of range for {space}")));
                    }
                    if images[s].is_some() {
                        return Err(bad(format!("source {s} appears twice")));
                    }
                    if hit[t] {
                        return Err(bad(format!("target {t} appears twice")));
                    }
                    images[s] = Some(t);
                    hit[t] = true;
                }
                Ok(PartialMap::Points { images })
            }
            (Generator::GroupElement { action: GroupAction::Pieces(pieces), .. }, UnitSpace::Shift(k)) => {
                for (a, b) in pieces {
                    check_letters(a, k).map_err(bad)?;
                    check_letters(b, k).map_err(bad)?;
                }
                for (i, (a, b)) in pieces.iter().enumerate() {
                    for (c, d) in &pieces[i + 1..] {
                        if a.starts_with(c) || c.starts_with(a) {
                            return Err(bad(format!(
                                "overlapping domains {} and {}",
                                word_string(a),
                                word_string(c)
                            )));
                        }
                        if b.starts_with(d) || d.starts_with(b) {
                            return Err(bad(format!(
                                "overlapping ranges {} and {}",
                                word_string(b),
                                word_string(d)
                            )));
                        }
                    }
                }
                Ok(PartialMap::Prefix { k, pieces: map::normalize(k, pieces.clone()) })
            }
            _ => Err(bad(format!("generator kind does not act on {space}"))),
        }
    }
}

fn check_letters(w: &[u8], k: u8) -> std::result::Result<(), String> {
    match w.iter().find(|&&c| c == 0 || c > k) {
        Some(c) => Err(format!("letter {c} outside alphabet 1..{k}")),
        None => Ok(()),
    }
}

/// A finite group given by its multiplication table, element 0 the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    generator_elements: Vec<usize>,
    /// Shortest, shortlex-least word for each element.
    canonical: Vec<Word>,
    element_maps: Vec<PartialMap>,
    index: BTreeMap<Word, usize>,
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn generator_elements(&self) -> &[usize] {
        &self.generator_elements
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsotropySpec {
    FreeWords,
    Table(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Isotropy {
    FreeWords,
    Table(Box<GroupTable>),
}

/// The groupoid generated by a finite list of compact open bisections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidPresentation {
    space: UnitSpace,
    generators: Vec<Generator>,
    maps: Vec<PartialMap>,
    isotropy: Isotropy,
    name: Option<String>,
}

/// The builtin families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresentationSpec {
    Cuntz(u8),
    Transformation { space: UnitSpace, actions: Vec<GroupAction> },
    FiniteGroupoid { n: usize, arrows: Vec<(usize, usize)> },
    Pair(usize),
}

impl GroupoidPresentation {
    pub fn new(space: UnitSpace, generators: Vec<Generator>, isotropy: IsotropySpec) -> Result<Self> {
        let maps = generators
            .iter()
            .enumerate()
            .map(|(i, g)| g.to_map(space, i))
            .collect::<Result<Vec<_>>>()?;
        let isotropy = match isotropy {
            IsotropySpec::FreeWords => Isotropy::FreeWords,
            IsotropySpec::Table(table) => Isotropy::Table(Box::new(build_table(space, &generators, &maps, table)?)),
        };
        Ok(GroupoidPresentation { space, generators, maps, isotropy, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn make(spec: &PresentationSpec) -> Result<Self> {
        match spec {
            PresentationSpec::Cuntz(n) => Self::cuntz(*n),
            PresentationSpec::Transformation { space, actions } => Self::transformation(*space, actions.clone()),
            PresentationSpec::FiniteGroupoid { n, arrows } => Self::finite_groupoid(*n, arrows),
            PresentationSpec::Pair(n) => Self::pair(*n),
        }
    }

    /// The Cuntz groupoid: generators `U_{i,ε}: γ ↦ iγ` on `{1..n}^N`.
    pub fn cuntz(n: u8) -> Result<Self> {
        let space = UnitSpace::shift(n)?;
        let gens = (1..=n).map(|i| Generator::PrefixMap { alpha: vec![], beta: vec![i] }).collect();
        Ok(Self::new(space, gens, IsotropySpec::FreeWords)?.with_name(format!("cuntz:{n}")))
    }

    /// The pair groupoid on `n` points, generated by `i ↦ i+1`.
    pub fn pair(n: usize) -> Result<Self> {
        let space = UnitSpace::finite(n)?;
        let gens = (0..n.saturating_sub(1))
            .map(|i| Generator::PartialInjection { pairs: vec![(i, i + 1)] })
            .collect();
        Ok(Self::new(space, gens, IsotropySpec::FreeWords)?.with_name(format!("pair:{n}")))
    }

    /// The trivial groupoid (units only) on `n` points.
    pub fn trivial(n: usize) -> Result<Self> {
        Ok(Self::new(UnitSpace::finite(n)?, vec![], IsotropySpec::FreeWords)?.with_name(format!("trivial:{n}")))
    }

    /// Groupoid generated by single arrows `s → t` on `n` points.
    pub fn finite_groupoid(n: usize, arrows: &[(usize, usize)]) -> Result<Self> {
        let space = UnitSpace::finite(n)?;
        let gens = arrows.iter().map(|&(s, t)| Generator::PartialInjection { pairs: vec![(s, t)] }).collect();
        Self::new(space, gens, IsotropySpec::FreeWords)
    }

    /// Transformation groupoid of the free group on the given (partial)
    /// actions.
    pub fn transformation(space: UnitSpace, actions: Vec<GroupAction>) -> Result<Self> {
        let gens = actions
            .into_iter()
            .enumerate()
            .map(|(i, action)| Generator::GroupElement { label: format!("t{}", i + 1), action })
            .collect();
        Self::new(space, gens, IsotropySpec::FreeWords)
    }

    /// `ℤ` acting on `ℤ/n` by `x ↦ x+1`; isotropy `nℤ` is retained.
    pub fn rotation(n: usize) -> Result<Self> {
        let space = UnitSpace::finite(n)?;
        let action = GroupAction::Injection((0..n).map(|x| (x, (x + 1) % n)).collect());
        Ok(Self::transformation(space, vec![action])?.with_name(format!("rotation:{n}")))
    }

    /// `ℤ/n` acting on itself by rotation, with the group given by its table.
    pub fn rotation_table(n: usize) -> Result<Self> {
        let space = UnitSpace::finite(n)?;
        let gens = vec![Generator::GroupElement {
            label: "1".into(),
            action: GroupAction::Injection((0..n).map(|x| (x, (x + 1) % n)).collect()),
        }];
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Ok(Self::new(space, gens, IsotropySpec::Table(table))?.with_name(format!("rotation-table:{n}")))
    }

    /// The adding machine on `{1,2}^N` (digit 1 plays 0, digit 2 plays 1),
    /// truncated to its first `levels` carry pieces `2^j 1 ↦ 1^j 2`.
    pub fn odometer(levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Precondition("odometer needs at least one level".into()));
        }
        let space = UnitSpace::shift(2)?;
        let pieces = (0..levels)
            .map(|j| {
                let mut a = vec![2; j];
                a.push(1);
                let mut b = vec![1; j];
                b.push(2);
                (a, b)
            })
            .collect();
        let gens = vec![Generator::GroupElement { label: "odometer".into(), action: GroupAction::Pieces(pieces) }];
        Ok(Self::new(space, gens, IsotropySpec::FreeWords)?.with_name(format!("odometer:{levels}")))
    }

    /// Resolves builtin aliases such as `cuntz:2`, `pair:3`, `rotation:3`.
    pub fn builtin(alias: &str) -> Result<Self> {
        let (kind, arg) = alias.split_once(':').unwrap_or((alias, ""));
        let num = |default: Option<usize>| -> Result<usize> {
            if arg.is_empty() {
                return default.ok_or_else(|| Error::Parse(format!("builtin {kind:?} needs an argument")));
            }
            arg.parse().map_err(|_| Error::Parse(format!("invalid argument {arg:?} in {alias:?}")))
        };
        match kind {
            "cuntz" => {
                let n = num(None)?;
                Self::cuntz(u8::try_from(n).map_err(|_| Error::Parse(format!("cuntz:{n} too large")))?)
            }
            "pair" => Self::pair(num(None)?),
            "rotation" => Self::rotation(num(None)?),
            "rotation-table" => Self::rotation_table(num(None)?),
            "trivial" => Self::trivial(num(None)?),
            "odometer" => Self::odometer(num(Some(3))?),
            _ => Err(Error::Parse(format!("unknown builtin presentation {alias:?}"))),
        }
    }

    pub fn space(&self) -> UnitSpace {
        self.space
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator_maps(&self) -> &[PartialMap] {
        &self.maps
    }

    pub fn isotropy(&self) -> &Isotropy {
        &self.isotropy
    }

    pub fn letter_map(&self, l: Letter) -> PartialMap {
        let m = &self.maps[l.generator];
        if l.inverse {
            m.inverse()
        } else {
            m.clone()
        }
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|l| l.generator >= self.maps.len()) {
            Some(l) => Err(Error::InvalidBisection(format!("unknown generator {l}"))),
            None => Ok(()),
        }
    }

    /// Canonical isotropy key of a word.
    pub fn reduce(&self, w: &Word) -> Word {
        match &self.isotropy {
            Isotropy::FreeWords => w.free_reduce(),
            Isotropy::Table(t) => t.canonical[self.element_of(t, w)].clone(),
        }
    }

    pub fn is_reduced(&self, w: &Word) -> bool {
        self.reduce(w) == *w
    }

    fn element_of(&self, t: &GroupTable, w: &Word) -> usize {
        w.letters().iter().fold(0, |acc, l| {
            let g = t.generator_elements[l.generator];
            let g = if l.inverse { t.inverse[g] } else { g };
            t.table[acc][g]
        })
    }

    /// Table element of a word, when the presentation carries a table.
    pub fn element(&self, w: &Word) -> Option<usize> {
        match &self.isotropy {
            Isotropy::Table(t) => Some(self.element_of(t, w)),
            Isotropy::FreeWords => None,
        }
    }

    /// The partial homeomorphism induced by a word.
    pub fn word_map(&self, w: &Word) -> PartialMap {
        if let Isotropy::Table(t) = &self.isotropy {
            if let Some(&e) = t.index.get(w) {
                return t.element_maps[e].clone();
            }
        }
        w.letters()
            .iter()
            .rev()
            .fold(PartialMap::identity(self.space), |acc, &l| self.letter_map(l).after(&acc))
    }

    /// Word for `U_{β,α}` (`αγ ↦ βγ`) in a presentation whose first
    /// generators are the Cuntz maps `γ ↦ iγ`.
    pub fn cuntz_word(&self, beta: &[u8], alpha: &[u8]) -> Word {
        let mut letters: Vec<Letter> = beta.iter().map(|&c| Letter::gen(c as usize - 1)).collect();
        letters.extend(alpha.iter().rev().map(|&c| Letter::inv(c as usize - 1)));
        self.reduce(&Word::new(letters))
    }

    pub fn cuntz_bisection(&self, beta: &str, alpha: &str) -> Result<Bisection> {
        let (b, a) = (parse_word(beta)?, parse_word(alpha)?);
        let w = self.cuntz_word(&b, &a);
        let dom = crate::stone::Clopen::from_words(self.space, vec![a]);
        self.bisection(vec![ArrowPiece { word: w, domain: dom }])
    }
}

fn build_table(
    space: UnitSpace,
    generators: &[Generator],
    maps: &[PartialMap],
    table: Vec<Vec<usize>>,
) -> Result<GroupTable> {
    let m = table.len();
    let bad = |s: String| Error::Parse(format!("group table: {s}"));
    if m == 0 || table.iter().any(|row| row.len() != m || row.iter().any(|&x| x >= m)) {
        return Err(bad("table must be square with entries in 0..order".into()));
    }
    for a in 0..m {
        if table[0][a] != a || table[a][0] != a {
            return Err(bad("element 0 must be the identity".into()));
        }
        for b in 0..m {
            for c in 0..m {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(bad(format!("not associative at ({a},{b},{c})")));
                }
            }
        }
    }
    let inverse = (0..m)
        .map(|a| (0..m).find(|&b| table[a][b] == 0).ok_or_else(|| bad(format!("element {a} has no inverse"))))
        .collect::<Result<Vec<_>>>()?;
    let generator_elements = generators
        .iter()
        .enumerate()
        .map(|(i, g)| match g {
            Generator::GroupElement { label, .. } => label
                .parse::<usize>()
                .ok()
                .filter(|&e| e < m)
                .ok_or_else(|| bad(format!("generator label {label:?} is not an element index"))),
            _ => Ok(i + 1),
        })
        .collect::<Result<Vec<_>>>()?;
    for (i, map) in maps.iter().enumerate() {
        if generator_elements[i] >= m {
            return Err(bad(format!("generator g{} has no element", i + 1)));
        }
        if map.domain() != crate::stone::Clopen::whole(space) {
            return Err(Error::MalformedGenerator {
                index: i + 1,
                reason: "table isotropy requires a globally defined action".into(),
            });
        }
    }
    // breadth-first over shortlex words: the first word reaching an element is canonical
    let mut letters: Vec<Letter> = (0..maps.len()).map(Letter::gen).collect();
    letters.extend((0..maps.len()).map(Letter::inv));
    let mut canonical: Vec<Option<Word>> = vec![None; m];
    let mut element_maps: Vec<Option<PartialMap>> = vec![None; m];
    canonical[0] = Some(Word::identity());
    element_maps[0] = Some(PartialMap::identity(space));
    let mut queue = VecDeque::from([0usize]);
    while let Some(e) = queue.pop_front() {
        for &l in &letters {
            let g = generator_elements[l.generator];
            let g = if l.inverse { inverse[g] } else { g };
            let f = table[e][g];
            let lm = if l.inverse { maps[l.generator].inverse() } else { maps[l.generator].clone() };
            let fmap = element_maps[e].as_ref().expect("visited").after(&lm);
            match &element_maps[f] {
                Some(existing) if *existing != fmap => {
                    return Err(bad(format!("action is inconsistent with the table at element {f}")));
                }
                Some(_) => {}
                None => {
                    let mut w = canonical[e].clone().expect("visited").0;
                    w.push(l);
                    canonical[f] = Some(Word(w));
                    element_maps[f] = Some(fmap);
                    queue.push_back(f);
                }
            }
        }
    }
    if canonical.iter().any(Option::is_none) {
        return Err(bad("generators do not generate the whole group".into()));
    }
    let canonical: Vec<Word> = canonical.into_iter().map(Option::unwrap).collect();
    let index = canonical.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    Ok(GroupTable {
        table,
        inverse,
        generator_elements,
        canonical,
        element_maps: element_maps.into_iter().map(Option::unwrap).collect(),
        index,
    })
}
