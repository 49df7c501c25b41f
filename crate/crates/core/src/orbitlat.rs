//! Orbits, invariant subsets and the ideal lattice of finite principal
//! groupoids.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::grpd::{Generator, GroupoidPresentation, IsotropySpec, PartialMap};
use crate::par::Exec;
use crate::starconv::{regular_rep, ConvAlgebra, ConvElement};
use crate::stone::UnitSpace;

/// Arrow sets up to this size are also searched exhaustively for ideals.
const BRUTE_FORCE_ARROWS: usize = 16;
/// Structure constants are checked for associativity below this size.
const ASSOCIATIVITY_CAP: usize = 200;
/// Products are cross-checked against the convolution algebra below this size.
const CONV_CHECK_ARROWS: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    pub n: usize,
    /// Orbits, each sorted, ordered by least element.
    pub blocks: Vec<Vec<usize>>,
    /// Orbit index of each point.
    pub block_of: Vec<usize>,
}

impl OrbitPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

fn finite_points(pres: &GroupoidPresentation) -> Result<usize> {
    match pres.space() {
        UnitSpace::Finite(n) => Ok(n),
        UnitSpace::Shift(_) => Err(Error::NotFinite),
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

pub fn orbits(pres: &GroupoidPresentation) -> Result<OrbitPartition> {
    let n = finite_points(pres)?;
    let mut parent: Vec<usize> = (0..n).collect();
    for map in pres.generator_maps() {
        let PartialMap::Points { images } = map else { unreachable!("finite spaces carry point maps") };
        for (x, y) in images.iter().enumerate() {
            if let Some(y) = y {
                let (a, b) = (find(&mut parent, x), find(&mut parent, *y));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        let r = find(&mut parent, x);
        blocks.entry(r).or_default().push(x);
    }
    let blocks: Vec<Vec<usize>> = blocks.into_values().collect();
    let mut block_of = vec![0; n];
    for (i, b) in blocks.iter().enumerate() {
        for &x in b {
            block_of[x] = i;
        }
    }
    Ok(OrbitPartition { n, blocks, block_of })
}

/// Orbits and the quotient map onto quasi-orbits. On a discrete space
/// orbit closures are orbits, so the two coincide.
pub fn orbits_and_quasiorbits(pres: &GroupoidPresentation) -> Result<(OrbitPartition, Vec<usize>)> {
    let o = orbits(pres)?;
    let q = o.block_of.clone();
    Ok((o, q))
}

/// Invariant subsets as bitsets over the points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantLattice {
    pub n: usize,
    pub sets: Vec<u64>,
    pub union: Vec<Vec<usize>>,
    pub intersection: Vec<Vec<usize>>,
}

impl InvariantLattice {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn position(&self, set: u64) -> Option<usize> {
        self.sets.binary_search(&set).ok()
    }
}

fn block_mask(o: &OrbitPartition, chosen: usize) -> u64 {
    o.blocks
        .iter()
        .enumerate()
        .filter(|(i, _)| chosen >> i & 1 == 1)
        .flat_map(|(_, b)| b.iter())
        .fold(0, |m, &x| m | 1 << x)
}

pub fn invariant_lattice(pres: &GroupoidPresentation) -> Result<InvariantLattice> {
    let o = orbits(pres)?;
    if o.n > 63 || o.len() > 20 {
        return Err(Error::Infinite(format!("{} points in {} orbits is beyond the bitset lattice", o.n, o.len())));
    }
    let mut sets: Vec<u64> = (0..1usize << o.len()).map(|c| block_mask(&o, c)).collect();
    sets.sort_unstable();
    let pos = |s: u64| sets.binary_search(&s).expect("closed under the lattice operations");
    let union = sets.iter().map(|a| sets.iter().map(|b| pos(a | b)).collect()).collect();
    let intersection = sets.iter().map(|a| sets.iter().map(|b| pos(a & b)).collect()).collect();
    Ok(InvariantLattice { n: o.n, sets, union, intersection })
}

/// Whether `set` is invariant: `d(g) ∈ set` implies `r(g) ∈ set`.
pub fn is_invariant(pres: &GroupoidPresentation, set: u64) -> Result<bool> {
    finite_points(pres)?;
    for map in pres.generator_maps() {
        let PartialMap::Points { images } = map else { unreachable!() };
        for (x, y) in images.iter().enumerate() {
            if let Some(y) = y {
                if (set >> x & 1) != (set >> y & 1) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The groupoid algebra of a finite principal groupoid: basis the arrows
/// `(range, source)`, with `e_{(z,y)} e_{(y,x)} = e_{(z,x)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    pub arrows: Vec<(usize, usize)>,
    index: BTreeMap<(usize, usize), usize>,
    /// `product[i][j]` is the basis index of `e_i e_j`, or `None` for zero.
    pub product: Vec<Vec<Option<usize>>>,
    pub involution: Vec<usize>,
    /// The arrow as a convolution element of the presentation.
    elements: Vec<ConvElement>,
}

impl FiniteAlgebra {
    pub fn build(pres: &GroupoidPresentation) -> Result<FiniteAlgebra> {
        let n = finite_points(pres)?;
        let mut arrows = Vec::new();
        let mut elements = Vec::new();
        for u in 0..n {
            let rep = regular_rep(pres, u).map_err(|e| match e {
                Error::Infinite(m) => Error::NotPrincipal(m),
                e => e,
            })?;
            let mut seen = BTreeSet::new();
            for (w, &r) in rep.arrows.iter().zip(&rep.ranges) {
                if !seen.insert(r) {
                    return Err(Error::NotPrincipal(format!("two arrows {u} → {r}, so {u} has nontrivial isotropy")));
                }
                arrows.push((r, u));
                let b = pres.word_bisection(w)?;
                let point = crate::stone::Clopen::points(pres.space(), &[u])?;
                elements.push(ConvElement::indicator(&pres.restrict(&b, &point)?));
            }
        }
        let mut order: Vec<usize> = (0..arrows.len()).collect();
        order.sort_by_key(|&i| arrows[i]);
        let arrows: Vec<(usize, usize)> = order.iter().map(|&i| arrows[i]).collect();
        let elements: Vec<ConvElement> = order.iter().map(|&i| elements[i].clone()).collect();
        let index: BTreeMap<(usize, usize), usize> = arrows.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let product = arrows
            .iter()
            .map(|&(z, y)| {
                arrows.iter().map(|&(y2, x)| if y == y2 { index.get(&(z, x)).copied() } else { None }).collect()
            })
            .collect();
        let involution = arrows.iter().map(|&(y, x)| index[&(x, y)]).collect();
        Ok(FiniteAlgebra { arrows, index, product, involution, elements })
    }

    pub fn dim(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow(&self, range: usize, source: usize) -> Option<usize> {
        self.index.get(&(range, source)).copied()
    }

    /// Composable products land in the basis and are associative.
    pub fn check_associative(&self) -> bool {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                let ij = self.product[i][j];
                if let Some(p) = ij {
                    if self.arrows[i].1 != self.arrows[j].0 || self.arrows[p] != (self.arrows[i].0, self.arrows[j].1) {
                        return false;
                    }
                } else if self.arrows[i].1 == self.arrows[j].0 {
                    return false;
                }
                for k in 0..d {
                    let left = ij.and_then(|p| self.product[p][k]);
                    let right = self.product[j][k].and_then(|q| self.product[i][q]);
                    if left != right {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The structure constants agree with convolution in the presentation.
    pub fn check_against_convolution(&self, pres: &GroupoidPresentation) -> Result<bool> {
        let alg = ConvAlgebra::new(pres);
        let zero = ConvElement::zero(pres.space());
        for i in 0..self.dim() {
            if alg.star(&self.elements[i])? != self.elements[self.involution[i]] {
                return Ok(false);
            }
            for j in 0..self.dim() {
                let got = alg.conv(&self.elements[i], &self.elements[j])?;
                let want = self.product[i][j].map_or(&zero, |p| &self.elements[p]);
                if got != *want {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The span of a basis subset is a two-sided ideal.
    pub fn is_ideal(&self, set: &BTreeSet<usize>) -> bool {
        set.iter().all(|&i| {
            (0..self.dim()).all(|j| {
                self.product[i][j].is_none_or(|p| set.contains(&p)) && self.product[j][i].is_none_or(|p| set.contains(&p))
            })
        })
    }

    /// Basis of the span of all products `a b` with `a ∈ I`, `b ∈ J`.
    pub fn ideal_product(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> BTreeSet<usize> {
        a.iter().flat_map(|&i| b.iter().filter_map(move |&j| self.product[i][j])).collect()
    }

    /// `Ξ(U)`: arrows with source in `U`.
    pub fn xi(&self, u: u64) -> BTreeSet<usize> {
        (0..self.dim()).filter(|&i| u >> self.arrows[i].1 & 1 == 1).collect()
    }

    /// `Θ(I)`: the union of supports of unit-supported elements of `I`.
    pub fn theta(&self, ideal: &BTreeSet<usize>) -> u64 {
        ideal.iter().map(|&i| self.arrows[i]).filter(|(r, s)| r == s).fold(0, |m, (_, s)| m | 1 << s)
    }

    /// Each orbit carries a full system of matrix units.
    pub fn blocks_are_matrix_algebras(&self, o: &OrbitPartition) -> bool {
        o.blocks.iter().all(|b| b.iter().all(|&y| b.iter().all(|&x| self.arrow(y, x).is_some())))
            && self.dim() == o.blocks.iter().map(|b| b.len() * b.len()).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealReport {
    pub points: usize,
    pub orbits: Vec<Vec<usize>>,
    pub arrows: usize,
    pub invariant_sets: usize,
    pub ideals: usize,
    pub blocks_are_matrix_algebras: bool,
    /// `None` when the algebra is too large for the exhaustive check.
    pub associative: Option<bool>,
    pub agrees_with_convolution: Option<bool>,
    /// Number of basis-subset ideals found by exhaustive search, if run.
    pub brute_force_ideals: Option<usize>,
    pub xi_are_ideals: bool,
    pub theta_xi_identity: bool,
    pub theta_bijective: bool,
    pub theta_monotone: bool,
    pub theta_meets: bool,
    /// `(Θ(P), quasi-orbit)` for each prime ideal `P`.
    pub primes: Vec<(u64, usize)>,
    pub primes_match_quasiorbits: bool,
}

impl IdealReport {
    pub fn holds(&self) -> bool {
        self.ideals == self.invariant_sets
            && self.ideals == 1 << self.orbits.len()
            && self.blocks_are_matrix_algebras
            && self.associative != Some(false)
            && self.agrees_with_convolution != Some(false)
            && self.brute_force_ideals.is_none_or(|c| c == self.ideals)
            && self.xi_are_ideals
            && self.theta_xi_identity
            && self.theta_bijective
            && self.theta_monotone
            && self.theta_meets
            && self.primes_match_quasiorbits
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let checks = [
            (self.ideals == self.invariant_sets && self.ideals == 1 << self.orbits.len(), "ideal count"),
            (self.blocks_are_matrix_algebras, "matrix units"),
            (self.associative != Some(false), "associativity"),
            (self.agrees_with_convolution != Some(false), "convolution"),
            (self.brute_force_ideals.is_none_or(|c| c == self.ideals), "exhaustive ideals"),
            (self.xi_are_ideals, "Ξ(U) ideal"),
            (self.theta_xi_identity, "Θ∘Ξ = id"),
            (self.theta_bijective, "Θ bijective"),
            (self.theta_monotone, "Θ monotone"),
            (self.theta_meets, "Θ(I∩J) = Θ(I)∩Θ(J)"),
            (self.primes_match_quasiorbits, "primes"),
        ];
        checks.into_iter().filter(|(ok, _)| !ok).map(|(_, name)| name).collect()
    }
}

fn subset_le(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> bool {
    a.is_subset(b)
}

pub fn ideal_check(pres: &GroupoidPresentation) -> Result<IdealReport> {
    let (o, quasi) = orbits_and_quasiorbits(pres)?;
    let alg = FiniteAlgebra::build(pres)?;
    let lattice = invariant_lattice(pres)?;
    let d = alg.dim();

    // one ideal per set of orbits: the sum of their matrix summands
    let ideals: Vec<BTreeSet<usize>> = (0..1usize << o.len())
        .map(|c| {
            let mask = block_mask(&o, c);
            (0..d).filter(|&i| mask >> alg.arrows[i].1 & 1 == 1).collect()
        })
        .collect();
    let all_ideals = ideals.iter().all(|i| alg.is_ideal(i));
    let distinct: BTreeSet<&BTreeSet<usize>> = ideals.iter().collect();

    let brute_force_ideals = (d <= BRUTE_FORCE_ARROWS).then(|| {
        (0..1u32 << d)
            .filter(|&m| alg.is_ideal(&(0..d).filter(|&i| m >> i & 1 == 1).collect()))
            .count()
    });

    let xi_are_ideals = lattice.sets.iter().all(|&u| alg.is_ideal(&alg.xi(u)));
    let theta_xi_identity = lattice.sets.iter().all(|&u| alg.theta(&alg.xi(u)) == u);
    let thetas: Vec<u64> = ideals.iter().map(|i| alg.theta(i)).collect();
    let images: BTreeSet<u64> = thetas.iter().copied().collect();
    let theta_bijective = all_ideals
        && distinct.len() == ideals.len()
        && images.len() == ideals.len()
        && images.iter().copied().eq(lattice.sets.iter().copied());
    let mut theta_monotone = true;
    let mut theta_meets = true;
    for (a, ia) in ideals.iter().enumerate() {
        for (b, ib) in ideals.iter().enumerate() {
            if subset_le(ia, ib) && thetas[a] & !thetas[b] != 0 {
                theta_monotone = false;
            }
            let meet: BTreeSet<usize> = ia.intersection(ib).copied().collect();
            if alg.theta(&meet) != thetas[a] & thetas[b] {
                theta_meets = false;
            }
        }
    }

    // P is prime if it is proper and IJ ⊆ P forces I ⊆ P or J ⊆ P
    let whole: BTreeSet<usize> = (0..d).collect();
    let mut primes = Vec::new();
    for p in &ideals {
        if *p == whole {
            continue;
        }
        let prime = ideals.iter().all(|i| {
            ideals.iter().all(|j| !subset_le(&alg.ideal_product(i, j), p) || subset_le(i, p) || subset_le(j, p))
        });
        if prime {
            let missing = ((1u64 << o.n) - 1) & !alg.theta(p);
            let q = (0..o.n).find(|&x| missing >> x & 1 == 1).map_or(usize::MAX, |x| quasi[x]);
            primes.push((alg.theta(p), q));
        }
    }
    let primes_match_quasiorbits = primes.len() == o.len()
        && primes.iter().map(|&(_, q)| q).collect::<BTreeSet<_>>().len() == o.len()
        && primes.iter().all(|&(t, q)| {
            let complement = ((1u64 << o.n) - 1) & !t;
            q < o.len() && complement == o.blocks[q].iter().fold(0, |m, &x| m | 1 << x)
        });

    let associative = (o.n * d <= ASSOCIATIVITY_CAP).then(|| alg.check_associative());
    let agrees_with_convolution =
        if d <= CONV_CHECK_ARROWS { Some(alg.check_against_convolution(pres)?) } else { None };

    Ok(IdealReport {
        points: o.n,
        orbits: o.blocks.clone(),
        arrows: d,
        invariant_sets: lattice.len(),
        ideals: distinct.len(),
        blocks_are_matrix_algebras: alg.blocks_are_matrix_algebras(&o),
        associative,
        agrees_with_convolution,
        brute_force_ideals,
        xi_are_ideals,
        theta_xi_identity,
        theta_bijective,
        theta_monotone,
        theta_meets,
        primes,
        primes_match_quasiorbits,
    })
}

/// Set partitions of `0..n` into at most `max_blocks` blocks, in
/// restricted-growth order.
pub fn set_partitions(n: usize, max_blocks: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(x: usize, n: usize, max: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if x == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(x);
            go(x + 1, n, max, cur, out);
            cur[b].pop();
        }
        if cur.len() < max {
            cur.push(vec![x]);
            go(x + 1, n, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, max_blocks, &mut Vec::new(), &mut out);
    out
}

/// Two presentations of the principal groupoid with the given orbits:
/// one generator per edge of a path through each block, and a single
/// generator shifting along all the paths at once.
pub fn principal_presentations(n: usize, blocks: &[Vec<usize>]) -> Result<Vec<GroupoidPresentation>> {
    let space = UnitSpace::finite(n)?;
    let edges: Vec<(usize, usize)> = blocks.iter().flat_map(|b| b.windows(2).map(|w| (w[0], w[1]))).collect();
    let per_edge = edges.iter().map(|&e| Generator::PartialInjection { pairs: vec![e] }).collect();
    let mut out = vec![GroupoidPresentation::new(space, per_edge, IsotropySpec::FreeWords)?];
    if edges.len() > 1 {
        let shift = vec![Generator::PartialInjection { pairs: edges }];
        out.push(GroupoidPresentation::new(space, shift, IsotropySpec::FreeWords)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    pub presentations: usize,
    pub failures: Vec<String>,
}

/// `ideal_check` over every principal presentation produced by
/// [`principal_presentations`] with at most `max_points` points and
/// `max_blocks` orbits.
pub fn sweep(max_points: usize, max_blocks: usize, exec: Exec) -> Result<SweepReport> {
    let mut cases = Vec::new();
    for n in 1..=max_points {
        for blocks in set_partitions(n, max_blocks) {
            for p in principal_presentations(n, &blocks)? {
                cases.push((blocks.clone(), p));
            }
        }
    }
    let results = exec.map(&cases, |(blocks, p)| ideal_check(p).map(|r| (blocks.clone(), r)));
    let mut failures = Vec::new();
    for r in results {
        let (blocks, rep) = r?;
        if !rep.holds() {
            failures.push(format!("{blocks:?}: {}", rep.failures().join(", ")));
        }
    }
    Ok(SweepReport { presentations: cases.len(), failures })
}
