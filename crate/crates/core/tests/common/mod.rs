#![allow(dead_code)]

use ample_core::grpd::{GroupoidPresentation, Word};
use ample_core::lp::{rat, Rational};
use ample_core::par::Exec;
use ample_core::starconv::{ConvAlgebra, ConvElement};
use ample_core::stone::{Cell, Clopen, UnitSpace};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn words(pres: &GroupoidPresentation, depth: usize) -> Vec<Word> {
    pres.enumerate_words(depth, 100_000, Exec::Sequential).0.into_iter().map(|(w, _)| w).collect()
}

/// A random, possibly empty, union of cells of depth at most `max_depth`.
pub fn clopen(space: UnitSpace, max_depth: usize, rng: &mut impl Rng) -> Clopen {
    let d = if space.is_finite() { 0 } else { rng.gen_range(0..=max_depth) };
    let cells: Vec<Cell> = space.cells_at_depth(d).into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    Clopen::canonicalize(space, cells).unwrap()
}

pub fn nonempty_clopen(space: UnitSpace, max_depth: usize, rng: &mut impl Rng) -> Clopen {
    loop {
        let c = clopen(space, max_depth, rng);
        if !c.is_empty() {
            return c;
        }
    }
}

/// A random cell inside `set`, at least as deep as the cells of `set`.
pub fn cell_in(set: &Clopen, extra: usize, rng: &mut impl Rng) -> Cell {
    let d = if set.space().is_finite() { 0 } else { set.max_depth() + rng.gen_range(0..=extra) };
    set.expand_to_depth(d).unwrap().choose(rng).unwrap().clone()
}

pub fn coefficient(rng: &mut impl Rng) -> Rational {
    let v = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        rat(v)
    } else {
        rat(-v)
    }
}

/// A random combination of up to `terms` arrow indicators.
pub fn element(pres: &GroupoidPresentation, words: &[Word], terms: usize, extra: usize, rng: &mut impl Rng) -> ConvElement {
    let alg = ConvAlgebra::new(pres);
    let n = rng.gen_range(0..=terms);
    let mut out = Vec::new();
    for _ in 0..n {
        let w = words.choose(rng).unwrap();
        let dom = pres.word_map(w).domain();
        if dom.is_empty() {
            continue;
        }
        out.push((w.clone(), cell_in(&dom, extra, rng), coefficient(rng)));
    }
    alg.element(out).unwrap()
}
