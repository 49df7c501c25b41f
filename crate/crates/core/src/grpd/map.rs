//! Partial homeomorphisms induced by words: partial injections of a finite
//! set, or finite families of prefix replacements `αγ ↦ βγ` on the shift.

use std::collections::BTreeMap;

use crate::stone::{Cell, Clopen, UnitSpace};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PartialMap {
    Points { images: Vec<Option<usize>> },
    /// Pieces `(α, β)`; the α are a prefix antichain, as are the β.
    Prefix { k: u8, pieces: Vec<(Vec<u8>, Vec<u8>)> },
}

impl PartialMap {
    pub fn identity(space: UnitSpace) -> Self {
        match space {
            UnitSpace::Finite(n) => PartialMap::Points { images: (0..n).map(Some).collect() },
            UnitSpace::Shift(k) => PartialMap::Prefix { k, pieces: vec![(Vec::new(), Vec::new())] },
        }
    }

    pub fn space(&self) -> UnitSpace {
        match self {
            PartialMap::Points { images } => UnitSpace::Finite(images.len()),
            PartialMap::Prefix { k, .. } => UnitSpace::Shift(*k),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            PartialMap::Points { images } => images.iter().all(Option::is_none),
            PartialMap::Prefix { pieces, .. } => pieces.is_empty(),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            PartialMap::Points { images } => {
                let mut inv = vec![None; images.len()];
                for (x, y) in images.iter().enumerate() {
                    if let Some(y) = y {
                        inv[*y] = Some(x);
                    }
                }
                PartialMap::Points { images: inv }
            }
            PartialMap::Prefix { k, pieces } => {
                let mut p: Vec<_> = pieces.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
                p.sort();
                PartialMap::Prefix { k: *k, pieces: p }
            }
        }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &PartialMap) -> PartialMap {
        match (self, first) {
            (PartialMap::Points { images: f }, PartialMap::Points { images: g }) => PartialMap::Points {
                images: g.iter().map(|y| y.and_then(|y| f[y])).collect(),
            },
            (PartialMap::Prefix { k, pieces: f }, PartialMap::Prefix { pieces: g, .. }) => {
                let mut out = Vec::new();
                for (a, b) in g {
                    for (c, d) in f {
                        if b.starts_with(c) {
                            let mut r = d.clone();
                            r.extend_from_slice(&b[c.len()..]);
                            out.push((a.clone(), r));
                        } else if c.starts_with(b) {
                            let mut s = a.clone();
                            s.extend_from_slice(&c[b.len()..]);
                            out.push((s, d.clone()));
                        }
                    }
                }
                PartialMap::Prefix { k: *k, pieces: normalize(*k, out) }
            }
            _ => panic!("composing partial maps over different spaces"),
        }
    }

    pub fn domain(&self) -> Clopen {
        match self {
            PartialMap::Points { images } => Clopen::from_points(
                self.space(),
                images.iter().enumerate().filter(|(_, y)| y.is_some()).map(|(x, _)| x).collect(),
            ),
            PartialMap::Prefix { pieces, .. } => {
                Clopen::from_words(self.space(), pieces.iter().map(|(a, _)| a.clone()).collect())
            }
        }
    }

    pub fn range(&self) -> Clopen {
        self.inverse().domain()
    }

    /// Image of `set ∩ domain`.
    pub fn image(&self, set: &Clopen) -> Clopen {
        match self {
            PartialMap::Points { images } => Clopen::from_points(
                self.space(),
                set.point_list().iter().filter_map(|&x| images.get(x).copied().flatten()).collect(),
            ),
            PartialMap::Prefix { pieces, .. } => {
                let mut out = Vec::new();
                for w in set.word_list() {
                    for (a, b) in pieces {
                        if w.starts_with(a) {
                            let mut r = b.clone();
                            r.extend_from_slice(&w[a.len()..]);
                            out.push(r);
                        } else if a.starts_with(w) {
                            out.push(b.clone());
                        }
                    }
                }
                Clopen::from_words(self.space(), out)
            }
        }
    }

    /// Preimage of `set ∩ range`.
    pub fn preimage(&self, set: &Clopen) -> Clopen {
        self.inverse().image(set)
    }

    /// Image of a single point, for finite spaces.
    pub fn point(&self, x: usize) -> Option<usize> {
        match self {
            PartialMap::Points { images } => images.get(x).copied().flatten(),
            PartialMap::Prefix { .. } => None,
        }
    }

    pub fn image_cell(&self, cell: &Cell) -> Clopen {
        self.image(&Clopen::from_cells_unchecked(self.space(), vec![cell.clone()]))
    }
}

/// Merges sibling pieces `(αi, βi)` for all `i` into `(α, β)` until none
/// remain, so equal maps have equal piece lists.
pub(crate) fn normalize(k: u8, mut pieces: Vec<(Vec<u8>, Vec<u8>)>) -> Vec<(Vec<u8>, Vec<u8>)> {
    loop {
        pieces.sort();
        pieces.dedup();
        let mut groups: BTreeMap<(&[u8], &[u8]), usize> = BTreeMap::new();
        for (a, b) in &pieces {
            if let (Some(x), Some(y)) = (a.last(), b.last()) {
                if x == y {
                    *groups.entry((&a[..a.len() - 1], &b[..b.len() - 1])).or_default() += 1;
                }
            }
        }
        let Some(((pa, pb), _)) = groups.into_iter().find(|&(_, c)| c == k as usize) else {
            return pieces;
        };
        let (pa, pb) = (pa.to_vec(), pb.to_vec());
        pieces.retain(|(a, b)| {
            !(a.len() == pa.len() + 1
                && b.len() == pb.len() + 1
                && a.starts_with(&pa)
                && b.starts_with(&pb)
                && a.last() == b.last())
        });
        pieces.push((pa, pb));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_composition_cases() {
        // γ ↦ 1γ composed with itself is γ ↦ 11γ
        let g1 = PartialMap::Prefix { k: 2, pieces: vec![(vec![], vec![1])] };
        let gg = g1.after(&g1);
        assert_eq!(gg, PartialMap::Prefix { k: 2, pieces: vec![(vec![], vec![1, 1])] });
        // strip a leading 1 after prepending 2: empty
        let strip1 = g1.inverse();
        let g2 = PartialMap::Prefix { k: 2, pieces: vec![(vec![], vec![2])] };
        assert!(strip1.after(&g2).is_empty());
        assert_eq!(strip1.after(&g1), PartialMap::identity(UnitSpace::Shift(2)));
        let split = PartialMap::Prefix { k: 2, pieces: vec![(vec![1], vec![1]), (vec![2], vec![2])] };
        assert_eq!(split.after(&PartialMap::identity(UnitSpace::Shift(2))), PartialMap::identity(UnitSpace::Shift(2)));
    }

    #[test]
    fn image_of_shallow_and_deep_cells() {
        let m = PartialMap::Prefix { k: 2, pieces: vec![(vec![1], vec![2, 2])] };
        let s = UnitSpace::Shift(2);
        assert_eq!(m.image(&Clopen::whole(s)), Clopen::cylinders(s, &["22"]).unwrap());
        assert_eq!(m.image(&Clopen::cylinders(s, &["12"]).unwrap()), Clopen::cylinders(s, &["222"]).unwrap());
        assert_eq!(m.preimage(&Clopen::cylinders(s, &["221"]).unwrap()), Clopen::cylinders(s, &["11"]).unwrap());
    }
}
