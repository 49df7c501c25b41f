//! The type semigroup: labeled clopen families, certificates of `∼` and of
//! the algebraic preorder, and the map `ρ` from integer-valued functions.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::grpd::{Bisection, GroupoidPresentation};
use crate::stone::{common_refinement, Cell, Clopen, LocallyConstant, UnitSpace};

/// `⋃ A_i × {i}` in canonical form: entry `i` carries label `i + 1`, all
/// entries are nonempty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledFamily {
    space: UnitSpace,
    entries: Vec<Clopen>,
}

/// A nonnegative integer-valued locally constant function.
pub type IntFunction = LocallyConstant<u64>;

impl LabeledFamily {
    pub fn empty(space: UnitSpace) -> Self {
        LabeledFamily { space, entries: Vec::new() }
    }

    /// Canonical form of arbitrary `(clopen, label)` entries: equal labels
    /// merge, empty entries drop, labels compress to `1..m` in label order.
    pub fn normalize(space: UnitSpace, entries: Vec<(Clopen, usize)>) -> Result<Self> {
        let mut by_label: BTreeMap<usize, Clopen> = BTreeMap::new();
        for (c, label) in entries {
            if c.space() != space {
                return Err(Error::SpaceMismatch(space, c.space()));
            }
            let slot = by_label.entry(label).or_insert_with(|| Clopen::empty(space));
            *slot = slot.union(&c)?;
        }
        Ok(LabeledFamily { space, entries: by_label.into_values().filter(|c| !c.is_empty()).collect() })
    }

    /// The family with entry `i` labeled `i + 1`, together with the new label
    /// (if any) of every input position.
    pub fn indexed(space: UnitSpace, sets: &[Clopen]) -> Result<(Self, Vec<Option<usize>>)> {
        let mut labels = Vec::with_capacity(sets.len());
        let mut entries = Vec::new();
        for c in sets {
            if c.space() != space {
                return Err(Error::SpaceMismatch(space, c.space()));
            }
            if c.is_empty() {
                labels.push(None);
            } else {
                entries.push(c.clone());
                labels.push(Some(entries.len()));
            }
        }
        Ok((LabeledFamily { space, entries }, labels))
    }

    /// `[A]`.
    pub fn single(a: &Clopen) -> Self {
        Self::multiple(a, 1)
    }

    /// `k[A] = [A × {1..k}]`.
    pub fn multiple(a: &Clopen, k: usize) -> Self {
        let entries = if a.is_empty() { Vec::new() } else { vec![a.clone(); k] };
        LabeledFamily { space: a.space(), entries }
    }

    pub fn space(&self) -> UnitSpace {
        self.space
    }

    pub fn entries(&self) -> &[Clopen] {
        &self.entries
    }

    /// Clopen carrying `label` (1-based), empty when absent.
    pub fn entry(&self, label: usize) -> Clopen {
        label
            .checked_sub(1)
            .and_then(|i| self.entries.get(i).cloned())
            .unwrap_or_else(|| Clopen::empty(self.space))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.entries.iter().map(Clopen::max_depth).max().unwrap_or(0)
    }

    /// Labels of `other` shifted past this family's labels.
    pub fn add(&self, other: &LabeledFamily) -> Result<LabeledFamily> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(self.space, other.space));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(LabeledFamily { space: self.space, entries })
    }

    /// The function `Σ 1_{A_i}`.
    pub fn to_function(&self) -> IntFunction {
        LocallyConstant::from_sum(self.space, self.entries.iter().map(|c| (c.clone(), 1))).expect("one space")
    }
}

impl fmt::Display for LabeledFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().enumerate().map(|(i, c)| format!("{c}×{{{}}}", i + 1)).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub bisection: Bisection,
    pub n: usize,
    pub m: usize,
}

/// Bisections `W_k` with labels `(n_k, m_k)` such that the `d(W_k)×{n_k}`
/// tile the left family and the `r(W_k)×{m_k}` tile the right one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EquivCertificate {
    pub triples: Vec<Triple>,
}

/// Witness of `x ≤ y`: a remainder `z` and a certificate of `x + z ∼ y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LeqCertificate {
    pub remainder: LabeledFamily,
    pub equivalence: EquivCertificate,
}

/// Outcome of a verification; `Err` carries the first failure.
pub type Check = std::result::Result<(), String>;

fn tiles(
    pres: &GroupoidPresentation,
    family: &LabeledFamily,
    parts: &[(usize, Clopen)],
    side: &str,
) -> Check {
    let mut by_label: BTreeMap<usize, Vec<&Clopen>> = BTreeMap::new();
    for (label, c) in parts {
        if *label == 0 || *label > family.len() {
            return Err(format!("{side} label {label} is outside 1..{}", family.len()));
        }
        by_label.entry(*label).or_default().push(c);
    }
    for label in 1..=family.len() {
        let pieces = by_label.remove(&label).unwrap_or_default();
        let mut acc = Clopen::empty(pres.space());
        for c in pieces {
            if !acc.is_disjoint(c).map_err(|e| e.to_string())? {
                return Err(format!("{side} pieces with label {label} overlap"));
            }
            acc = acc.union(c).map_err(|e| e.to_string())?;
        }
        if acc != family.entry(label) {
            return Err(format!(
                "{side} pieces with label {label} cover {acc}, expected {}",
                family.entry(label)
            ));
        }
    }
    Ok(())
}

/// Checks `cert` against `F1 ∼ F2` exactly.
pub fn verify_equiv(pres: &GroupoidPresentation, f1: &LabeledFamily, f2: &LabeledFamily, cert: &EquivCertificate) -> Check {
    if f1.space() != pres.space() || f2.space() != pres.space() {
        return Err("families do not live on the presentation's unit space".into());
    }
    let mut doms = Vec::with_capacity(cert.triples.len());
    let mut rans = Vec::with_capacity(cert.triples.len());
    for (i, t) in cert.triples.iter().enumerate() {
        pres.validate(&t.bisection).map_err(|e| format!("triple {}: {e}", i + 1))?;
        doms.push((t.n, t.bisection.dom()));
        rans.push((t.m, pres.ran(&t.bisection)));
    }
    tiles(pres, f1, &doms, "domain")?;
    tiles(pres, f2, &rans, "range")
}

pub fn verify_leq(pres: &GroupoidPresentation, f1: &LabeledFamily, f2: &LabeledFamily, cert: &LeqCertificate) -> Check {
    let lhs = f1.add(&cert.remainder).map_err(|e| e.to_string())?;
    verify_equiv(pres, &lhs, f2, &cert.equivalence)
}

pub fn reflexive(f: &LabeledFamily) -> EquivCertificate {
    let triples = f
        .entries()
        .iter()
        .enumerate()
        .map(|(i, c)| Triple { bisection: Bisection::identity_on(c), n: i + 1, m: i + 1 })
        .collect();
    EquivCertificate { triples }
}

pub fn symmetric(pres: &GroupoidPresentation, cert: &EquivCertificate) -> Result<EquivCertificate> {
    let triples = cert
        .triples
        .iter()
        .map(|t| Ok(Triple { bisection: pres.inverse(&t.bisection)?, n: t.m, m: t.n }))
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivCertificate { triples })
}

/// From `F1 ∼ F2` and `F2 ∼ F3`, certificate of `F1 ∼ F3`: each pair of
/// triples meeting in the middle family contributes the composite on the
/// overlap `r(W) ∩ d(V)`.
pub fn transitive(
    pres: &GroupoidPresentation,
    families: [&LabeledFamily; 3],
    c1: &EquivCertificate,
    c2: &EquivCertificate,
) -> Result<EquivCertificate> {
    let [f1, f2, f3] = families;
    verify_equiv(pres, f1, f2, c1).map_err(|e| Error::Unverified(format!("first certificate: {e}")))?;
    verify_equiv(pres, f2, f3, c2).map_err(|e| Error::Unverified(format!("second certificate: {e}")))?;
    let mut triples = Vec::new();
    for w in &c1.triples {
        let rw = pres.ran(&w.bisection);
        for v in c2.triples.iter().filter(|v| v.n == w.m) {
            let c = rw.intersect(&v.bisection.dom())?;
            if c.is_empty() {
                continue;
            }
            let first = pres.corestrict(&w.bisection, &c)?;
            let second = pres.restrict(&v.bisection, &c)?;
            triples.push(Triple { bisection: pres.compose(&second, &first)?, n: w.n, m: v.m });
        }
    }
    Ok(EquivCertificate { triples })
}

/// From `F1 ∼ F2` and `G1 ∼ G2`, certificate of `F1 + G1 ∼ F2 + G2`.
pub fn sum(left: (&LabeledFamily, &LabeledFamily), c1: &EquivCertificate, c2: &EquivCertificate) -> EquivCertificate {
    let (dn, dm) = (left.0.len(), left.1.len());
    let mut triples = c1.triples.clone();
    triples.extend(c2.triples.iter().map(|t| Triple { bisection: t.bisection.clone(), n: t.n + dn, m: t.m + dm }));
    EquivCertificate { triples }
}

/// `[A] ≤ [B]` for `A ⊆ B`, with remainder `[B ∖ A]`.
pub fn subset_cert(a: &Clopen, b: &Clopen) -> Result<LeqCertificate> {
    if !a.is_subset(b)? {
        return Err(Error::NotSubset(format!("{a} is not inside {b}")));
    }
    let rest = b.difference(a)?;
    let remainder = LabeledFamily::single(&rest);
    let mut triples = Vec::new();
    let mut n = 0;
    for part in [a, &rest] {
        if !part.is_empty() {
            n += 1;
            triples.push(Triple { bisection: Bisection::identity_on(part), n, m: 1 });
        }
    }
    Ok(LeqCertificate { remainder, equivalence: EquivCertificate { triples } })
}

/// `ρ(Σ 1_{A_i}) = [⋃ A_i × {i}]`.
pub fn rho_decomposition(space: UnitSpace, sets: &[Clopen]) -> Result<LabeledFamily> {
    Ok(LabeledFamily::indexed(space, sets)?.0)
}

/// `ρ(f)` computed from the level sets of `f`.
pub fn rho(f: &IntFunction) -> LabeledFamily {
    LabeledFamily::indexed(f.space(), &f.level_sets()).expect("one space").0
}

fn decomposition_sum(space: UnitSpace, sets: &[Clopen]) -> Result<IntFunction> {
    LocallyConstant::from_sum(space, sets.iter().map(|c| (c.clone(), 1u64)))
}

/// Certificate of `ρ(Σ 1_{A_i}) ∼ ρ(Σ 1_{B_j})` for two decompositions of
/// the same function: on each refinement cell `C` the `t`-th set `A_i ⊇ C`
/// is matched with the `t`-th set `B_j ⊇ C` by the identity on `C`.
pub fn rho_welldef_cert(space: UnitSpace, a: &[Clopen], b: &[Clopen]) -> Result<EquivCertificate> {
    if decomposition_sum(space, a)? != decomposition_sum(space, b)? {
        return Err(Error::Precondition("decompositions sum to different functions".into()));
    }
    let (_, la) = LabeledFamily::indexed(space, a)?;
    let (_, lb) = LabeledFamily::indexed(space, b)?;
    let refinement = common_refinement(&[a.to_vec(), b.to_vec()])?;
    let mut blocks: BTreeMap<(usize, usize), Vec<Cell>> = BTreeMap::new();
    for cell in &refinement.cells {
        let over = |assign: &[Vec<Cell>], labels: &[Option<usize>]| -> Vec<usize> {
            assign
                .iter()
                .zip(labels)
                .filter(|(cells, _)| cells.contains(cell))
                .filter_map(|(_, l)| *l)
                .collect()
        };
        let ia = over(&refinement.assignment[0], &la);
        let ib = over(&refinement.assignment[1], &lb);
        debug_assert_eq!(ia.len(), ib.len());
        for (n, m) in ia.into_iter().zip(ib) {
            blocks.entry((n, m)).or_default().push(cell.clone());
        }
    }
    let triples = blocks
        .into_iter()
        .map(|((n, m), cells)| {
            let c = Clopen::canonicalize(space, cells)?;
            Ok(Triple { bisection: Bisection::identity_on(&c), n, m })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivCertificate { triples })
}

/// `ρ(f + g) ∼ ρ(f) + ρ(g)` for level-set `ρ`.
pub fn rho_additivity_cert(f: &IntFunction, g: &IntFunction) -> Result<(LabeledFamily, LabeledFamily, EquivCertificate)> {
    let space = f.space();
    let fg = f.add(g)?;
    let lhs = rho(&fg);
    let rhs = rho(f).add(&rho(g))?;
    let mut parts = f.level_sets();
    parts.extend(g.level_sets());
    let cert = rho_welldef_cert(space, &fg.level_sets(), &parts)?;
    Ok((lhs, rhs, cert))
}

/// For `f = Σ 1_{A_i}` with every `A_i ⊆ r(S)`, the families `ρ(f)`,
/// `ρ(f ∘ α_S)` and a certificate of `ρ(f) ∼ ρ(f ∘ α_S)` made of the
/// inverses of the range restrictions `S_i` of `S` to `A_i`.
pub fn rho_invariance_cert(
    pres: &GroupoidPresentation,
    s: &Bisection,
    sets: &[Clopen],
) -> Result<(LabeledFamily, LabeledFamily, EquivCertificate)> {
    let range = pres.ran(s);
    let mut pulled = Vec::with_capacity(sets.len());
    let mut pieces = Vec::with_capacity(sets.len());
    for a in sets {
        if !a.is_subset(&range)? {
            return Err(Error::NotSubset(format!("{a} is not inside r(S) = {range}")));
        }
        let si = pres.corestrict(s, a)?;
        pulled.push(si.dom());
        pieces.push(si);
    }
    let (f, labels) = LabeledFamily::indexed(pres.space(), sets)?;
    let (g, _) = LabeledFamily::indexed(pres.space(), &pulled)?;
    let triples = pieces
        .into_iter()
        .zip(labels)
        .filter_map(|(si, l)| l.map(|l| (si, l)))
        .map(|(si, l)| Ok(Triple { bisection: pres.inverse(&si)?, n: l, m: l }))
        .collect::<Result<Vec<_>>>()?;
    Ok((f, g, EquivCertificate { triples }))
}
