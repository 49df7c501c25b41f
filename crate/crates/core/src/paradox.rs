//! `(k, l)`-paradoxical decompositions of a clopen set.

use crate::error::{Error, Result};
use crate::grpd::{Bisection, GroupoidPresentation};
use crate::search::{search_leq, SearchOutcome, SearchParams};
use crate::stone::Clopen;
use crate::typesg::{verify_leq, Check, EquivCertificate, LabeledFamily, LeqCertificate, Triple};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RowEntry {
    pub bisection: Bisection,
    /// Target copy of `A`, in `1..=l`.
    pub m: usize,
}

/// Row `i` holds the bisections `V_{i,j}` with their labels `m_{i,j}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParadoxWitness {
    pub a: Clopen,
    pub k: usize,
    pub l: usize,
    pub rows: Vec<Vec<RowEntry>>,
}

/// Checks both conditions of a paradoxical decomposition; the error names
/// the first violated one.
pub fn verify_witness(pres: &GroupoidPresentation, w: &ParadoxWitness) -> Check {
    if w.l == 0 || w.k <= w.l {
        return Err(format!("parameters: need k > l >= 1, got k = {}, l = {}", w.k, w.l));
    }
    if w.a.space() != pres.space() {
        return Err("A does not live on the presentation's unit space".into());
    }
    if w.rows.len() != w.k {
        return Err(format!("expected {} rows, found {}", w.k, w.rows.len()));
    }
    let mut used: Vec<Clopen> = vec![Clopen::empty(pres.space()); w.l];
    for (i, row) in w.rows.iter().enumerate() {
        let mut cover = Clopen::empty(pres.space());
        for (j, e) in row.iter().enumerate() {
            pres.validate(&e.bisection).map_err(|err| format!("row {}, entry {}: {err}", i + 1, j + 1))?;
            if e.m == 0 || e.m > w.l {
                return Err(format!("row {}, entry {}: label {} outside 1..{}", i + 1, j + 1, e.m, w.l));
            }
            cover = cover.union(&e.bisection.dom()).map_err(|err| err.to_string())?;
            let r = pres.ran(&e.bisection);
            if !r.is_subset(&w.a).map_err(|err| err.to_string())? {
                return Err(format!(
                    "condition (2): range {r} of row {}, entry {} is not inside A = {}",
                    i + 1,
                    j + 1,
                    w.a
                ));
            }
            let slot = &mut used[e.m - 1];
            if !slot.is_disjoint(&r).map_err(|err| err.to_string())? {
                return Err(format!(
                    "condition (2): range of row {}, entry {} overlaps an earlier range in copy {}",
                    i + 1,
                    j + 1,
                    e.m
                ));
            }
            *slot = slot.union(&r).map_err(|err| err.to_string())?;
        }
        if cover != w.a {
            return Err(format!("condition (1): row {} domains cover {cover}, expected A = {}", i + 1, w.a));
        }
    }
    Ok(())
}

fn require(pres: &GroupoidPresentation, w: &ParadoxWitness) -> Result<()> {
    verify_witness(pres, w).map_err(Error::Unverified)
}

/// The witness `{U_{α1,α} → 1}, {U_{α2,α} → 1}` of a Cuntz presentation.
pub fn cuntz_witness(pres: &GroupoidPresentation, alpha: &[u8]) -> Result<ParadoxWitness> {
    let a = Clopen::from_words(pres.space(), vec![alpha.to_vec()]);
    let rows = (1..=2u8)
        .map(|i| {
            let mut beta = alpha.to_vec();
            beta.push(i);
            let word = pres.cuntz_word(&beta, alpha);
            let bisection =
                pres.bisection(vec![crate::grpd::ArrowPiece { word, domain: a.clone() }])?;
            Ok(vec![RowEntry { bisection, m: 1 }])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParadoxWitness { a, k: 2, l: 1, rows })
}

/// Makes the domains within each row pairwise disjoint by removing from
/// each entry the domains of the earlier entries of its row.
pub fn disjointify(pres: &GroupoidPresentation, w: &ParadoxWitness) -> Result<ParadoxWitness> {
    let mut rows = Vec::with_capacity(w.rows.len());
    for row in &w.rows {
        let mut seen = Clopen::empty(pres.space());
        let mut out = Vec::new();
        for e in row {
            let fresh = e.bisection.dom().difference(&seen)?;
            seen = seen.union(&fresh)?;
            let b = pres.restrict(&e.bisection, &fresh)?;
            if !b.is_empty() {
                out.push(RowEntry { bisection: b, m: e.m });
            }
        }
        rows.push(out);
    }
    Ok(ParadoxWitness { rows, ..w.clone() })
}

/// `k[A] ≤ l[A]`: the rows move the `k` copies onto `⊔_p A_p × {p}` with
/// `A_p` the union of the ranges labeled `p`; the remainder is
/// `⊔_p (A ∖ A_p) × {p}`.
pub fn witness_to_leq(pres: &GroupoidPresentation, w: &ParadoxWitness) -> Result<LeqCertificate> {
    require(pres, w)?;
    let w = disjointify(pres, w)?;
    let mut hit = vec![Clopen::empty(pres.space()); w.l];
    let mut triples = Vec::new();
    for (i, row) in w.rows.iter().enumerate() {
        for e in row {
            hit[e.m - 1] = hit[e.m - 1].union(&pres.ran(&e.bisection))?;
            triples.push(Triple { bisection: e.bisection.clone(), n: i + 1, m: e.m });
        }
    }
    let rest: Vec<Clopen> = hit.iter().map(|h| w.a.difference(h)).collect::<Result<_>>()?;
    let (remainder, labels) = LabeledFamily::indexed(pres.space(), &rest)?;
    let k = LabeledFamily::multiple(&w.a, w.k).len();
    for (p, (part, label)) in rest.iter().zip(labels).enumerate() {
        if let Some(label) = label {
            triples.push(Triple { bisection: Bisection::identity_on(part), n: k + label, m: p + 1 });
        }
    }
    Ok(LeqCertificate { remainder, equivalence: EquivCertificate { triples } })
}

/// Reads a witness off a certificate of `k[A] ≤ l[A]`: row `i` consists of
/// the triples leaving copy `i`.
pub fn leq_to_witness(
    pres: &GroupoidPresentation,
    a: &Clopen,
    k: usize,
    l: usize,
    cert: &LeqCertificate,
) -> Result<ParadoxWitness> {
    if l == 0 || k <= l {
        return Err(Error::Precondition(format!("need k > l >= 1, got k = {k}, l = {l}")));
    }
    let lhs = LabeledFamily::multiple(a, k);
    let rhs = LabeledFamily::multiple(a, l);
    verify_leq(pres, &lhs, &rhs, cert).map_err(Error::Unverified)?;
    let mut rows = vec![Vec::new(); k];
    if !a.is_empty() {
        for t in &cert.equivalence.triples {
            if t.n <= k && !t.bisection.is_empty() {
                rows[t.n - 1].push(RowEntry { bisection: t.bisection.clone(), m: t.m });
            }
        }
    }
    let w = ParadoxWitness { a: a.clone(), k, l, rows };
    require(pres, &w)?;
    Ok(w)
}

/// `(K, l) → (2K − l, l)`: copies `K+1..2K−l` are parked on copies
/// `l+1..K` and everything is pushed through the witness a second time.
fn double(pres: &GroupoidPresentation, w: &ParadoxWitness) -> Result<ParadoxWitness> {
    let mut rows = Vec::with_capacity(2 * w.k - w.l);
    let through = |b: &Bisection, p: usize, out: &mut Vec<RowEntry>| -> Result<()> {
        let r = pres.ran(b);
        for e in &w.rows[p - 1] {
            let c = r.intersect(&e.bisection.dom())?;
            if c.is_empty() {
                continue;
            }
            let first = pres.corestrict(b, &c)?;
            let second = pres.restrict(&e.bisection, &c)?;
            out.push(RowEntry { bisection: pres.compose(&second, &first)?, m: e.m });
        }
        Ok(())
    };
    for row in &w.rows {
        let mut out = Vec::new();
        for e in row {
            through(&e.bisection, e.m, &mut out)?;
        }
        rows.push(out);
    }
    for p in w.l + 1..=w.k {
        let mut out = Vec::new();
        through(&Bisection::identity_on(&w.a), p, &mut out)?;
        rows.push(out);
    }
    Ok(ParadoxWitness { a: w.a.clone(), k: 2 * w.k - w.l, l: w.l, rows })
}

/// A `(k', l')` witness from a `(k, l)` one, for any `k' > l' ≥ l`.
pub fn weaken(pres: &GroupoidPresentation, w: &ParadoxWitness, k2: usize, l2: usize) -> Result<ParadoxWitness> {
    require(pres, w)?;
    if k2 <= l2 || l2 < w.l {
        return Err(Error::Precondition(format!(
            "cannot pass from ({}, {}) to ({k2}, {l2}): need k' > l' >= l",
            w.k, w.l
        )));
    }
    let mut cur = disjointify(pres, w)?;
    while cur.k < k2 {
        cur = double(pres, &cur)?;
    }
    cur.rows.truncate(k2);
    cur.k = k2;
    cur.l = l2;
    require(pres, &cur)?;
    Ok(cur)
}

/// The pair `S_1 = ⊔_j V_{1,j}`, `S_2 = ⊔_j V_{2,j}` of a `(2, 1)` witness
/// with disjoint rows: both have domain `A` and their ranges are disjoint.
pub fn merge_to_pseudopair(pres: &GroupoidPresentation, w: &ParadoxWitness) -> Result<(Bisection, Bisection)> {
    require(pres, w)?;
    if (w.k, w.l) != (2, 1) {
        return Err(Error::Precondition(format!("need a (2, 1) witness, got ({}, {})", w.k, w.l)));
    }
    let mut out = Vec::with_capacity(2);
    for (i, row) in w.rows.iter().enumerate() {
        let mut s = Bisection::empty(pres.space());
        for e in row {
            if !s.dom().is_disjoint(&e.bisection.dom())? {
                return Err(Error::Precondition(format!("row {} has overlapping domains; disjointify first", i + 1)));
            }
            s = pres.union(&s, &e.bisection)?;
        }
        out.push(s);
    }
    let s2 = out.pop().expect("two rows");
    let s1 = out.pop().expect("two rows");
    Ok((s1, s2))
}

/// Bounded search for a `(k, l)` witness on `A`.
pub fn search_witness(
    pres: &GroupoidPresentation,
    a: &Clopen,
    k: usize,
    l: usize,
    params: SearchParams,
) -> Result<SearchOutcome<ParadoxWitness>> {
    if l == 0 || k <= l {
        return Err(Error::Precondition(format!("need k > l >= 1, got k = {k}, l = {l}")));
    }
    let lhs = LabeledFamily::multiple(a, k);
    let rhs = LabeledFamily::multiple(a, l);
    match search_leq(pres, &lhs, &rhs, params)? {
        SearchOutcome::Found(cert) => Ok(SearchOutcome::Found(leq_to_witness(pres, a, k, l, &cert)?)),
        SearchOutcome::NotFound { budget_hit } => Ok(SearchOutcome::NotFound { budget_hit }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::Exec;

    fn cyl(p: &GroupoidPresentation, w: &[&str]) -> Clopen {
        Clopen::cylinders(p.space(), w).unwrap()
    }

    #[test]
    fn cuntz_witnesses_verify() {
        let c2 = GroupoidPresentation::cuntz(2).unwrap();
        let w = cuntz_witness(&c2, &[]).unwrap();
        assert_eq!(verify_witness(&c2, &w), Ok(()));
        let c3 = GroupoidPresentation::cuntz(3).unwrap();
        let w3 = cuntz_witness(&c3, &[2]).unwrap();
        assert_eq!(w3.a, cyl(&c3, &["2"]));
        assert_eq!(verify_witness(&c3, &w3), Ok(()));
        let mut bad = w.clone();
        bad.rows[1] = bad.rows[0].clone();
        assert!(verify_witness(&c2, &bad).unwrap_err().starts_with("condition (2)"));
        let mut short = w.clone();
        short.rows[1][0].bisection = c2.restrict(&short.rows[1][0].bisection, &cyl(&c2, &["1"])).unwrap();
        assert!(verify_witness(&c2, &short).unwrap_err().starts_with("condition (1)"));
    }

    #[test]
    fn leq_round_trip() {
        let c = GroupoidPresentation::cuntz(2).unwrap();
        let x = Clopen::whole(c.space());
        let w = cuntz_witness(&c, &[]).unwrap();
        let cert = witness_to_leq(&c, &w).unwrap();
        assert!(cert.remainder.is_empty());
        let back = leq_to_witness(&c, &x, 2, 1, &cert).unwrap();
        assert_eq!(verify_witness(&c, &back), Ok(()));
        assert!(leq_to_witness(&c, &x, 1, 1, &cert).is_err());
        let deep = ParadoxWitness {
            a: x.clone(),
            k: 2,
            l: 1,
            rows: vec![
                vec![RowEntry { bisection: c.cuntz_bisection("11", "").unwrap(), m: 1 }],
                vec![RowEntry { bisection: c.cuntz_bisection("12", "").unwrap(), m: 1 }],
            ],
        };
        let cert = witness_to_leq(&c, &deep).unwrap();
        assert_eq!(cert.remainder, LabeledFamily::single(&cyl(&c, &["2"])));
    }

    #[test]
    fn weakening_and_merging() {
        let c = GroupoidPresentation::cuntz(2).unwrap();
        let w = cuntz_witness(&c, &[]).unwrap();
        let w32 = weaken(&c, &w, 3, 2).unwrap();
        assert_eq!((w32.k, w32.l), (3, 2));
        let w51 = weaken(&c, &w, 5, 1).unwrap();
        assert_eq!(verify_witness(&c, &w51), Ok(()));
        assert!(weaken(&c, &w32, 2, 1).is_err());
        assert_eq!(disjointify(&c, &w).unwrap(), w);
        let (s1, s2) = merge_to_pseudopair(&c, &w).unwrap();
        assert_eq!(s1, c.generator_bisection(0).unwrap());
        assert_eq!(s2, c.generator_bisection(1).unwrap());
    }

    #[test]
    fn overlapping_rows_are_disjointified() {
        let c = GroupoidPresentation::cuntz(2).unwrap();
        let mut w = cuntz_witness(&c, &[]).unwrap();
        // a redundant entry whose domain overlaps the first one
        let extra = c.restrict(&w.rows[0][0].bisection, &cyl(&c, &["1"])).unwrap();
        w.rows[0].push(RowEntry { bisection: extra, m: 1 });
        assert!(verify_witness(&c, &w).is_err());
        let mut w = cuntz_witness(&c, &[]).unwrap();
        let first = c.restrict(&w.rows[0][0].bisection, &cyl(&c, &["1"])).unwrap();
        w.rows[0].insert(0, RowEntry { bisection: first, m: 1 });
        let d = disjointify(&c, &w).unwrap();
        assert_eq!(d.rows[0][1].bisection.dom(), cyl(&c, &["2"]));
    }

    #[test]
    fn searches() {
        let c = GroupoidPresentation::cuntz(2).unwrap();
        let x = Clopen::whole(c.space());
        let p = SearchParams::new(1).exec(Exec::Sequential);
        let w = search_witness(&c, &x, 2, 1, p).unwrap().found().unwrap();
        assert_eq!(verify_witness(&c, &w), Ok(()));
        let a = cyl(&c, &["12"]);
        assert!(search_witness(&c, &a, 2, 1, SearchParams::new(3)).unwrap().is_found());
        let odo = GroupoidPresentation::odometer(3).unwrap();
        let out = search_witness(&odo, &Clopen::whole(odo.space()), 2, 1, SearchParams::new(3)).unwrap();
        assert!(!out.is_found());
    }
}
