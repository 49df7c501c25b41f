//! JSON documents for presentations, certificates, states and elements.
//!
//! Cells of a shift space are digit strings (`""` for the whole space);
//! cells of a finite space are point numbers. Words are lists of
//! `[generator, ±1]` pairs read left to right, so the rightmost letter acts
//! first. Rationals are `{"num": "...", "den": "..."}` with decimal strings.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grpd::{
    ArrowPiece, Bisection, Generator, GroupAction, GroupoidPresentation, Isotropy, IsotropySpec, Letter, Word,
};
use crate::lp::{Rational, Row};
use crate::paradox::{ParadoxWitness, RowEntry};
use crate::starconv::{ConvAlgebra, ConvElement};
use crate::states::{build_constraints, FarkasCertificate, StateVector};
use crate::stone::{parse_word, word_string, Cell, Clopen, UnitSpace};
use crate::typesg::{EquivCertificate, LabeledFamily, LeqCertificate, Triple};

pub const WITNESS_SCHEMA: &str = "ample/witness/1";
pub const EQUIV_SCHEMA: &str = "ample/equiv-certificate/1";
pub const LEQ_SCHEMA: &str = "ample/leq-certificate/1";
pub const STATE_SCHEMA: &str = "ample/state/1";
pub const FARKAS_SCHEMA: &str = "ample/farkas/1";
pub const ELEMENT_SCHEMA: &str = "ample/element/1";
pub const PRESENTATION_SCHEMA: &str = "ample/presentation/1";

/// Parses JSON, reporting the path and line of the first mismatch.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse(format!("at {path}: {}", e.into_inner()))
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn check_schema(found: &str, expected: &str) -> Result<()> {
    if found != expected {
        return Err(Error::Parse(format!("schema {found:?}, expected {expected:?}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpaceDto {
    Shift { k: u8 },
    Finite { n: usize },
}

impl SpaceDto {
    pub fn from_space(space: UnitSpace) -> Self {
        match space {
            UnitSpace::Shift(k) => SpaceDto::Shift { k },
            UnitSpace::Finite(n) => SpaceDto::Finite { n },
        }
    }

    pub fn to_space(&self) -> Result<UnitSpace> {
        match *self {
            SpaceDto::Shift { k } => UnitSpace::shift(k),
            SpaceDto::Finite { n } => UnitSpace::finite(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellDto {
    Point(usize),
    Cyl(String),
}

impl CellDto {
    pub fn from_cell(c: &Cell) -> Self {
        match c {
            Cell::Point(p) => CellDto::Point(*p),
            Cell::Cyl(w) => CellDto::Cyl(word_string(w)),
        }
    }

    pub fn to_cell(&self, space: UnitSpace) -> Result<Cell> {
        let c = match self {
            CellDto::Point(p) => Cell::Point(*p),
            CellDto::Cyl(s) => Cell::Cyl(parse_word(s)?),
        };
        space.check_cell(&c)?;
        Ok(c)
    }
}

pub fn cells_dto(c: &Clopen) -> Vec<CellDto> {
    c.cells().iter().map(CellDto::from_cell).collect()
}

pub fn clopen_from_cells(space: UnitSpace, cells: &[CellDto]) -> Result<Clopen> {
    Clopen::canonicalize(space, cells.iter().map(|c| c.to_cell(space)).collect::<Result<Vec<_>>>()?)
}

/// A clopen with its space, as a standalone value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClopenDto {
    pub space: SpaceDto,
    pub cells: Vec<CellDto>,
}

impl ClopenDto {
    pub fn from_clopen(c: &Clopen) -> Self {
        ClopenDto { space: SpaceDto::from_space(c.space()), cells: cells_dto(c) }
    }

    pub fn to_clopen(&self) -> Result<Clopen> {
        clopen_from_cells(self.space.to_space()?, &self.cells)
    }
}

pub type WordDto = Vec<(String, i8)>;

pub fn word_dto(w: &Word) -> WordDto {
    w.letters()
        .iter()
        .map(|l| (format!("g{}", l.generator + 1), if l.inverse { -1 } else { 1 }))
        .collect()
}

pub fn word_from_dto(pres: &GroupoidPresentation, dto: &WordDto) -> Result<Word> {
    let letters = dto
        .iter()
        .map(|(g, e)| {
            let index = g
                .strip_prefix('g')
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&i| i >= 1 && i <= pres.generators().len())
                .ok_or_else(|| Error::Parse(format!("unknown generator {g:?}")))?;
            match e {
                1 => Ok(Letter::gen(index - 1)),
                -1 => Ok(Letter::inv(index - 1)),
                _ => Err(Error::Parse(format!("exponent {e} of {g} is not ±1"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Word::new(letters))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDto {
    pub word: WordDto,
    pub domain: Vec<CellDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BisectionDto {
    pub pieces: Vec<PieceDto>,
}

pub fn bisection_dto(b: &Bisection) -> BisectionDto {
    BisectionDto {
        pieces: b.pieces().iter().map(|p| PieceDto { word: word_dto(&p.word), domain: cells_dto(&p.domain) }).collect(),
    }
}

pub fn bisection_from_dto(pres: &GroupoidPresentation, dto: &BisectionDto) -> Result<Bisection> {
    let pieces = dto
        .pieces
        .iter()
        .map(|p| {
            Ok(ArrowPiece { word: word_from_dto(pres, &p.word)?, domain: clopen_from_cells(pres.space(), &p.domain)? })
        })
        .collect::<Result<Vec<_>>>()?;
    pres.bisection(pieces)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalDto {
    pub num: String,
    pub den: String,
}

impl RationalDto {
    pub fn from_rational(q: &Rational) -> Self {
        RationalDto { num: q.numer().to_string(), den: q.denom().to_string() }
    }

    pub fn to_rational(&self) -> Result<Rational> {
        let parse = |s: &str| s.parse::<BigInt>().map_err(|_| Error::Parse(format!("invalid integer {s:?}")));
        let den = parse(&self.den)?;
        if !den.is_positive() {
            return Err(Error::Parse(format!("denominator {} is not positive", self.den)));
        }
        Ok(Rational::new(parse(&self.num)?, den))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionDto {
    Injection { pairs: Vec<(usize, usize)> },
    Pieces { pieces: Vec<(String, String)> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorDto {
    PrefixMap { alpha: String, beta: String },
    PartialInjection { pairs: Vec<(usize, usize)> },
    GroupElement { label: String, action: ActionDto },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsotropyDto {
    #[default]
    Free,
    Table(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub space: SpaceDto,
    pub generators: Vec<GeneratorDto>,
    #[serde(default)]
    pub isotropy: IsotropyDto,
}

/// A builtin alias such as `"cuntz:2"` or an inline presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PresentationRef {
    Builtin(String),
    Inline(PresentationDto),
}

/// A standalone presentation file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationDoc {
    pub schema: String,
    #[serde(flatten)]
    pub presentation: PresentationDto,
}

pub fn presentation_dto(pres: &GroupoidPresentation) -> PresentationDto {
    let generators = pres
        .generators()
        .iter()
        .map(|g| match g {
            Generator::PrefixMap { alpha, beta } => {
                GeneratorDto::PrefixMap { alpha: word_string(alpha), beta: word_string(beta) }
            }
            Generator::PartialInjection { pairs } => GeneratorDto::PartialInjection { pairs: pairs.clone() },
            Generator::GroupElement { label, action } => GeneratorDto::GroupElement {
                label: label.clone(),
                action: match action {
                    GroupAction::Injection(pairs) => ActionDto::Injection { pairs: pairs.clone() },
                    GroupAction::Pieces(pieces) => ActionDto::Pieces {
                        pieces: pieces.iter().map(|(a, b)| (word_string(a), word_string(b))).collect(),
                    },
                },
            },
        })
        .collect();
    let isotropy = match pres.isotropy() {
        Isotropy::FreeWords => IsotropyDto::Free,
        Isotropy::Table(t) => IsotropyDto::Table(t.table().to_vec()),
    };
    PresentationDto {
        name: pres.name().map(str::to_string),
        space: SpaceDto::from_space(pres.space()),
        generators,
        isotropy,
    }
}

pub fn presentation_from_dto(dto: &PresentationDto) -> Result<GroupoidPresentation> {
    let space = dto.space.to_space()?;
    let generators = dto
        .generators
        .iter()
        .map(|g| {
            Ok(match g {
                GeneratorDto::PrefixMap { alpha, beta } => {
                    Generator::PrefixMap { alpha: parse_word(alpha)?, beta: parse_word(beta)? }
                }
                GeneratorDto::PartialInjection { pairs } => Generator::PartialInjection { pairs: pairs.clone() },
                GeneratorDto::GroupElement { label, action } => Generator::GroupElement {
                    label: label.clone(),
                    action: match action {
                        ActionDto::Injection { pairs } => GroupAction::Injection(pairs.clone()),
                        ActionDto::Pieces { pieces } => GroupAction::Pieces(
                            pieces
                                .iter()
                                .map(|(a, b)| Ok((parse_word(a)?, parse_word(b)?)))
                                .collect::<Result<Vec<_>>>()?,
                        ),
                    },
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let isotropy = match &dto.isotropy {
        IsotropyDto::Free => IsotropySpec::FreeWords,
        IsotropyDto::Table(t) => IsotropySpec::Table(t.clone()),
    };
    let pres = GroupoidPresentation::new(space, generators, isotropy)?;
    Ok(match &dto.name {
        Some(n) => pres.with_name(n.clone()),
        None => pres,
    })
}

/// Builtins are referenced by alias when the alias rebuilds the same
/// presentation.
pub fn presentation_ref(pres: &GroupoidPresentation) -> PresentationRef {
    if let Some(name) = pres.name() {
        if GroupoidPresentation::builtin(name).is_ok_and(|b| b == *pres) {
            return PresentationRef::Builtin(name.to_string());
        }
    }
    PresentationRef::Inline(presentation_dto(pres))
}

pub fn resolve(r: &PresentationRef) -> Result<GroupoidPresentation> {
    match r {
        PresentationRef::Builtin(alias) => GroupoidPresentation::builtin(alias),
        PresentationRef::Inline(dto) => presentation_from_dto(dto),
    }
}

/// A presentation argument: a builtin alias, or a path to a presentation
/// file read by the caller.
pub fn parse_presentation(text: &str) -> Result<GroupoidPresentation> {
    let doc: PresentationDoc = parse(text)?;
    check_schema(&doc.schema, PRESENTATION_SCHEMA)?;
    presentation_from_dto(&doc.presentation)
}

pub fn presentation_doc(pres: &GroupoidPresentation) -> PresentationDoc {
    PresentationDoc { schema: PRESENTATION_SCHEMA.into(), presentation: presentation_dto(pres) }
}

/// A labeled family: entry `i` carries label `i + 1`.
pub type FamilyDto = Vec<Vec<CellDto>>;

pub fn family_dto(f: &LabeledFamily) -> FamilyDto {
    f.entries().iter().map(cells_dto).collect()
}

pub fn family_from_dto(space: UnitSpace, dto: &FamilyDto) -> Result<LabeledFamily> {
    let entries = dto
        .iter()
        .enumerate()
        .map(|(i, cells)| Ok((clopen_from_cells(space, cells)?, i + 1)))
        .collect::<Result<Vec<_>>>()?;
    LabeledFamily::normalize(space, entries)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleDto {
    pub bisection: BisectionDto,
    pub n: usize,
    pub m: usize,
}

fn triples_dto(c: &EquivCertificate) -> Vec<TripleDto> {
    c.triples.iter().map(|t| TripleDto { bisection: bisection_dto(&t.bisection), n: t.n, m: t.m }).collect()
}

fn triples_from_dto(pres: &GroupoidPresentation, dto: &[TripleDto]) -> Result<EquivCertificate> {
    let triples = dto
        .iter()
        .map(|t| Ok(Triple { bisection: bisection_from_dto(pres, &t.bisection)?, n: t.n, m: t.m }))
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivCertificate { triples })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivDoc {
    pub schema: String,
    pub presentation: PresentationRef,
    pub left: FamilyDto,
    pub right: FamilyDto,
    pub triples: Vec<TripleDto>,
}

pub struct EquivClaim {
    pub pres: GroupoidPresentation,
    pub left: LabeledFamily,
    pub right: LabeledFamily,
    pub cert: EquivCertificate,
}

pub fn equiv_doc(pres: &GroupoidPresentation, left: &LabeledFamily, right: &LabeledFamily, c: &EquivCertificate) -> EquivDoc {
    EquivDoc {
        schema: EQUIV_SCHEMA.into(),
        presentation: presentation_ref(pres),
        left: family_dto(left),
        right: family_dto(right),
        triples: triples_dto(c),
    }
}

pub fn equiv_from_doc(doc: &EquivDoc) -> Result<EquivClaim> {
    check_schema(&doc.schema, EQUIV_SCHEMA)?;
    let pres = resolve(&doc.presentation)?;
    let left = family_from_dto(pres.space(), &doc.left)?;
    let right = family_from_dto(pres.space(), &doc.right)?;
    let cert = triples_from_dto(&pres, &doc.triples)?;
    Ok(EquivClaim { pres, left, right, cert })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeqDoc {
    pub schema: String,
    pub presentation: PresentationRef,
    pub left: FamilyDto,
    pub right: FamilyDto,
    pub remainder: FamilyDto,
    pub triples: Vec<TripleDto>,
}

pub struct LeqClaim {
    pub pres: GroupoidPresentation,
    pub left: LabeledFamily,
    pub right: LabeledFamily,
    pub cert: LeqCertificate,
}

pub fn leq_doc(pres: &GroupoidPresentation, left: &LabeledFamily, right: &LabeledFamily, c: &LeqCertificate) -> LeqDoc {
    LeqDoc {
        schema: LEQ_SCHEMA.into(),
        presentation: presentation_ref(pres),
        left: family_dto(left),
        right: family_dto(right),
        remainder: family_dto(&c.remainder),
        triples: triples_dto(&c.equivalence),
    }
}

pub fn leq_from_doc(doc: &LeqDoc) -> Result<LeqClaim> {
    check_schema(&doc.schema, LEQ_SCHEMA)?;
    let pres = resolve(&doc.presentation)?;
    let left = family_from_dto(pres.space(), &doc.left)?;
    let right = family_from_dto(pres.space(), &doc.right)?;
    let remainder = family_from_dto(pres.space(), &doc.remainder)?;
    let equivalence = triples_from_dto(&pres, &doc.triples)?;
    Ok(LeqClaim { pres, left, right, cert: LeqCertificate { remainder, equivalence } })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowEntryDto {
    pub bisection: BisectionDto,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    pub schema: String,
    pub presentation: PresentationRef,
    #[serde(rename = "A")]
    pub a: Vec<CellDto>,
    pub k: usize,
    pub l: usize,
    pub rows: Vec<Vec<RowEntryDto>>,
}

pub fn witness_doc(pres: &GroupoidPresentation, w: &ParadoxWitness) -> WitnessDoc {
    WitnessDoc {
        schema: WITNESS_SCHEMA.into(),
        presentation: presentation_ref(pres),
        a: cells_dto(&w.a),
        k: w.k,
        l: w.l,
        rows: w
            .rows
            .iter()
            .map(|r| r.iter().map(|e| RowEntryDto { bisection: bisection_dto(&e.bisection), m: e.m }).collect())
            .collect(),
    }
}

pub fn witness_from_doc(doc: &WitnessDoc) -> Result<(GroupoidPresentation, ParadoxWitness)> {
    check_schema(&doc.schema, WITNESS_SCHEMA)?;
    let pres = resolve(&doc.presentation)?;
    let rows = doc
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| Ok(RowEntry { bisection: bisection_from_dto(&pres, &e.bisection)?, m: e.m }))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let a = clopen_from_cells(pres.space(), &doc.a)?;
    Ok((pres, ParadoxWitness { a, k: doc.k, l: doc.l, rows }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellValueDto {
    pub cell: CellDto,
    pub value: RationalDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub schema: String,
    pub presentation: PresentationRef,
    pub depth: usize,
    pub total: RationalDto,
    pub values: Vec<CellValueDto>,
}

pub fn state_doc(pres: &GroupoidPresentation, s: &StateVector) -> StateDoc {
    StateDoc {
        schema: STATE_SCHEMA.into(),
        presentation: presentation_ref(pres),
        depth: s.depth,
        total: RationalDto::from_rational(&s.total),
        values: s
            .values
            .iter()
            .map(|(c, v)| CellValueDto { cell: CellDto::from_cell(c), value: RationalDto::from_rational(v) })
            .collect(),
    }
}

pub fn state_from_doc(doc: &StateDoc) -> Result<(GroupoidPresentation, StateVector)> {
    check_schema(&doc.schema, STATE_SCHEMA)?;
    let pres = resolve(&doc.presentation)?;
    let space = pres.space();
    let mut values = std::collections::BTreeMap::new();
    for cv in &doc.values {
        let cell = cv.cell.to_cell(space)?;
        if cell.depth() != doc.depth && !space.is_finite() {
            return Err(Error::Parse(format!("cell {cell} is not at depth {}", doc.depth)));
        }
        if values.insert(cell.clone(), cv.value.to_rational()?).is_some() {
            return Err(Error::Parse(format!("cell {cell} listed twice")));
        }
    }
    let total = doc.total.to_rational()?;
    Ok((pres, StateVector { space, depth: doc.depth, values, total }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowDto {
    pub coeffs: Vec<(usize, RationalDto)>,
    pub rhs: RationalDto,
}

/// The rows are informational: verification rebuilds them from the
/// presentation and rejects a mismatch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FarkasDoc {
    pub schema: String,
    pub presentation: PresentationRef,
    pub depth: usize,
    pub cells: Vec<CellDto>,
    pub rows: Vec<RowDto>,
    pub multipliers: Vec<RationalDto>,
}

fn rows_dto(rows: &[Row]) -> Vec<RowDto> {
    rows.iter()
        .map(|r| RowDto {
            coeffs: r.coeffs.iter().map(|(j, v)| (*j, RationalDto::from_rational(v))).collect(),
            rhs: RationalDto::from_rational(&r.rhs),
        })
        .collect()
}

pub fn farkas_doc(pres: &GroupoidPresentation, f: &FarkasCertificate) -> FarkasDoc {
    let cs = build_constraints(pres, f.depth);
    FarkasDoc {
        schema: FARKAS_SCHEMA.into(),
        presentation: presentation_ref(pres),
        depth: f.depth,
        cells: cs.cells.iter().map(CellDto::from_cell).collect(),
        rows: rows_dto(&cs.lp_rows(&crate::lp::rat(1))),
        multipliers: f.multipliers.iter().map(RationalDto::from_rational).collect(),
    }
}

pub fn farkas_from_doc(doc: &FarkasDoc) -> Result<(GroupoidPresentation, FarkasCertificate)> {
    check_schema(&doc.schema, FARKAS_SCHEMA)?;
    let pres = resolve(&doc.presentation)?;
    let cs = build_constraints(&pres, doc.depth);
    if doc.rows != rows_dto(&cs.lp_rows(&crate::lp::rat(1))) {
        return Err(Error::Unverified("listed rows differ from the constraint system of the presentation".into()));
    }
    let multipliers = doc.multipliers.iter().map(RationalDto::to_rational).collect::<Result<Vec<_>>>()?;
    Ok((pres, FarkasCertificate { depth: doc.depth, multipliers }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDto {
    pub word: WordDto,
    pub cell: CellDto,
    pub coef: RationalDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDoc {
    pub schema: String,
    pub presentation: PresentationRef,
    pub terms: Vec<TermDto>,
}

pub fn element_doc(pres: &GroupoidPresentation, a: &ConvElement) -> ElementDoc {
    ElementDoc {
        schema: ELEMENT_SCHEMA.into(),
        presentation: presentation_ref(pres),
        terms: a
            .term_list()
            .iter()
            .map(|(w, c, v)| TermDto { word: word_dto(w), cell: CellDto::from_cell(c), coef: RationalDto::from_rational(v) })
            .collect(),
    }
}

pub fn element_from_doc(doc: &ElementDoc) -> Result<(GroupoidPresentation, ConvElement)> {
    check_schema(&doc.schema, ELEMENT_SCHEMA)?;
    let pres = resolve(&doc.presentation)?;
    let terms = doc
        .terms
        .iter()
        .map(|t| Ok((word_from_dto(&pres, &t.word)?, t.cell.to_cell(pres.space())?, t.coef.to_rational()?)))
        .collect::<Result<Vec<_>>>()?;
    let a = ConvAlgebra::new(&pres).element(terms)?;
    Ok((pres, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paradox::{cuntz_witness, verify_witness};
    use crate::states::{solve_state, StateOutcome};

    #[test]
    fn witness_round_trip() {
        let c = GroupoidPresentation::cuntz(2).unwrap();
        let w = cuntz_witness(&c, &[1]).unwrap();
        let text = to_json(&witness_doc(&c, &w));
        assert!(text.contains("\"cuntz:2\""));
        let (p, back) = witness_from_doc(&parse(&text).unwrap()).unwrap();
        assert_eq!(back, w);
        assert_eq!(verify_witness(&p, &back), Ok(()));
    }

    #[test]
    fn inline_presentations() {
        let text = r#"{"schema": "ample/presentation/1", "space": {"kind": "shift", "k": 2},
            "generators": [{"kind": "prefix_map", "alpha": "", "beta": "1"},
                           {"kind": "prefix_map", "alpha": "", "beta": "2"}]}"#;
        let p = parse_presentation(text).unwrap();
        assert_eq!(p.generators(), GroupoidPresentation::cuntz(2).unwrap().generators());
        let dto = presentation_dto(&GroupoidPresentation::odometer(2).unwrap());
        assert_eq!(presentation_from_dto(&dto).unwrap(), GroupoidPresentation::odometer(2).unwrap());
        let t = GroupoidPresentation::rotation_table(3).unwrap();
        assert_eq!(presentation_from_dto(&presentation_dto(&t)).unwrap(), t);
        let overlap = r#"{"schema": "ample/presentation/1", "space": {"kind": "finite", "n": 3},
            "generators": [{"kind": "partial_injection", "pairs": [[0, 1], [0, 2]]}]}"#;
        let err = parse_presentation(overlap).unwrap_err();
        assert!(matches!(err, Error::MalformedGenerator { index: 1, .. }), "{err}");
    }

    #[test]
    fn parse_errors_name_the_path() {
        let bad = r#"{"schema": "ample/witness/1", "presentation": "cuntz:2", "A": [""], "k": "two", "l": 1, "rows": []}"#;
        let err = parse::<WitnessDoc>(bad).unwrap_err().to_string();
        assert!(err.contains("at k"), "{err}");
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn state_round_trip() {
        let r = GroupoidPresentation::rotation(3).unwrap();
        let cs = build_constraints(&r, 0);
        let StateOutcome::State(s) = solve_state(&cs, None).unwrap() else { panic!() };
        let text = to_json(&state_doc(&r, &s));
        let (_, back) = state_from_doc(&parse(&text).unwrap()).unwrap();
        assert_eq!(back, s);
        let c = GroupoidPresentation::cuntz(2).unwrap();
        let cs = build_constraints(&c, 1);
        let StateOutcome::Infeasible(f) = solve_state(&cs, None).unwrap() else { panic!() };
        let (_, fb) = farkas_from_doc(&parse(&to_json(&farkas_doc(&c, &f))).unwrap()).unwrap();
        assert_eq!(fb.verify(&cs), Ok(()));
    }

    #[test]
    fn element_round_trip() {
        let c = GroupoidPresentation::cuntz(2).unwrap();
        let a = ConvElement::indicator(&c.cuntz_bisection("12", "2").unwrap());
        let (_, back) = element_from_doc(&parse(&to_json(&element_doc(&c, &a))).unwrap()).unwrap();
        assert_eq!(back, a);
    }
}
