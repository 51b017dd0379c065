//! JSON input documents, validation with JSON-pointer diagnostics, pipeline
//! dispatch and reports. The `cellcoh` binary is a thin wrapper over [`main_with_args`].

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cech::{build_compatible, verify_theorem22, Cover};
use crate::cellular::{
    reduce_with_witness, search_filtration, skeleton_filtration, validate_filtration, Filtration,
};
use crate::equivariant::{cl_classes, group_cohomology, ClContext, FinGroup, GComplex, GModule, Twist};
use crate::linalg::{Coef, FinMod, Mat, ModMap};
use crate::space::{relative_cohomology, sheaf_cohomology, FinSpace, PointSet, WCSheaf};
use crate::transition::{level_transition_check, TransitionInput};
use crate::yoneda::{jannsen_consistency, theorem31_pipeline, Triangle};
use crate::{Error, Result};

type Rows = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub version: u32,
    pub coefficients: CoefBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sheaf: Option<SheafBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcomplex: Option<Vec<GensBlock>>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefBlock {
    pub l: u64,
    pub m: u32,
    /// Tate twist exponent `a`, applied through `character`.
    #[serde(default)]
    pub twist: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceBlock {
    #[serde(default)]
    pub points: Vec<String>,
    /// Pairs `[x, y]` meaning `x ≤ y`; must be transitive.
    #[serde(default)]
    pub order: Vec<(String, String)>,
    /// Alternative to `points`/`order`: the face poset of these simplices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplices: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SheafBlock {
    /// `"constant"`.
    Shorthand(String),
    Explicit(ExplicitSheaf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSheaf {
    pub stalks: Vec<StalkBlock>,
    #[serde(default)]
    pub restrictions: Vec<Restriction>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StalkBlock {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Rows,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Restriction {
    pub from: String,
    pub to: String,
    pub matrix: Rows,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyclic: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleBlock {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Rows,
    /// One matrix per group element; omitted for the trivial action.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<Rows>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexBlock {
    #[serde(default)]
    pub lo: i64,
    pub modules: Vec<ModuleBlock>,
    #[serde(default)]
    pub differentials: Vec<Rows>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GensBlock {
    pub degree: i64,
    pub generators: Rows,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Expected groups by degree, written as in reports (`"Z/2 + Z/4"`, `"0"`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<BTreeMap<String, String>>,
    /// The closed subset `Y` for `relative`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed: Option<Vec<String>>,
    /// Points every searched `X_{n-1}` must contain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_points: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<Vec<i64>>,
    /// For `transition-check`: cellular, cech, group-cohomology or cl.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Cohomology,
    Relative,
    SearchFiltration,
    Reduce,
    Cech,
    GroupCohomology,
    Cl,
    Theorem31,
    TransitionCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Cohomology => "cohomology",
            Command::Relative => "relative",
            Command::SearchFiltration => "search-filtration",
            Command::Reduce => "reduce",
            Command::Cech => "cech",
            Command::GroupCohomology => "group-cohomology",
            Command::Cl => "cl",
            Command::Theorem31 => "theorem31",
            Command::TransitionCheck => "transition-check",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub input_hash: String,
    pub seed: u64,
    pub assertions: Vec<Assertion>,
    /// Seconds per phase; empty unless timings were requested, so that
    /// reports stay byte-identical across runs.
    pub timings: BTreeMap<String, f64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}

fn violation(pointer: impl Into<String>, detail: impl std::fmt::Display) -> Error {
    Error::InvariantViolation {
        pointer: pointer.into(),
        detail: detail.to_string(),
    }
}

/// Parses a document, reporting schema errors with the JSON pointer of the
/// offending element.
pub fn parse_document(bytes: &[u8]) -> Result<InputDocument> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let mut pointer = String::new();
        for seg in e.path().iter() {
            use serde_path_to_error::Segment;
            match seg {
                Segment::Seq { index } => pointer.push_str(&format!("/{index}")),
                Segment::Map { key } => pointer.push_str(&format!("/{key}")),
                Segment::Enum { variant } => pointer.push_str(&format!("/{variant}")),
                Segment::Unknown => pointer.push_str("/?"),
            }
        }
        Error::Schema(format!("{}: {}", if pointer.is_empty() { "/" } else { &pointer }, e.inner()))
    })
}

/// A validated document together with the objects it describes.
#[derive(Clone, Debug)]
pub struct Validated {
    /// The normalized document: shorthands expanded, order pairs sorted,
    /// matrix entries reduced to residues.
    pub doc: InputDocument,
    pub coef: Coef,
    pub space: Option<FinSpace>,
    pub sheaf: Option<WCSheaf>,
    pub group: Option<FinGroup>,
    pub module: Option<GModule>,
    pub complex: Option<GComplex>,
    pub subcomplex: Vec<(i64, Mat)>,
    pub closed: Option<PointSet>,
    pub seed_points: Option<PointSet>,
    pub filtration: Option<Filtration>,
    pub cover: Option<Cover>,
}

fn matrix(coef: Coef, rows: &Rows, cols: usize, pointer: &str) -> Result<Mat> {
    for (i, r) in rows.iter().enumerate() {
        if r.len() != cols {
            return Err(violation(format!("{pointer}/{i}"), format!("row has {} entries, expected {cols}", r.len())));
        }
    }
    Mat::from_rows(coef, cols, rows).map_err(|e| violation(pointer, e))
}

fn residues(m: &Mat) -> Rows {
    m.row_iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect()
}

fn points_of(space: &FinSpace, labels: &[String], pointer: &str) -> Result<PointSet> {
    let mut s = PointSet::EMPTY;
    for (i, l) in labels.iter().enumerate() {
        let x = space
            .index_of(l)
            .ok_or_else(|| violation(format!("{pointer}/{i}"), format!("unknown point {l:?}")))?;
        s.insert(x);
    }
    Ok(s)
}

fn validate_space(block: &mut SpaceBlock) -> Result<FinSpace> {
    if let Some(simplices) = block.simplices.take() {
        if !block.points.is_empty() || !block.order.is_empty() {
            return Err(Error::Schema("/space: give either simplices or points and order".into()));
        }
        let space = FinSpace::face_poset(&simplices).map_err(|e| violation("/space/simplices", e))?;
        block.points = space.labels().to_vec();
        for x in 0..space.len() {
            for y in space.up(x).iter().filter(|&y| y != x) {
                block.order.push((space.label(x).to_string(), space.label(y).to_string()));
            }
        }
        return Ok(space);
    }
    let mut index = HashMap::new();
    for (i, p) in block.points.iter().enumerate() {
        if index.insert(p.clone(), i).is_some() {
            return Err(violation(format!("/space/points/{i}"), format!("duplicate point {p:?}")));
        }
    }
    let mut pairs = Vec::new();
    for (i, (a, b)) in block.order.iter().enumerate() {
        let x = *index.get(a).ok_or_else(|| violation(format!("/space/order/{i}/0"), format!("unknown point {a:?}")))?;
        let y = *index.get(b).ok_or_else(|| violation(format!("/space/order/{i}/1"), format!("unknown point {b:?}")))?;
        if x != y {
            pairs.push((i, x, y));
        }
    }
    let has = |x: usize, y: usize| x == y || pairs.iter().any(|&(_, a, b)| (a, b) == (x, y));
    for &(i, x, y) in &pairs {
        if has(y, x) {
            return Err(violation(format!("/space/order/{i}"), format!("{} ≤ {} and {} ≤ {}", block.points[x], block.points[y], block.points[y], block.points[x])));
        }
        for &(_, y2, z) in &pairs {
            if y2 == y && !has(x, z) {
                return Err(violation(
                    format!("/space/order/{i}"),
                    format!(
                        "not transitive: {} ≤ {} ≤ {} but {} ≤ {} is missing",
                        block.points[x], block.points[y], block.points[z], block.points[x], block.points[z]
                    ),
                ));
            }
        }
    }
    let mut strict: Vec<(usize, usize)> = pairs.iter().map(|&(_, x, y)| (x, y)).collect();
    strict.sort_unstable();
    strict.dedup();
    block.order = strict.iter().map(|&(x, y)| (block.points[x].clone(), block.points[y].clone())).collect();
    FinSpace::new(block.points.clone(), &strict).map_err(|e| violation("/space/order", e))
}

fn validate_sheaf(block: &mut SheafBlock, space: &FinSpace, coef: Coef) -> Result<WCSheaf> {
    if let SheafBlock::Shorthand(s) = block {
        if s != "constant" {
            return Err(Error::Schema(format!("/sheaf: unknown shorthand {s:?}")));
        }
        *block = SheafBlock::Explicit(ExplicitSheaf {
            stalks: vec![StalkBlock { rank: 1, relations: vec![] }; space.len()],
            restrictions: space
                .covers()
                .into_iter()
                .map(|(x, y)| Restriction {
                    from: space.label(x).to_string(),
                    to: space.label(y).to_string(),
                    matrix: vec![vec![1]],
                })
                .collect(),
        });
    }
    let SheafBlock::Explicit(ex) = block else { unreachable!() };
    if ex.stalks.len() != space.len() {
        return Err(violation("/sheaf/stalks", format!("{} stalks for {} points", ex.stalks.len(), space.len())));
    }
    let mut stalks = Vec::new();
    for (i, s) in ex.stalks.iter_mut().enumerate() {
        let p = format!("/sheaf/stalks/{i}/relations");
        let rel = matrix(coef, &s.relations, s.rank, &p)?;
        stalks.push(FinMod::new(coef, s.rank, &rel).map_err(|e| violation(&p, e))?);
        s.relations = residues(&rel);
    }
    let covers_list = space.covers();
    let mut covers = HashMap::new();
    let mut others = Vec::new();
    for (i, r) in ex.restrictions.iter_mut().enumerate() {
        let p = format!("/sheaf/restrictions/{i}");
        let x = space.index_of(&r.from).ok_or_else(|| violation(format!("{p}/from"), format!("unknown point {:?}", r.from)))?;
        let y = space.index_of(&r.to).ok_or_else(|| violation(format!("{p}/to"), format!("unknown point {:?}", r.to)))?;
        if !space.lt(x, y) {
            return Err(violation(&p, format!("{} < {} does not hold", r.from, r.to)));
        }
        if r.matrix.len() != stalks[x].rank() {
            return Err(violation(format!("{p}/matrix"), format!("{} rows, expected {}", r.matrix.len(), stalks[x].rank())));
        }
        let m = matrix(coef, &r.matrix, stalks[y].rank(), &format!("{p}/matrix"))?;
        ModMap::new(stalks[x].clone(), stalks[y].clone(), m.clone())
            .map_err(|_| violation(format!("{p}/matrix"), "not well defined on the presented stalks"))?;
        r.matrix = residues(&m);
        if covers_list.contains(&(x, y)) {
            if covers.insert((x, y), m).is_some() {
                return Err(violation(&p, "duplicate restriction"));
            }
        } else {
            others.push((p, x, y, m));
        }
    }
    let sheaf = WCSheaf::new(space, stalks, &covers).map_err(|e| violation("/sheaf/restrictions", e))?;
    for (p, x, z, m) in others {
        let derived = sheaf.rho(x, z);
        let same = m.sub(derived).row_iter().all(|r| sheaf.stalk(z).is_zero_elem(r));
        if !same {
            let y = space.up(x).iter().find(|&y| y != x && y != z && space.lt(y, z)).unwrap_or(z);
            return Err(violation(
                p,
                format!(
                    "not functorial on the chain {} < {} < {}: the given map differs from the composite",
                    space.label(x),
                    space.label(y),
                    space.label(z)
                ),
            ));
        }
    }
    ex.restrictions.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
    Ok(sheaf)
}

fn validate_group(block: &mut GroupBlock) -> Result<FinGroup> {
    let g = match (&block.table, block.cyclic) {
        (Some(t), None) => match &block.name {
            Some(n) => FinGroup::named(t.clone(), n),
            None => FinGroup::new(t.clone()),
        }
        .map_err(|e| violation("/group/table", e))?,
        (None, Some(n)) if (1..=64).contains(&n) => FinGroup::cyclic(n),
        (None, Some(_)) => return Err(violation("/group/cyclic", "order must be between 1 and 64")),
        _ => return Err(Error::Schema("/group: give exactly one of table and cyclic".into())),
    };
    block.table = Some(g.table().to_vec());
    block.cyclic = None;
    block.name = Some(g.name().to_string());
    Ok(g)
}

fn validate_module(block: &mut ModuleBlock, g: &FinGroup, coef: Coef, pointer: &str) -> Result<GModule> {
    let rel = matrix(coef, &block.relations, block.rank, &format!("{pointer}/relations"))?;
    let m = FinMod::new(coef, block.rank, &rel).map_err(|e| violation(format!("{pointer}/relations"), e))?;
    block.relations = residues(&rel);
    let Some(action) = &mut block.action else {
        return Ok(GModule::trivial(g, m));
    };
    if action.len() != g.order() {
        return Err(violation(format!("{pointer}/action"), format!("{} matrices for a group of order {}", action.len(), g.order())));
    }
    let mut mats = Vec::new();
    for (x, a) in action.iter_mut().enumerate() {
        let p = format!("{pointer}/action/{x}");
        if a.len() != block.rank {
            return Err(violation(&p, format!("{} rows, expected {}", a.len(), block.rank)));
        }
        let mat = matrix(coef, a, block.rank, &p)?;
        *a = residues(&mat);
        mats.push(mat);
    }
    GModule::new(g, m, mats).map_err(|e| violation(format!("{pointer}/action"), e))
}

fn validate_complex(block: &mut ComplexBlock, g: &FinGroup, coef: Coef) -> Result<GComplex> {
    let mods = block
        .modules
        .iter_mut()
        .enumerate()
        .map(|(k, m)| validate_module(m, g, coef, &format!("/complex/modules/{k}")))
        .collect::<Result<Vec<_>>>()?;
    if block.differentials.len() + 1 != mods.len().max(1) {
        return Err(violation(
            "/complex/differentials",
            format!("{} differentials for {} modules", block.differentials.len(), mods.len()),
        ));
    }
    let mut diffs: Vec<Mat> = Vec::new();
    for (k, d) in block.differentials.iter_mut().enumerate() {
        let p = format!("/complex/differentials/{k}");
        if d.len() != mods[k].rank() {
            return Err(violation(&p, format!("{} rows, expected {}", d.len(), mods[k].rank())));
        }
        let mat = matrix(coef, d, mods[k + 1].rank(), &p)?;
        ModMap::new(mods[k].module().clone(), mods[k + 1].module().clone(), mat.clone())
            .map_err(|_| violation(&p, "not well defined on the presented modules"))?;
        if !mods[k].is_equivariant(&mods[k + 1], &mat) {
            return Err(violation(&p, "not G-equivariant"));
        }
        if let Some(prev) = diffs.last() {
            if !prev.mul(&mat).row_iter().all(|r| mods[k + 1].module().is_zero_elem(r)) {
                return Err(violation(&p, format!("d∘d ≠ 0 in degree {}", block.lo + k as i64 + 1)));
            }
        }
        *d = residues(&mat);
        diffs.push(mat);
    }
    GComplex::from_modules(g, block.lo, &mods, diffs).map_err(|e| violation("/complex", e))
}

/// Checks every invariant of the referenced structures eagerly and returns
/// the normalized document with the constructed objects.
pub fn validate_input(doc: &InputDocument) -> Result<Validated> {
    let mut doc = doc.clone();
    if doc.version != 1 {
        return Err(Error::Schema(format!("/version: unsupported version {}", doc.version)));
    }
    let coef = Coef::new(doc.coefficients.l, doc.coefficients.m).map_err(|e| violation("/coefficients", e))?;
    let space = doc.space.as_mut().map(validate_space).transpose()?;
    let sheaf = match (&mut doc.sheaf, &space) {
        (Some(b), Some(x)) => Some(validate_sheaf(b, x, coef)?),
        (Some(_), None) => return Err(Error::Schema("/sheaf: a sheaf needs a space block".into())),
        _ => None,
    };
    let group = doc.group.as_mut().map(validate_group).transpose()?;
    let twist = match (&doc.coefficients.character, &group) {
        (Some(chi), Some(g)) => {
            let chi: Vec<u64> = chi.iter().map(|&x| coef.reduce(x)).collect();
            doc.coefficients.character = Some(chi.iter().map(|&x| x as i64).collect());
            Some(Twist::new(g, coef, chi, doc.coefficients.twist).map_err(|e| violation("/coefficients/character", e))?)
        }
        (Some(_), None) => return Err(Error::Schema("/coefficients/character: a character needs a group block".into())),
        _ => None,
    };
    let needs_group = |what: &str| Error::Schema(format!("/{what}: needs a group block"));
    let module = match &mut doc.module {
        Some(b) => {
            let g = group.as_ref().ok_or_else(|| needs_group("module"))?;
            let m = validate_module(b, g, coef, "/module")?;
            Some(match &twist {
                Some(t) => m.twist(t),
                None => m,
            })
        }
        None => None,
    };
    let complex = match &mut doc.complex {
        Some(b) => {
            let g = group.as_ref().ok_or_else(|| needs_group("complex"))?;
            let k = validate_complex(b, g, coef)?;
            Some(match &twist {
                Some(t) => k.twist(t),
                None => k,
            })
        }
        None => None,
    };
    let mut subcomplex = Vec::new();
    if let Some(gens) = &mut doc.subcomplex {
        let k = complex.as_ref().ok_or_else(|| Error::Schema("/subcomplex: needs a complex block".into()))?;
        for (i, gb) in gens.iter_mut().enumerate() {
            if !k.complex().degrees().contains(&gb.degree) {
                return Err(violation(format!("/subcomplex/{i}/degree"), format!("degree {} outside the complex", gb.degree)));
            }
            let m = matrix(coef, &gb.generators, k.complex().rank(gb.degree), &format!("/subcomplex/{i}/generators"))?;
            gb.generators = residues(&m);
            subcomplex.push((gb.degree, m));
        }
    }
    let params = doc.params.clone();
    let need_space = |what: &str| Error::Schema(format!("/params/{what}: needs a space block"));
    let closed = match &params.closed {
        Some(c) => {
            let x = space.as_ref().ok_or_else(|| need_space("closed"))?;
            let s = points_of(x, c, "/params/closed")?;
            if !x.is_closed(s) {
                return Err(violation("/params/closed", format!("{} is not closed", x.describe(s))));
            }
            Some(s)
        }
        None => None,
    };
    let seed_points = match &params.seed_points {
        Some(c) => Some(points_of(space.as_ref().ok_or_else(|| need_space("seed_points"))?, c, "/params/seed_points")?),
        None => None,
    };
    let filtration = match &params.filtration {
        Some(levels) => {
            let x = space.as_ref().ok_or_else(|| need_space("filtration"))?;
            let sets = levels
                .iter()
                .enumerate()
                .map(|(i, l)| points_of(x, l, &format!("/params/filtration/{i}")))
                .collect::<Result<Vec<_>>>()?;
            Some(Filtration::new(x, sets).map_err(|e| violation("/params/filtration", e))?)
        }
        None => None,
    };
    let cover = match &params.cover {
        Some(opens) => {
            let x = space.as_ref().ok_or_else(|| need_space("cover"))?;
            let sets = opens
                .iter()
                .enumerate()
                .map(|(i, l)| points_of(x, l, &format!("/params/cover/{i}")))
                .collect::<Result<Vec<_>>>()?;
            Some(Cover::new(x, sets).map_err(|e| violation("/params/cover", e))?)
        }
        None => None,
    };
    Ok(Validated {
        doc,
        coef,
        space,
        sheaf,
        group,
        module,
        complex,
        subcomplex,
        closed,
        seed_points,
        filtration,
        cover,
    })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub seed: u64,
    pub level_check: bool,
    pub timings: bool,
}

struct Run<'a> {
    v: &'a Validated,
    opts: RunOptions,
    assertions: Vec<Assertion>,
    timings: BTreeMap<String, f64>,
}

impl<'a> Run<'a> {
    fn assert(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    fn time<T>(&mut self, phase: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        let start = Instant::now();
        let out = f(self);
        if self.opts.timings {
            self.timings.insert(phase.to_string(), start.elapsed().as_secs_f64());
        }
        out
    }

    /// Records a group, compared against `params.expect` when present.
    fn group_result(&mut self, name: String, key: String, m: &FinMod) {
        let got = m.describe();
        match self.v.doc.params.expect.as_ref().and_then(|e| e.get(&key)) {
            Some(want) => {
                let pass = *want == got;
                self.assert(name, pass, format!("{got} (expected {want})"));
            }
            None => self.assert(name, true, got),
        }
    }

    fn sheaf(&self) -> Result<&'a WCSheaf> {
        self.v.sheaf.as_ref().ok_or_else(|| Error::Schema("/sheaf: required by this command".into()))
    }

    fn space(&self) -> Result<&'a FinSpace> {
        self.v.space.as_ref().ok_or_else(|| Error::Schema("/space: required by this command".into()))
    }

    fn complex(&self) -> Result<&'a GComplex> {
        self.v.complex.as_ref().ok_or_else(|| Error::Schema("/complex: required by this command".into()))
    }

    /// The given filtration, else the skeleton filtration of a face poset,
    /// else a searched one.
    fn filtration(&self) -> Result<Filtration> {
        if let Some(f) = &self.v.filtration {
            return Ok(f.clone());
        }
        let space = self.space()?;
        if space.check_face_poset().is_ok() {
            return skeleton_filtration(space);
        }
        search_filtration(self.sheaf()?, self.v.seed_points.unwrap_or(PointSet::EMPTY))
    }

    fn vector(&self, v: &[i64], len: usize, pointer: &str) -> Result<Vec<u64>> {
        if v.len() != len {
            return Err(violation(pointer, format!("{} entries, expected {len}", v.len())));
        }
        Ok(v.iter().map(|&x| self.v.coef.reduce(x)).collect())
    }

    fn cl_input(&self) -> Result<(GComplex, i64, Vec<u64>)> {
        let k = self.complex()?;
        let n = self.v.doc.params.n.ok_or_else(|| Error::Schema("/params/n: required".into()))?;
        let ctx = ClContext::new(k, n)?;
        let z = match &self.v.doc.params.z {
            Some(z) => self.vector(z, ctx.tot.rank(n), "/params/z")?,
            None => vec![0; ctx.tot.rank(n)],
        };
        if !ctx.tot.module(n + 1).is_zero_elem(&ctx.tot.diff(n).apply(&z)) {
            return Err(violation("/params/z", format!("not a cocycle of the total complex in degree {n}")));
        }
        Ok((k.clone(), n, z))
    }

    fn transition_input(&self, pipeline: &str) -> Result<TransitionInput> {
        Ok(match pipeline {
            "cellular" => TransitionInput::Cellular {
                sheaf: self.sheaf()?.clone(),
                filt: self.filtration()?,
            },
            "cech" => TransitionInput::Cech {
                sheaf: self.sheaf()?.clone(),
                cover: self.v.cover.clone().ok_or_else(|| Error::Schema("/params/cover: required".into()))?,
            },
            "group-cohomology" => TransitionInput::GroupCohomology {
                module: self.v.module.clone().ok_or_else(|| Error::Schema("/module: required".into()))?,
                p_max: self.v.doc.params.p_max.unwrap_or(2),
            },
            "cl" => {
                let (complex, n, z) = self.cl_input()?;
                TransitionInput::Cl { complex, n, z }
            }
            other => return Err(violation("/params/pipeline", format!("unknown pipeline {other:?}"))),
        })
    }

    fn level_check(&mut self, pipeline: &str) -> Result<()> {
        if self.v.coef.m() < 2 {
            return Err(violation("/coefficients/m", "the level check needs m ≥ 2"));
        }
        let input = self.transition_input(pipeline)?;
        let rep = self.time("level check", |_| level_transition_check(&input));
        match rep {
            Ok(rep) => {
                for c in rep.checks {
                    self.assert(format!("level {}→{}: {} (degree {})", rep.m + 1, rep.m, c.name, c.degree), c.pass, c.detail);
                }
            }
            Err(e) => self.assert("level check", false, e.to_string()),
        }
        Ok(())
    }

    fn cohomology(&mut self) -> Result<()> {
        let f = self.sheaf()?;
        let top = f.space().dim().max(0) + 1;
        self.time("cohomology", |r| {
            for q in 0..=top {
                let h = sheaf_cohomology(f, q);
                r.group_result(format!("H^{q}"), q.to_string(), &h);
            }
        });
        Ok(())
    }

    fn relative(&mut self) -> Result<()> {
        let f = self.sheaf()?;
        let y = self.v.closed.ok_or_else(|| Error::Schema("/params/closed: required by relative".into()))?;
        let top = f.space().dim().max(0) + 1;
        for q in 0..=top {
            match relative_cohomology(f, f.space().all(), y, q) {
                Ok(h) => self.group_result(format!("H^{q}(X, Y)"), q.to_string(), &h),
                Err(e) => self.assert(format!("H^{q}(X, Y)"), false, e.to_string()),
            }
        }
        Ok(())
    }

    fn search(&mut self) -> Result<()> {
        let f = self.sheaf()?;
        let seed = self.v.seed_points.unwrap_or(PointSet::EMPTY);
        match self.time("search", |_| search_filtration(f, seed)) {
            Ok(filt) => {
                self.assert("filtration found", true, filt.describe(f.space()).join(" ⊆ "));
                let rep = validate_filtration(f, &filt)?;
                for l in &rep.levels {
                    self.assert(format!("level {} concentrated", l.level), l.concentrated, format!("{:?}", l.cohomology));
                }
            }
            Err(e) => self.assert("filtration found", false, e.to_string()),
        }
        Ok(())
    }

    fn reduce(&mut self) -> Result<()> {
        let f = self.sheaf()?;
        let filt = match self.filtration() {
            Ok(filt) => filt,
            Err(e) => {
                self.assert("filtration", false, e.to_string());
                return Ok(());
            }
        };
        match self.time("reduce", |_| reduce_with_witness(f, &filt)) {
            Ok(w) => {
                for (i, s) in w.steps.iter().enumerate() {
                    self.assert(
                        format!("step {i}: {}", s.name),
                        s.quasi_iso.holds() && s.quasi_iso.consistent(),
                        format!("{:?} → {:?}", s.source, s.target),
                    );
                }
                for (k, inv) in w.terminal.cohomology_profile() {
                    let m = FinMod::from_exponents(self.v.coef, &inv);
                    self.group_result(format!("H^{k}(D)"), k.to_string(), &m);
                }
            }
            Err(e) => self.assert("reduction witness", false, e.to_string()),
        }
        Ok(())
    }

    fn cech(&mut self) -> Result<()> {
        let f = self.sheaf()?;
        let cover = self.v.cover.as_ref().ok_or_else(|| Error::Schema("/params/cover: required by cech".into()))?;
        let filts = match self.time("compatible filtrations", |_| build_compatible(f, cover)) {
            Ok(c) => {
                self.assert("compatible filtrations", true, format!("{} opens", cover.len()));
                c
            }
            Err(e) => {
                self.assert("compatible filtrations", false, e.to_string());
                return Ok(());
            }
        };
        let rep = self.time("cech", |_| verify_theorem22(f, cover, &filts))?;
        for ((k, t), (_, g)) in rep.total.iter().zip(&rep.global) {
            let (tm, gm) = (FinMod::from_exponents(self.v.coef, t), FinMod::from_exponents(self.v.coef, g));
            self.assert(
                format!("H^{k}(Tot) = H^{k}(X)"),
                t == g,
                format!("{} vs {}", tm.describe(), gm.describe()),
            );
        }
        Ok(())
    }

    fn group_cohomology(&mut self) -> Result<()> {
        let m = self.v.module.as_ref().ok_or_else(|| Error::Schema("/module: required by group-cohomology".into()))?;
        let p_max = self.v.doc.params.p_max.unwrap_or(2);
        self.time("group cohomology", |r| {
            for p in 0..=p_max {
                let h = group_cohomology(m, p);
                r.group_result(format!("H^{p}(G, M)"), p.to_string(), &h);
            }
        });
        Ok(())
    }

    fn cl(&mut self) -> Result<()> {
        let (k, n, z) = self.cl_input()?;
        let ctx = ClContext::new(&k, n)?;
        let rep = self.time("cl", |_| cl_classes(&ctx, &z))?;
        for c in &rep.classes {
            let detail = format!("{:?} in {} ({} indeterminacy generators)", c.value, c.target.describe(), c.indeterminacy.rows());
            let name = format!("cl^{}", c.j);
            let key = format!("cl{}", c.j);
            if !c.defined {
                self.assert(name, true, format!("undefined: a lower class is nonzero; {detail}"));
                continue;
            }
            match self.v.doc.params.expect.as_ref().and_then(|e| e.get(&key)) {
                Some(w) => {
                    let pass = (w == "0") == c.is_zero();
                    self.assert(name, pass, format!("{detail} (expected {w})"));
                }
                None => self.assert(name, true, detail),
            }
        }
        if n >= 2 && rep.classes.len() > 2 && rep.classes[0].is_zero() && rep.classes[1].is_zero() {
            let jr = self.time("splitting dependence", |_| jannsen_consistency(&k, n - 2, &z))?;
            for c in &jr.checks {
                self.assert(
                    format!("d2({:?}) = -[c*chi]", c.splitting),
                    c.holds,
                    format!("d2 = {:?}, pullback class = {:?}", c.d2, c.pullback),
                );
            }
        }
        Ok(())
    }

    fn theorem31(&mut self) -> Result<()> {
        let b = self.complex()?.clone();
        let n0 = self.v.doc.params.n0.unwrap_or(0);
        let t = Triangle::from_subcomplex(b, &self.v.subcomplex, n0).map_err(|e| violation("/subcomplex", e))?;
        let s = match &self.v.doc.params.splitting {
            Some(s) => {
                let (q, _) = t.q()?;
                self.vector(s, q.module().rank(), "/params/splitting")?
            }
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
                t.random_splitting(rng.gen())?
            }
        };
        let rep = self.time("theorem31", |_| theorem31_pipeline(&t, &s))?;
        self.assert("κ well defined", rep.kappa_well_defined, "");
        for a in &rep.arrows {
            self.assert(format!("{} is a morphism", a.arrow), a.holds(), format!("squares {:?}, equivariant {}", a.squares, a.equivariant));
        }
        for (n, e) in &rep.exactness {
            self.assert(format!("{n} exact"), e.iter().all(|&b| b), format!("{e:?}"));
        }
        let detail = match (&rep.e_chi, &rep.e4) {
            (Some(a), Some(b)) => format!("e_χ = {:?}, e₄ = {:?} in {}", a.value, b.value, a.group.describe()),
            _ => "classes not computed".into(),
        };
        self.assert("e_χ = e₄", rep.identity_holds() == Some(true), detail);
        Ok(())
    }

    fn pipeline_of_doc(&self) -> &'static str {
        let v = self.v;
        match (v.doc.params.pipeline.as_deref(), &v.complex, &v.module, &v.cover) {
            (Some("cech"), ..) => "cech",
            (Some("cl"), ..) => "cl",
            (Some("group-cohomology"), ..) => "group-cohomology",
            (Some("cellular"), ..) => "cellular",
            (Some(_), ..) => "unknown",
            (None, Some(_), _, _) => "cl",
            (None, None, Some(_), _) => "group-cohomology",
            (None, None, None, Some(_)) => "cech",
            _ => "cellular",
        }
    }
}

/// Runs `command` on a validated document. Errors are input problems
/// (missing blocks, malformed parameters); failures of the mathematics are
/// reported as failing assertions.
pub fn run_pipeline(command: Command, v: &Validated, opts: RunOptions) -> Result<Report> {
    let mut run = Run {
        v,
        opts,
        assertions: Vec::new(),
        timings: BTreeMap::new(),
    };
    let outcome = match command {
        Command::Cohomology => run.cohomology(),
        Command::Relative => run.relative(),
        Command::SearchFiltration => run.search(),
        Command::Reduce => run.reduce(),
        Command::Cech => run.cech(),
        Command::GroupCohomology => run.group_cohomology(),
        Command::Cl => run.cl(),
        Command::Theorem31 => run.theorem31(),
        Command::TransitionCheck => {
            let p = run.pipeline_of_doc();
            run.level_check(p)
        }
    };
    match outcome {
        Err(e @ (Error::Schema(_) | Error::InvariantViolation { .. })) => return Err(e),
        Err(e) => run.assert(command.name(), false, e.to_string()),
        Ok(()) => {}
    }
    if opts.level_check && command != Command::TransitionCheck {
        let p = match command {
            Command::Cech => "cech",
            Command::GroupCohomology => "group-cohomology",
            Command::Cl => "cl",
            Command::Theorem31 => {
                return Err(violation("/params", "--level-check is not available for theorem31"));
            }
            _ => "cellular",
        };
        match run.level_check(p) {
            Err(e @ (Error::Schema(_) | Error::InvariantViolation { .. })) => return Err(e),
            Err(e) => run.assert("level check", false, e.to_string()),
            Ok(()) => {}
        }
    }
    let canonical = serde_json::to_vec(&v.doc).map_err(|e| Error::Schema(e.to_string()))?;
    Ok(Report {
        command: command.name().to_string(),
        input_hash: hex::encode(Sha256::digest(&canonical)),
        seed: opts.seed,
        assertions: run.assertions,
        timings: run.timings,
    })
}

#[derive(Debug, Parser)]
#[command(name = "cellcoh", version, about = "Exact cohomology computations over Z/l^m")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Input document (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Override the coefficient prime.
    #[arg(long)]
    pub l: Option<u64>,
    /// Override the coefficient exponent.
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also compare the computation with its reduction to level m-1.
    #[arg(long)]
    pub level_check: bool,
    /// Record wall-clock timings in the report (makes it non-reproducible).
    #[arg(long)]
    pub timings: bool,
}

/// Exit codes: 0 when every assertion passes, 1 on an assertion failure,
/// 2 on an input error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let input_error = |e: &dyn std::fmt::Display| {
        eprintln!("input error: {e}");
        2
    };
    let bytes = match std::fs::read(&cli.input) {
        Ok(b) => b,
        Err(e) => return input_error(&format!("{}: {e}", cli.input.display())),
    };
    let mut doc = match parse_document(&bytes) {
        Ok(d) => d,
        Err(e) => return input_error(&e),
    };
    if let Some(l) = cli.l {
        doc.coefficients.l = l;
    }
    if let Some(m) = cli.m {
        doc.coefficients.m = m;
    }
    let v = match validate_input(&doc) {
        Ok(v) => v,
        Err(e) => return input_error(&e),
    };
    let opts = RunOptions {
        seed: cli.seed,
        level_check: cli.level_check,
        timings: cli.timings,
    };
    let report = match run_pipeline(cli.command, &v, opts) {
        Ok(r) => r,
        Err(e) => return input_error(&e),
    };
    let json = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    match &cli.report {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                eprintln!("cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{json}"),
    }
    for a in report.assertions.iter().filter(|a| !a.pass) {
        eprintln!("FAIL {}: {}", a.name, a.detail);
    }
    if report.passed() {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_doc() -> InputDocument {
        parse_document(
            br#"{
                "version": 1,
                "coefficients": {"l": 2, "m": 1},
                "space": {"points": ["p", "q", "x", "y"],
                          "order": [["p", "x"], ["p", "y"], ["q", "x"], ["q", "y"]]},
                "sheaf": "constant",
                "params": {"expect": {"0": "Z/2", "1": "Z/2"}}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn pseudo_circle_cohomology_report() {
        let v = validate_input(&circle_doc()).unwrap();
        let r = run_pipeline(Command::Cohomology, &v, RunOptions::default()).unwrap();
        assert!(r.passed(), "{r:#?}");
        assert_eq!(r.assertions[0].detail, "Z/2 (expected Z/2)");
        assert_eq!(r.assertions[1].detail, "Z/2 (expected Z/2)");
    }

    #[test]
    fn normalization_expands_the_constant_sheaf() {
        let v = validate_input(&circle_doc()).unwrap();
        let Some(SheafBlock::Explicit(ex)) = &v.doc.sheaf else { panic!() };
        assert_eq!(ex.stalks.len(), 4);
        assert_eq!(ex.restrictions.len(), 4);
        // Normalizing twice changes nothing.
        assert_eq!(validate_input(&v.doc).unwrap().doc, v.doc);
    }

    #[test]
    fn missing_transitivity_points_at_the_pair() {
        let doc = parse_document(
            br#"{"version": 1, "coefficients": {"l": 2, "m": 1},
                 "space": {"points": ["a", "b", "c"], "order": [["a", "b"], ["b", "c"]]}}"#,
        )
        .unwrap();
        match validate_input(&doc) {
            Err(Error::InvariantViolation { pointer, .. }) => assert_eq!(pointer, "/space/order/0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_functorial_chain_is_named() {
        let doc = parse_document(
            br#"{"version": 1, "coefficients": {"l": 3, "m": 1},
                 "space": {"points": ["a", "b", "c"], "order": [["a", "b"], ["b", "c"], ["a", "c"]]},
                 "sheaf": {"stalks": [{"rank": 1}, {"rank": 1}, {"rank": 1}],
                           "restrictions": [{"from": "a", "to": "b", "matrix": [[1]]},
                                            {"from": "b", "to": "c", "matrix": [[2]]},
                                            {"from": "a", "to": "c", "matrix": [[1]]}]}}"#,
        )
        .unwrap();
        match validate_input(&doc) {
            Err(Error::InvariantViolation { pointer, detail }) => {
                assert_eq!(pointer, "/sheaf/restrictions/2");
                assert!(detail.contains("a < b < c"), "{detail}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_errors_carry_a_pointer() {
        let e = parse_document(br#"{"version": 1, "coefficients": {"l": "two", "m": 1}}"#).unwrap_err();
        assert!(e.to_string().contains("/coefficients/l"), "{e}");
    }

    #[test]
    fn theorem31_with_zero_subcomplex() {
        let doc = parse_document(
            br#"{"version": 1, "coefficients": {"l": 2, "m": 2},
                 "group": {"cyclic": 2},
                 "complex": {"modules": [{"rank": 1}, {"rank": 1}], "differentials": [[[2]]]},
                 "subcomplex": []}"#,
        )
        .unwrap();
        let v = validate_input(&doc).unwrap();
        let r = run_pipeline(Command::Theorem31, &v, RunOptions::default()).unwrap();
        assert!(r.passed(), "{r:#?}");
        let last = r.assertions.last().unwrap();
        assert!(last.detail.starts_with("e_χ = [0], e₄ = [0]") || last.detail.contains("= []"), "{}", last.detail);
    }

    #[test]
    fn reports_are_deterministic() {
        let v = validate_input(&circle_doc()).unwrap();
        let opts = RunOptions {
            seed: 5,
            level_check: false,
            timings: false,
        };
        let a = serde_json::to_string(&run_pipeline(Command::Reduce, &v, opts).unwrap()).unwrap();
        let b = serde_json::to_string(&run_pipeline(Command::Reduce, &v, opts).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
