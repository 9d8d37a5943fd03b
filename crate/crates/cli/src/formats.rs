//! JSON file formats.
//!
//! Rationals are always canonical lowest-terms strings (`"3/4"`, `"2"`,
//! `"-1/3"`). Writers emit compact JSON with a trailing newline and keep
//! every collection in a fixed order, so equal values serialize to equal
//! bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::ser::{SerializeMap, SerializeSeq};
use num_traits::Zero;
use serde::{Deserialize, Serialize, Serializer};

use isoforge_core::cayley::{CayleyError, CayleyTable};
use isoforge_core::free_space::{BallSymmetry, TransportCertificate};
use isoforge_core::group::{GroupError, Perm, PermutationGroup};
use isoforge_core::metric::{FiniteMetricSpace, MetricError};
use isoforge_core::rational::{format_rational, parse_rational, RationalParseError, Q};
use isoforge_core::realization::{BlockSpace, Embedding, PointLabel};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Rational(#[from] RationalParseError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
    #[error("unknown point label {0:?}")]
    UnknownLabel(String),
    #[error("{0}")]
    Shape(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn q_str(q: &Q) -> String {
    format_rational(q)
}

fn to_text<T: Serialize + ?Sized>(value: &T) -> String {
    let mut text = serde_json::to_string(value).expect("in-memory serialization");
    text.push('\n');
    text
}

// ---------------------------------------------------------------- spaces

/// Distance rows written straight from the value table, without building a
/// string per entry.
struct DistRows<'a> {
    space: &'a FiniteMetricSpace,
    values: Vec<String>,
}

impl<'a> DistRows<'a> {
    fn new(space: &'a FiniteMetricSpace) -> Self {
        DistRows { space, values: space.values().iter().map(q_str).collect() }
    }
}

struct DistRow<'a> {
    codes: &'a [u32],
    values: &'a [String],
}

impl Serialize for DistRow<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.codes.len()))?;
        for &c in self.codes {
            seq.serialize_element(&self.values[c as usize])?;
        }
        seq.end()
    }
}

impl Serialize for DistRows<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = self.space.len();
        let mut seq = s.serialize_seq(Some(n))?;
        for i in 0..n {
            seq.serialize_element(&DistRow { codes: self.space.row_codes(i), values: &self.values })?;
        }
        seq.end()
    }
}

/// Serializable view of a space: `{"points": [...], "dist": [[...]]}`.
pub struct SpaceJson<'a>(pub &'a FiniteMetricSpace);

impl Serialize for SpaceJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("points", self.0.points())?;
        map.serialize_entry("dist", &DistRows::new(self.0))?;
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    points: Vec<String>,
    dist: Vec<Vec<String>>,
}

fn space_from_raw(raw: RawSpace) -> Result<FiniteMetricSpace, FormatError> {
    let n = raw.points.len();
    if raw.dist.len() != n || raw.dist.iter().any(|r| r.len() != n) {
        return Err(MetricError::NotSquare { points: n }.into());
    }
    // Identical strings parse to identical values; parse each once.
    let mut cache: BTreeMap<&str, Q> = BTreeMap::new();
    let mut rows = Vec::with_capacity(n);
    for row in &raw.dist {
        let mut out = Vec::with_capacity(n);
        for text in row {
            let v = match cache.get(text.as_str()) {
                Some(v) => v.clone(),
                None => {
                    let v = parse_rational(text)?;
                    cache.insert(text, v.clone());
                    v
                }
            };
            out.push(v);
        }
        rows.push(out);
    }
    Ok(FiniteMetricSpace::new(raw.points, rows)?)
}

pub fn parse_space(text: &str) -> Result<FiniteMetricSpace, FormatError> {
    space_from_raw(serde_json::from_str(text)?)
}

pub fn write_space(space: &FiniteMetricSpace) -> String {
    to_text(&SpaceJson(space))
}

// ---------------------------------------------------------------- groups

#[derive(Serialize)]
struct GroupOut<'a> {
    degree: usize,
    elements: Vec<&'a [usize]>,
    generators: Vec<&'a [usize]>,
}

fn group_out(g: &PermutationGroup) -> GroupOut<'_> {
    GroupOut {
        degree: g.degree(),
        elements: g.elements().iter().map(Perm::images).collect(),
        generators: g.generators().iter().map(Perm::images).collect(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    degree: usize,
    elements: Vec<Vec<usize>>,
    /// Accepted for symmetry with the writer; generators are recomputed.
    #[serde(default)]
    #[allow(dead_code)]
    generators: Option<Vec<Vec<usize>>>,
}

/// Parses a group file. The element list must already be a group: it is
/// checked for bijectivity, the identity and closure, never completed.
pub fn parse_group(text: &str) -> Result<PermutationGroup, FormatError> {
    let raw: RawGroup = serde_json::from_str(text)?;
    let elements = raw.elements.into_iter().map(Perm::new).collect::<Result<Vec<_>, _>>()?;
    Ok(PermutationGroup::from_elements(raw.degree, elements)?)
}

pub fn write_group(g: &PermutationGroup) -> String {
    to_text(&group_out(g))
}

// ------------------------------------------------------------- molecules

/// A parsed molecule file: its optional embedded space and the nonzero
/// coefficients by label. Labels not listed have coefficient 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoleculeFile {
    pub space: Option<FiniteMetricSpace>,
    pub coeffs: BTreeMap<String, Q>,
}

impl MoleculeFile {
    /// Coefficients in the point order of `space`.
    pub fn coeffs_on(&self, space: &FiniteMetricSpace) -> Result<Vec<Q>, FormatError> {
        if let Some(label) = self.coeffs.keys().find(|l| space.index_of(l).is_none()) {
            return Err(FormatError::UnknownLabel(label.clone()));
        }
        Ok(space
            .points()
            .iter()
            .map(|l| self.coeffs.get(l).cloned().unwrap_or_else(|| Q::zero()))
            .collect())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpaceRef {
    Path(String),
    Inline(RawSpace),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMolecule {
    #[serde(default)]
    space: Option<SpaceRef>,
    coeffs: BTreeMap<String, String>,
}

/// Parses a molecule file. A `"space"` given as a string is a path,
/// resolved against `dir`.
pub fn parse_molecule(text: &str, dir: Option<&Path>) -> Result<MoleculeFile, FormatError> {
    let raw: RawMolecule = serde_json::from_str(text)?;
    let space = match raw.space {
        None => None,
        Some(SpaceRef::Inline(s)) => Some(space_from_raw(s)?),
        Some(SpaceRef::Path(p)) => {
            let path = dir.map_or_else(|| Path::new(&p).to_path_buf(), |d| d.join(&p));
            let text = std::fs::read_to_string(&path)
                .map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
            Some(parse_space(&text)?)
        }
    };
    let mut coeffs = BTreeMap::new();
    for (label, value) in raw.coeffs {
        let v = parse_rational(&value)?;
        if !v.is_zero() {
            coeffs.insert(label, v);
        }
    }
    Ok(MoleculeFile { space, coeffs })
}

struct CoeffMap<'a>(&'a BTreeMap<String, Q>);

impl Serialize for CoeffMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, &q_str(v))?;
        }
        map.end()
    }
}

/// Writes a molecule with its space inline, or without a space.
pub fn write_molecule(m: &MoleculeFile) -> String {
    #[derive(Serialize)]
    struct Out<'a> {
        #[serde(skip_serializing_if = "Option::is_none")]
        space: Option<SpaceJson<'a>>,
        coeffs: CoeffMap<'a>,
    }
    to_text(&Out { space: m.space.as_ref().map(SpaceJson), coeffs: CoeffMap(&m.coeffs) })
}

// ---------------------------------------------------------- certificates

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Shipment {
    from: String,
    to: String,
    amt: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCertificate {
    value: String,
    plan: Vec<Shipment>,
    potential: BTreeMap<String, String>,
}

pub fn write_certificate(space: &FiniteMetricSpace, cert: &TransportCertificate) -> String {
    let raw = RawCertificate {
        value: q_str(&cert.value),
        plan: cert
            .plan
            .iter()
            .map(|(p, r, f)| Shipment { from: space.label(*p).to_string(), to: space.label(*r).to_string(), amt: q_str(f) })
            .collect(),
        potential: (0..space.len()).map(|x| (space.label(x).to_string(), q_str(&cert.potential[x]))).collect(),
    };
    to_text(&raw)
}

pub fn parse_certificate(space: &FiniteMetricSpace, text: &str) -> Result<TransportCertificate, FormatError> {
    let raw: RawCertificate = serde_json::from_str(text)?;
    let index = |l: &str| space.index_of(l).ok_or_else(|| FormatError::UnknownLabel(l.to_string()));
    let plan = raw
        .plan
        .iter()
        .map(|s| Ok((index(&s.from)?, index(&s.to)?, parse_rational(&s.amt)?)))
        .collect::<Result<Vec<_>, FormatError>>()?;
    let mut potential = vec![Q::zero(); space.len()];
    if raw.potential.len() != space.len() {
        return Err(FormatError::Shape("potential must list every point".into()));
    }
    for (label, v) in &raw.potential {
        potential[index(label)?] = parse_rational(v)?;
    }
    Ok(TransportCertificate { plan, potential, value: parse_rational(&raw.value)? })
}

// ------------------------------------------------------------ gadgets

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum LabelJson {
    Base { x: String, j: usize },
    Tuple { xs: Vec<String> },
    Tag,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsJson {
    n: usize,
    c: Vec<String>,
    r: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    z: Option<Vec<String>>,
}

/// Serializable view of a gadget space: the space JSON plus `"labels"` and
/// `"params"`.
pub struct BlockJson<'a>(pub &'a BlockSpace);

impl Serialize for BlockJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let b = self.0;
        let name = |x: usize| b.base.label(x).to_string();
        let labels: Vec<LabelJson> = b
            .labels
            .iter()
            .map(|l| match l {
                PointLabel::Base { x, copy } => LabelJson::Base { x: name(*x), j: *copy },
                PointLabel::Tuple(xs) => LabelJson::Tuple { xs: xs.iter().map(|&x| name(x)).collect() },
                PointLabel::Tag => LabelJson::Tag,
            })
            .collect();
        let params = ParamsJson {
            n: b.arity,
            c: b.constants.iter().map(q_str).collect(),
            r: q_str(&b.scale),
            z: b.seed.as_ref().map(|z| z.iter().map(|&x| name(x)).collect()),
        };
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("points", b.space.points())?;
        map.serialize_entry("dist", &DistRows::new(&b.space))?;
        map.serialize_entry("labels", &labels)?;
        map.serialize_entry("params", &params)?;
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    points: Vec<String>,
    dist: Vec<Vec<String>>,
    labels: Vec<LabelJson>,
    params: ParamsJson,
}

/// Parses a gadget file. The base space is read back from copy 0, which
/// carries it unscaled.
pub fn parse_block(text: &str) -> Result<BlockSpace, FormatError> {
    let raw: RawBlock = serde_json::from_str(text)?;
    let labels_json = raw.labels;
    let params = raw.params;
    let space = space_from_raw(RawSpace { points: raw.points, dist: raw.dist })?;
    if labels_json.len() != space.len() {
        return Err(FormatError::Shape("labels must parallel points".into()));
    }
    let copy0: Vec<(usize, String)> = labels_json
        .iter()
        .enumerate()
        .filter_map(|(i, l)| match l {
            LabelJson::Base { x, j: 0 } => Some((i, x.clone())),
            _ => None,
        })
        .collect();
    let base = space
        .restrict(&copy0.iter().map(|(i, _)| *i).collect::<Vec<_>>())
        .relabel(copy0.iter().map(|(_, x)| x.clone()).collect())?;
    let index = |x: &str| base.index_of(x).ok_or_else(|| FormatError::UnknownLabel(x.to_string()));
    let labels = labels_json
        .iter()
        .map(|l| {
            Ok(match l {
                LabelJson::Base { x, j } => PointLabel::Base { x: index(x)?, copy: *j },
                LabelJson::Tuple { xs } => PointLabel::Tuple(xs.iter().map(|x| index(x)).collect::<Result<_, _>>()?),
                LabelJson::Tag => PointLabel::Tag,
            })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    let constants = params.c.iter().map(|c| parse_rational(c)).collect::<Result<Vec<_>, _>>()?;
    let seed = params
        .z
        .map(|z| z.iter().map(|x| index(x)).collect::<Result<Vec<_>, _>>())
        .transpose()?;
    let block = BlockSpace {
        space,
        labels,
        base,
        arity: params.n,
        constants,
        scale: parse_rational(&params.r)?,
        seed,
    };
    let expected = block.base_len() * (block.arity + 1)
        + if block.arity == 0 { 0 } else { block.base_len().pow(block.arity as u32) }
        + usize::from(block.has_tag());
    let layout_ok = block.labels.len() == expected
        && block.labels.iter().enumerate().all(|(i, l)| block.index_of(l) == Some(i));
    if !layout_ok {
        return Err(FormatError::Shape("labels do not follow the gadget layout".into()));
    }
    Ok(block)
}

pub fn write_block(b: &BlockSpace) -> String {
    to_text(&BlockJson(b))
}

#[derive(Serialize)]
struct EmbeddingOut<'a> {
    source: GroupOut<'a>,
    image: GroupOut<'a>,
    map: &'a [usize],
}

pub fn embedding_json(e: &Embedding) -> impl Serialize + '_ {
    EmbeddingOut { source: group_out(&e.source), image: group_out(&e.image), map: &e.map }
}

pub fn write_embedding(e: &Embedding) -> String {
    to_text(&embedding_json(e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEmbedding {
    source: RawGroup,
    image: RawGroup,
    map: Vec<usize>,
}

fn group_from_raw(raw: RawGroup) -> Result<PermutationGroup, FormatError> {
    let elements = raw.elements.into_iter().map(Perm::new).collect::<Result<Vec<_>, _>>()?;
    Ok(PermutationGroup::from_elements(raw.degree, elements)?)
}

pub fn parse_embedding(text: &str) -> Result<Embedding, FormatError> {
    let raw: RawEmbedding = serde_json::from_str(text)?;
    Ok(Embedding { source: group_from_raw(raw.source)?, image: group_from_raw(raw.image)?, map: raw.map })
}

/// `{"block": ..., "embedding": ...}`, the output of `realize`.
pub fn write_realization(block: &BlockSpace, embedding: &Embedding) -> String {
    #[derive(Serialize)]
    struct Out<'a, E: Serialize> {
        block: BlockJson<'a>,
        embedding: E,
    }
    to_text(&Out { block: BlockJson(block), embedding: embedding_json(embedding) })
}

/// Output of `group2space --realize`: the word-metric space, its left
/// translations, the realization, and an isomorphism witness from the
/// translations onto the isometry group of the realized space
/// (`witness[i]` indexes that group's elements).
pub fn write_group_realization(
    space: &FiniteMetricSpace,
    translations: &PermutationGroup,
    block: &BlockSpace,
    embedding: &Embedding,
    isometry_group: &PermutationGroup,
    witness: Option<&[usize]>,
) -> String {
    #[derive(Serialize)]
    struct Iso<'a> {
        isometry_group: GroupOut<'a>,
        witness: Option<&'a [usize]>,
    }
    #[derive(Serialize)]
    struct Out<'a, E: Serialize> {
        space: SpaceJson<'a>,
        group: GroupOut<'a>,
        block: BlockJson<'a>,
        embedding: E,
        isomorphism: Iso<'a>,
    }
    to_text(&Out {
        space: SpaceJson(space),
        group: group_out(translations),
        block: BlockJson(block),
        embedding: embedding_json(embedding),
        isomorphism: Iso { isometry_group: group_out(isometry_group), witness },
    })
}

// ---------------------------------------------------- other input files

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    elements: Vec<String>,
    table: Vec<Vec<String>>,
}

/// Cayley table file: `{"elements": ["e","a"], "table": [["e","a"],["a","e"]]}`
/// where `table[i][j]` names the product `elements[i]·elements[j]`.
pub fn parse_cayley_table(text: &str) -> Result<CayleyTable, FormatError> {
    let raw: RawTable = serde_json::from_str(text)?;
    let index: BTreeMap<&str, usize> = raw.elements.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
    let table = raw
        .table
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| index.get(e.as_str()).copied().ok_or_else(|| FormatError::UnknownLabel(e.clone())))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CayleyTable::new(raw.elements.clone(), table)?)
}

/// Katětov values file: `{"a": "1", "b": "3/2"}`, one entry per point.
pub fn parse_point_values(space: &FiniteMetricSpace, text: &str) -> Result<Vec<Q>, FormatError> {
    let raw: BTreeMap<String, String> = serde_json::from_str(text)?;
    if let Some(label) = raw.keys().find(|l| space.index_of(l).is_none()) {
        return Err(FormatError::UnknownLabel(label.clone()));
    }
    space
        .points()
        .iter()
        .map(|l| match raw.get(l) {
            Some(v) => Ok(parse_rational(v)?),
            None => Err(FormatError::Shape(format!("no value for point {l:?}"))),
        })
        .collect()
}

#[derive(Serialize)]
struct SymmetryOut {
    vertex_perm: Vec<usize>,
    matrix: Vec<Vec<String>>,
}

/// Ball symmetry listing: vertices as ordered label pairs, then each map.
pub fn write_ball_symmetries(
    space: &FiniteMetricSpace,
    pairs: &[(usize, usize)],
    symmetries: &[BallSymmetry],
    fixed_vector: Option<(&str, &str)>,
) -> String {
    #[derive(Serialize)]
    struct Vertex<'a> {
        from: &'a str,
        to: &'a str,
    }
    #[derive(Serialize)]
    struct Out<'a> {
        vertices: Vec<Vertex<'a>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        fixed_vector: Option<Vertex<'a>>,
        order: usize,
        symmetries: Vec<SymmetryOut>,
    }
    let out = Out {
        vertices: pairs.iter().map(|&(p, q)| Vertex { from: space.label(p), to: space.label(q) }).collect(),
        fixed_vector: fixed_vector.map(|(from, to)| Vertex { from, to }),
        order: symmetries.len(),
        symmetries: symmetries
            .iter()
            .map(|s| SymmetryOut {
                vertex_perm: s.vertex_perm.clone(),
                matrix: s.matrix.iter().map(|r| r.iter().map(q_str).collect()).collect(),
            })
            .collect(),
    };
    to_text(&out)
}
