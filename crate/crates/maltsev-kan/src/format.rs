//! JSON file formats for algebras, truncated simplicial algebras and
//! simplicial homomorphisms.
//!
//! Parsing validates eagerly: a value returned from here has passed every
//! structural check, so nothing downstream needs to re-check it.
//! Serialization is compact and deterministic, and `serialize ∘ parse` is the
//! identity on serialized output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use maltsev_kan_core::simplicial::{
    SimplicialError, SimplicialHom, SimplicialParts, TruncatedSimplicialAlgebra, Violation,
};
use maltsev_kan_core::theory::{SyntaxError, TheoryError};
use maltsev_kan_core::{Elem, FiniteAlgebra, Signature, Term};
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: syntax error: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{}: {at}: maltsev_term: {source}", path.display())]
    Term { path: PathBuf, at: String, source: SyntaxError },
    #[error("{}: {at}: {message}", path.display())]
    Shape { path: PathBuf, at: String, message: String },
    #[error("{}: {at}: {source}", path.display())]
    Algebra { path: PathBuf, at: String, source: TheoryError },
    #[error("{}: {source}", path.display())]
    Simplicial { path: PathBuf, source: SimplicialError },
    #[error("{}: simplicial identities fail: {violation} ({count} violations in total)", path.display())]
    Validation { path: PathBuf, violation: Violation, count: usize },
    #[error("{}: unrecognized document, expected an algebra, simplicial algebra or homomorphism", path.display())]
    UnknownDocument { path: PathBuf },
}

impl FormatError {
    /// True for errors in the mathematical content of a well-formed file, as
    /// opposed to unreadable or malformed input.
    pub fn is_validation(&self) -> bool {
        matches!(self, FormatError::Algebra { .. } | FormatError::Simplicial { .. } | FormatError::Validation { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperationDoc {
    name: String,
    arity: usize,
}

/// Operation tables keyed by name, serialized in signature order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Tables(Vec<(String, Vec<Elem>)>);

impl Serialize for Tables {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (name, table) in &self.0 {
            map.serialize_entry(name, table)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Tables {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct TablesVisitor;
        impl<'de> Visitor<'de> for TablesVisitor {
            type Value = Tables;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping operation names to tables")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Tables, A::Error> {
                let mut out: Vec<(String, Vec<Elem>)> = Vec::new();
                while let Some((name, table)) = access.next_entry::<String, Vec<Elem>>()? {
                    if out.iter().any(|(n, _)| *n == name) {
                        return Err(serde::de::Error::custom(format!("table {name:?} given twice")));
                    }
                    out.push((name, table));
                }
                Ok(Tables(out))
            }
        }
        deserializer.deserialize_map(TablesVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraDoc {
    name: String,
    carrier: usize,
    signature: Vec<OperationDoc>,
    tables: Tables,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    maltsev_term: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimplicialDoc {
    #[serde(rename = "N")]
    top: usize,
    levels: Vec<AlgebraDoc>,
    faces: Vec<Vec<Vec<Elem>>>,
    degeneracies: Vec<Vec<Vec<Elem>>>,
}

/// A homomorphism file: source and target are paths to simplicial files,
/// relative to the directory of the homomorphism file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDocument {
    pub source: String,
    pub target: String,
    pub maps: Vec<Vec<Elem>>,
}

/// A parsed homomorphism file together with the resolved paths.
#[derive(Clone, Debug)]
pub struct LoadedHom {
    pub hom: SimplicialHom,
    pub document: HomDocument,
    pub source_path: PathBuf,
    pub target_path: PathBuf,
}

/// Which kind of document a file holds, judged by its keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocumentKind {
    Algebra,
    Simplicial,
    Hom,
}

fn json<'a, T: Deserialize<'a>>(path: &Path, text: &'a str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|source| FormatError::Json { path: path.to_owned(), source })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("documents serialize")
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_owned(), source })
}

/// Writes `text` and a trailing newline.
pub fn write(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, format!("{text}\n")).map_err(|source| FormatError::Io { path: path.to_owned(), source })
}

pub fn document_kind(path: &Path, text: &str) -> Result<DocumentKind, FormatError> {
    let value: serde_json::Value = json(path, text)?;
    let has = |key: &str| value.get(key).is_some();
    if has("maps") {
        Ok(DocumentKind::Hom)
    } else if has("N") {
        Ok(DocumentKind::Simplicial)
    } else if has("carrier") {
        Ok(DocumentKind::Algebra)
    } else {
        Err(FormatError::UnknownDocument { path: path.to_owned() })
    }
}

fn algebra_from_doc(path: &Path, at: &str, doc: AlgebraDoc) -> Result<FiniteAlgebra, FormatError> {
    let shape = |message: String| FormatError::Shape { path: path.to_owned(), at: at.to_owned(), message };
    let theory = |source: TheoryError| FormatError::Algebra { path: path.to_owned(), at: at.to_owned(), source };
    let signature = Signature::new(doc.signature.iter().map(|op| (op.name.clone(), op.arity))).map_err(theory)?;
    let mut given = doc.tables.0;
    if let Some((extra, _)) = given.iter().find(|(name, _)| signature.index_of(name).is_none()) {
        return Err(shape(format!("table for {extra:?}, which is not in the signature")));
    }
    let mut tables = Vec::with_capacity(signature.len());
    for op in signature.ops() {
        let position = given
            .iter()
            .position(|(name, _)| *name == op.name)
            .ok_or_else(|| shape(format!("no table for operation {:?}", op.name)))?;
        tables.push(given.swap_remove(position).1);
    }
    let mut alg = FiniteAlgebra::new(doc.name, signature, doc.carrier, tables).map_err(theory)?;
    if let Some(text) = doc.maltsev_term {
        let term = Term::parse(&text).map_err(|source| FormatError::Term {
            path: path.to_owned(),
            at: at.to_owned(),
            source,
        })?;
        alg = alg.with_maltsev_term(term).map_err(theory)?;
    }
    Ok(alg)
}

fn algebra_to_doc(alg: &FiniteAlgebra) -> AlgebraDoc {
    AlgebraDoc {
        name: alg.name().to_owned(),
        carrier: alg.carrier(),
        signature: alg
            .signature()
            .ops()
            .iter()
            .map(|op| OperationDoc { name: op.name.clone(), arity: op.arity })
            .collect(),
        tables: Tables(
            alg.signature().ops().iter().zip(alg.tables()).map(|(op, t)| (op.name.clone(), t.clone())).collect(),
        ),
        maltsev_term: alg.maltsev_term().map(|t| t.to_string()),
    }
}

/// Parses an algebra document; `path` is only used in error messages.
pub fn parse_algebra(path: &Path, text: &str) -> Result<FiniteAlgebra, FormatError> {
    algebra_from_doc(path, "algebra", json(path, text)?)
}

pub fn serialize_algebra(alg: &FiniteAlgebra) -> String {
    to_json(&algebra_to_doc(alg))
}

/// Parses a simplicial document and runs the full validator.
pub fn parse_simplicial(path: &Path, text: &str) -> Result<TruncatedSimplicialAlgebra, FormatError> {
    let doc: SimplicialDoc = json(path, text)?;
    if doc.levels.len() != doc.top + 1 {
        return Err(FormatError::Shape {
            path: path.to_owned(),
            at: "levels".into(),
            message: format!("N = {} needs {} levels, found {}", doc.top, doc.top + 1, doc.levels.len()),
        });
    }
    let levels = doc
        .levels
        .into_iter()
        .enumerate()
        .map(|(n, level)| algebra_from_doc(path, &format!("levels[{n}]"), level))
        .collect::<Result<Vec<_>, _>>()?;
    let parts = SimplicialParts { levels, faces: doc.faces, degeneracies: doc.degeneracies };
    let x = TruncatedSimplicialAlgebra::new(parts)
        .map_err(|source| FormatError::Simplicial { path: path.to_owned(), source })?;
    let report = x.validate();
    if let Some(&violation) = report.violations.first() {
        return Err(FormatError::Validation { path: path.to_owned(), violation, count: report.violations.len() });
    }
    Ok(x)
}

pub fn serialize_simplicial(x: &TruncatedSimplicialAlgebra) -> String {
    let parts = x.parts();
    to_json(&SimplicialDoc {
        top: x.top(),
        levels: parts.levels.iter().map(algebra_to_doc).collect(),
        faces: parts.faces.clone(),
        degeneracies: parts.degeneracies.clone(),
    })
}

/// Parses a homomorphism document, loading source and target relative to
/// the directory containing `path`.
pub fn parse_hom(path: &Path, text: &str) -> Result<LoadedHom, FormatError> {
    let document: HomDocument = json(path, text)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let source_path = base.join(&document.source);
    let target_path = base.join(&document.target);
    let source = load_simplicial(&source_path)?;
    let target = load_simplicial(&target_path)?;
    let hom = SimplicialHom::new(source, target, document.maps.clone())
        .map_err(|source| FormatError::Simplicial { path: path.to_owned(), source })?;
    Ok(LoadedHom { hom, document, source_path, target_path })
}

pub fn serialize_hom(document: &HomDocument) -> String {
    to_json(document)
}

pub fn load_algebra(path: &Path) -> Result<FiniteAlgebra, FormatError> {
    parse_algebra(path, &read(path)?)
}

pub fn load_simplicial(path: &Path) -> Result<TruncatedSimplicialAlgebra, FormatError> {
    parse_simplicial(path, &read(path)?)
}

pub fn load_hom(path: &Path) -> Result<LoadedHom, FormatError> {
    parse_hom(path, &read(path)?)
}

pub fn load_kind(path: &Path) -> Result<(DocumentKind, String), FormatError> {
    let text = read(path)?;
    Ok((document_kind(path, &text)?, text))
}

/// Writes `f` as a homomorphism file at `path` plus its source and target
/// as simplicial files named `source_name` and `target_name` beside it.
pub fn write_hom(path: &Path, f: &SimplicialHom, source_name: &str, target_name: &str) -> Result<(), FormatError> {
    let base = path.parent().unwrap_or(Path::new(""));
    write(&base.join(source_name), &serialize_simplicial(f.source()))?;
    write(&base.join(target_name), &serialize_simplicial(f.target()))?;
    let document = HomDocument { source: source_name.into(), target: target_name.into(), maps: f.maps().to_vec() };
    write(path, &serialize_hom(&document))
}
