//! File documents and their loading.
//!
//! Documents are plain serde types holding values in the textual encoding;
//! [`Loader`] turns them into validated objects. A `space` field may be
//! an inline space document, a registered streamed name wrapped as
//! `{"streamed": "qlo"}`, or a string path relative to the referring file.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::balls::{DirectedBallFamily, FormalBall};
use crate::distributors::Distributor;
use crate::ideals::{NetPresentation, StreamNet};
use crate::monadics::BatterySubspace;
use crate::numerics::ExtNonneg;
use crate::space::{prefix, streamed_by_name, FiniteSpace, SpaceRef};
use crate::weights::Weight;

/// Largest reduced denominator accepted in input files.
pub const DENOMINATOR_CAP: u64 = 1_000_000_000;

/// A load failure, located by file and by the path inside the document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadError {
    pub file: String,
    pub location: String,
    pub message: String,
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.location.is_empty() {
            write!(f, "{}: {}", self.file, self.message)
        } else {
            write!(f, "{}: at {}: {}", self.file, self.location, self.message)
        }
    }
}

impl std::error::Error for LoadError {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceDoc {
    Finite {
        points: Vec<String>,
        dist: Vec<Vec<String>>,
    },
    Streamed {
        streamed: String,
    },
}

/// A space given inline or by path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRefDoc {
    Path(String),
    Inline(SpaceDoc),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceRefDoc>,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TailDoc {
    Named(String),
    Streamed { streamed: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceRefDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prefix: Vec<String>,
    pub tail: TailDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallDoc {
    pub point: String,
    pub radius: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub ideal: WeightDoc,
    pub offset: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryDoc {
    pub space: SpaceRefDoc,
    pub members: Vec<WeightDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributorDoc {
    pub source: SpaceRefDoc,
    pub target: SpaceRefDoc,
    pub values: Vec<Vec<String>>,
}

/// Reads documents relative to a file, resolving nested space paths.
#[derive(Debug, Clone)]
pub struct Loader {
    file: PathBuf,
    /// Horizon used when a finite view of a streamed space is needed.
    pub horizon: usize,
}

impl Loader {
    pub fn new(file: impl Into<PathBuf>, horizon: usize) -> Self {
        Loader {
            file: file.into(),
            horizon,
        }
    }

    fn err(&self, location: impl Into<String>, message: impl ToString) -> LoadError {
        LoadError {
            file: self.file.display().to_string(),
            location: location.into(),
            message: message.to_string(),
        }
    }

    /// Reads and parses the loader's own file.
    pub fn read<T: DeserializeOwned>(&self) -> Result<T, LoadError> {
        let text = fs::read_to_string(&self.file).map_err(|e| self.err("", e))?;
        self.parse(&text)
    }

    pub fn parse<T: DeserializeOwned>(&self, text: &str) -> Result<T, LoadError> {
        serde_json::from_str(text)
            .map_err(|e| self.err(format!("line {} column {}", e.line(), e.column()), e))
    }

    fn nested(&self, path: &str) -> Loader {
        let base = self.file.parent().unwrap_or(Path::new("."));
        Loader::new(base.join(path), self.horizon)
    }

    pub fn value(&self, location: &str, text: &str) -> Result<ExtNonneg, LoadError> {
        ExtNonneg::parse_capped(text, DENOMINATOR_CAP).map_err(|e| self.err(location, e))
    }

    fn table(&self, location: &str, rows: &[Vec<String>]) -> Result<Vec<Vec<ExtNonneg>>, LoadError> {
        rows.iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, v)| self.value(&format!("{location}[{i}][{j}]"), v))
                    .collect()
            })
            .collect()
    }

    pub fn space(&self, location: &str, doc: &SpaceDoc) -> Result<SpaceRef, LoadError> {
        match doc {
            SpaceDoc::Finite { points, dist } => {
                let table = self.table(&format!("{location}dist"), dist)?;
                FiniteSpace::new(points.clone(), table)
                    .map(Arc::new)
                    .map_err(|e| self.err(location, e))
            }
            SpaceDoc::Streamed { streamed } => {
                let s = streamed_by_name(streamed)
                    .ok_or_else(|| self.err(format!("{location}streamed"), format!("unknown streamed space {streamed:?}")))?;
                let view = prefix(s.as_ref(), self.horizon).map_err(|e| self.err(location, e))?;
                Ok(Arc::new(view.space))
            }
        }
    }

    pub fn space_ref(&self, location: &str, doc: &SpaceRefDoc) -> Result<SpaceRef, LoadError> {
        match doc {
            SpaceRefDoc::Inline(doc) => self.space(&format!("{location}."), doc),
            SpaceRefDoc::Path(path) => {
                let inner = self.nested(path);
                let doc: SpaceDoc = inner.read()?;
                inner.space("", &doc)
            }
        }
    }

    /// A weight; `space` stands in when the document names none.
    pub fn weight(&self, location: &str, doc: &WeightDoc, space: Option<&SpaceRef>) -> Result<Weight, LoadError> {
        let space = match (&doc.space, space) {
            (Some(s), _) => self.space_ref(&format!("{location}space"), s)?,
            (None, Some(s)) => s.clone(),
            (None, None) => return Err(self.err(location, "weight has no \"space\"")),
        };
        let values = doc
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| self.value(&format!("{location}values[{i}]"), v))
            .collect::<Result<Vec<_>, _>>()?;
        Weight::new(space, values).map_err(|e| self.err(location, e))
    }

    pub fn ball(&self, doc: &BallDoc, space: &SpaceRef) -> Result<FormalBall, LoadError> {
        let point = space.index_of(&doc.point).map_err(|e| self.err("point", e))?;
        let radius = self.value("radius", &doc.radius)?;
        FormalBall::new(point, radius).map_err(|e| self.err("radius", e))
    }

    pub fn family(&self, doc: &FamilyDoc, space: Option<&SpaceRef>) -> Result<DirectedBallFamily, LoadError> {
        let ideal = self.weight("ideal.", &doc.ideal, space)?;
        let offset = self.value("offset", &doc.offset)?;
        DirectedBallFamily::new(ideal, offset).map_err(|e| self.err("", e))
    }

    pub fn battery(&self, doc: &BatteryDoc) -> Result<BatterySubspace, LoadError> {
        let space = self.space_ref("space", &doc.space)?;
        let members = doc
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| self.weight(&format!("members[{i}]."), m, Some(&space)))
            .collect::<Result<Vec<_>, _>>()?;
        BatterySubspace::new(&space, members).map_err(|e| self.err("members", e))
    }

    pub fn distributor(&self, doc: &DistributorDoc) -> Result<Distributor, LoadError> {
        let source = self.space_ref("source", &doc.source)?;
        let target = self.space_ref("target", &doc.target)?;
        let table = self.table("values", &doc.values)?;
        Distributor::new(source, target, table).map_err(|e| self.err("values", e))
    }

    pub fn net(&self, doc: &NetDoc) -> Result<NetPresentation, LoadError> {
        match &doc.tail {
            TailDoc::Named(t) if t == "constant" => {
                let space = doc
                    .space
                    .as_ref()
                    .ok_or_else(|| self.err("space", "an eventually constant net needs a finite space"))?;
                let space = self.space_ref("space", space)?;
                let labels: Vec<&str> = doc.prefix.iter().map(String::as_str).collect();
                NetPresentation::eventually_constant(&space, &labels).map_err(|e| self.err("prefix", e))
            }
            TailDoc::Named(t) => Err(self.err("tail", format!("unknown tail {t:?}"))),
            TailDoc::Streamed { streamed } => StreamNet::by_name(streamed)
                .map(NetPresentation::Streamed)
                .map_err(|e| self.err("tail.streamed", e)),
        }
    }
}

/// Space document for a finite space, as written by [`Loader::space`]'s inverse.
pub fn space_doc(space: &FiniteSpace) -> SpaceDoc {
    SpaceDoc::Finite {
        points: space.labels().to_vec(),
        dist: space
            .table()
            .iter()
            .map(|row| row.iter().map(ToString::to_string).collect())
            .collect(),
    }
}

pub fn weight_doc(phi: &Weight) -> WeightDoc {
    WeightDoc {
        space: Some(SpaceRefDoc::Inline(space_doc(phi.space()))),
        values: phi.values().iter().map(ToString::to_string).collect(),
    }
}
