//! JSON documents for polytopes, models and relation reports.
//!
//! ```json
//! {"model": {"dim": 2, "facets": ["A", "B", "C"],
//!            "vertices": [["A", "B"], ["B", "C"], ["A", "C"]]},
//!  "labels": {"A": [1, 0], "B": [0, 1], "C": [-1, -1]}}
//! ```
//!
//! A polytope document may carry `"exceptional": [...]`, in which case the
//! model is an isotropy model and exceptional facets carry no label.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::charmodel::{CharacteristicModel, IsotropyModel, ModelError};
use crate::chern::RelationVerification;
use crate::cobordism::{CobordismRelation, Construction};
use crate::lattice::IntVector;
use crate::orientation::{OmniorientedModel, OrientationDatum, OrientationError};
use crate::polytope::{ExceptionalMarking, Polytope, PolytopeError};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Orientation(#[from] OrientationError),
    #[error("orientation refers to unknown facet {0:?}")]
    UnknownOrientationFacet(String),
    #[error("an orientation table is only meaningful for characteristic models")]
    OrientationOnIsotropy,
    #[error("field {0:?} is not accepted by this command")]
    UnexpectedField(&'static str),
}

impl DocError {
    /// Whether the input is unusable as data (as opposed to well-formed data
    /// describing an invalid object).
    pub fn is_malformed(&self) -> bool {
        match self {
            DocError::Json(_)
            | DocError::UnknownOrientationFacet(_)
            | DocError::OrientationOnIsotropy
            | DocError::UnexpectedField(_) => true,
            DocError::Polytope(e) => matches!(
                e,
                PolytopeError::ZeroDimension
                    | PolytopeError::DuplicateFacet(_)
                    | PolytopeError::UnknownFacet(_)
                    | PolytopeError::FacetOutOfRange(_)
                    | PolytopeError::DuplicateVertex(_)
                    | PolytopeError::NoVertices
            ),
            DocError::Model(e) => matches!(
                e,
                ModelError::LabelCount { .. }
                    | ModelError::LabelLength { .. }
                    | ModelError::MissingLabel(_)
                    | ModelError::UnknownLabel(_)
                    | ModelError::LabelOnExceptional(_)
                    | ModelError::DimensionTooSmall
            ),
            DocError::Orientation(_) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeDoc {
    pub dim: usize,
    pub facets: Vec<String>,
    pub vertices: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exceptional: Option<Vec<String>>,
}

impl PolytopeDoc {
    pub fn from_polytope(p: &Polytope) -> Self {
        PolytopeDoc {
            dim: p.dim(),
            facets: p.facets().to_vec(),
            vertices: p.vertices().iter().map(|v| p.names(v)).collect(),
            exceptional: None,
        }
    }

    pub fn with_marking(mut self, p: &Polytope, m: &ExceptionalMarking) -> Self {
        self.exceptional = Some(m.facets().iter().map(|&f| p.facet_name(f).to_string()).collect());
        self
    }

    pub fn to_polytope(&self) -> Result<(Polytope, Option<ExceptionalMarking>), DocError> {
        let p = Polytope::new(self.dim, self.facets.clone(), self.vertices.clone())?;
        let marking = match &self.exceptional {
            Some(names) => {
                let mut seen = std::collections::BTreeSet::new();
                if let Some(dup) = names.iter().find(|n| !seen.insert(*n)) {
                    return Err(PolytopeError::DuplicateFacet(dup.clone()).into());
                }
                Some(ExceptionalMarking::from_names(&p, names)?)
            }
            None => None,
        };
        Ok((p, marking))
    }
}

/// Facet-name → label map that rejects repeated keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
#[serde(transparent)]
pub struct Labels(pub BTreeMap<String, IntVector>);

impl<'de> Deserialize<'de> for Labels {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Labels;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping facet ids to integer arrays")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Labels, A::Error> {
                let mut out = BTreeMap::new();
                while let Some((k, v)) = map.next_entry::<String, IntVector>()? {
                    if out.contains_key(&k) {
                        return Err(serde::de::Error::custom(format!("duplicate label for facet {k:?}")));
                    }
                    out.insert(k, v);
                }
                Ok(Labels(out))
            }
        }
        deserializer.deserialize_map(V)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientationEntry {
    /// Facets of one vertex, in some order.
    pub order: Vec<String>,
    /// Sign of that ordering.
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub model: PolytopeDoc,
    pub labels: Labels,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Vec<OrientationEntry>>,
}

/// A parsed model document.
#[derive(Debug, Clone)]
pub enum LoadedModel {
    Characteristic(OmniorientedModel),
    Isotropy(IsotropyModel),
}

impl ModelDoc {
    pub fn parse(text: &str) -> Result<Self, DocError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(&self) -> Result<LoadedModel, DocError> {
        let (p, marking) = self.model.to_polytope()?;
        match marking {
            Some(marking) => {
                if self.orientation.is_some() {
                    return Err(DocError::OrientationOnIsotropy);
                }
                Ok(LoadedModel::Isotropy(IsotropyModel::from_named(
                    p,
                    marking,
                    self.labels.0.clone(),
                )?))
            }
            None => {
                let orientation = match &self.orientation {
                    Some(entries) => {
                        let entries = entries
                            .iter()
                            .map(|e| {
                                let order = e
                                    .order
                                    .iter()
                                    .map(|n| {
                                        p.facet_index(n)
                                            .ok_or_else(|| DocError::UnknownOrientationFacet(n.clone()))
                                    })
                                    .collect::<Result<Vec<_>, _>>()?;
                                Ok((order, e.sign))
                            })
                            .collect::<Result<Vec<_>, DocError>>()?;
                        Some(OrientationDatum::from_orderings(&p, &entries)?)
                    }
                    None => None,
                };
                let model = CharacteristicModel::from_named(p, self.labels.0.clone())?;
                let omni = match orientation {
                    Some(o) => OmniorientedModel::new(model, o)?,
                    None => OmniorientedModel::canonical(model),
                };
                Ok(LoadedModel::Characteristic(omni))
            }
        }
    }

    /// The polytope with its labels in facet order, without checking label
    /// lengths against the dimension.
    pub fn labelled_polytope(&self) -> Result<(Polytope, Vec<IntVector>), DocError> {
        let (p, marking) = self.model.to_polytope()?;
        if marking.is_some() {
            return Err(DocError::UnexpectedField("exceptional"));
        }
        if self.orientation.is_some() {
            return Err(DocError::UnexpectedField("orientation"));
        }
        if let Some(name) = self.labels.0.keys().find(|n| p.facet_index(n).is_none()) {
            return Err(ModelError::UnknownLabel(name.clone()).into());
        }
        let labels = p
            .facets()
            .iter()
            .map(|n| {
                self.labels
                    .0
                    .get(n)
                    .cloned()
                    .ok_or_else(|| ModelError::MissingLabel(n.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok((p, labels))
    }

    /// Loads a characteristic model, rejecting isotropy documents.
    pub fn load_characteristic(&self) -> Result<OmniorientedModel, DocError> {
        match self.load()? {
            LoadedModel::Characteristic(m) => Ok(m),
            LoadedModel::Isotropy(_) => Err(DocError::UnexpectedField("exceptional")),
        }
    }

    pub fn from_characteristic(m: &CharacteristicModel) -> Self {
        ModelDoc {
            model: PolytopeDoc::from_polytope(m.polytope()),
            labels: Labels(m.named_labels()),
            orientation: None,
        }
    }

    /// Labels are written with sign choices applied, and the orientation table
    /// lists each vertex's facets in sorted order with its sign.
    pub fn from_omnioriented(m: &OmniorientedModel) -> Self {
        let p = m.model().polytope();
        let labels = (0..p.num_facets())
            .map(|f| (p.facet_name(f).to_string(), m.label(f)))
            .collect();
        let orientation = p
            .vertices()
            .iter()
            .enumerate()
            .map(|(v, face)| OrientationEntry {
                order: p.names(face),
                sign: m.orientation().sign(v),
            })
            .collect();
        ModelDoc {
            model: PolytopeDoc::from_polytope(p),
            labels: Labels(labels),
            orientation: Some(orientation),
        }
    }

    pub fn from_isotropy(m: &IsotropyModel) -> Self {
        let p = m.polytope();
        let labels = (0..p.num_facets())
            .filter_map(|f| m.label(f).map(|l| (p.facet_name(f).to_string(), l.clone())))
            .collect();
        ModelDoc {
            model: PolytopeDoc::from_polytope(p).with_marking(p, m.marking()),
            labels: Labels(labels),
            orientation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentDoc {
    pub sign: i8,
    /// The exceptional facet this component sits on.
    pub facet: String,
    #[serde(flatten)]
    pub model: ModelDoc,
    pub smooth: bool,
    /// `|det|` at each vertex, sorted.
    pub vertex_orders: IntVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationDoc {
    pub construction: Construction,
    pub notes: Vec<String>,
    pub components: Vec<ComponentDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<RelationVerification>,
}

impl RelationDoc {
    pub fn new(r: &CobordismRelation, verification: Option<RelationVerification>) -> Self {
        let components = r
            .components
            .iter()
            .zip(&r.provenance.facets)
            .map(|(c, facet)| {
                let report = c.model.model().validate();
                ComponentDoc {
                    sign: c.sign,
                    facet: facet.clone(),
                    model: ModelDoc::from_omnioriented(&c.model),
                    smooth: report.is_smooth(),
                    vertex_orders: IntVector::new(report.local_group_orders()),
                }
            })
            .collect();
        RelationDoc {
            construction: r.provenance.construction,
            notes: r.provenance.notes.clone(),
            components,
            verification,
        }
    }
}
