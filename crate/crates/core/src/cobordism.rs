//! Cobordism relations read off from polytopes with exceptional facets.
//!
//! Each construction builds an [`IsotropyModel`] `(Q, λ)`; its exceptional
//! facets restrict to characteristic models whose signed sum vanishes. The
//! orientation of each boundary component is induced from one orientation of
//! `Q`, so all components of a relation are oriented compatibly.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::charmodel::{CharacteristicModel, IsotropyModel, ModelError};
use crate::lattice::{self, IntVector, LatticeError, Sublattice};
use crate::orientation::{OmniorientedModel, OrientationDatum};
use crate::polytope::{ExceptionalMarking, Face, Polytope, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CobordismError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("lambda0 has length {found}, expected {expected}")]
    Lambda0Length { expected: usize, found: usize },
    #[error("lambda0 {0} is not primitive")]
    Lambda0NotPrimitive(IntVector),
    #[error("lambda0 {lambda0} lies in the span of the labels on edge {edge:?}")]
    Lambda0InEdgeSpan { lambda0: IntVector, edge: Vec<String> },
    #[error("no exceptional facet restricts to the target polytope")]
    NoTargetFacet,
    #[error("exceptional facet {0:?} is not a simplex")]
    NotSimplexFacet(String),
    #[error("not a fake weighted projective space: {0}")]
    NotFakeWeighted(String),
}

/// A characteristic model over a simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FakeWeightedProjective {
    model: CharacteristicModel,
}

impl FakeWeightedProjective {
    pub fn new(model: CharacteristicModel) -> Result<Self, CobordismError> {
        if !model.polytope().is_simplex() {
            return Err(CobordismError::NotFakeWeighted(format!(
                "polytope has {} facets in dimension {}",
                model.polytope().num_facets(),
                model.dim()
            )));
        }
        model.ensure_valid()?;
        Ok(FakeWeightedProjective { model })
    }

    pub fn model(&self) -> &CharacteristicModel {
        &self.model
    }

    /// Orders of the local groups at the `n + 1` vertices, sorted.
    pub fn local_group_orders(&self) -> Vec<BigInt> {
        self.model.validate().local_group_orders()
    }

    pub fn is_smooth(&self) -> bool {
        self.local_group_orders().iter().all(One::is_one)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// Boundary of an orbifold with quasitoric boundary.
    Boundary,
    /// Prism over `P` with the bottom vertices cut off.
    Decomposition,
    /// Every vertex of a polytope cut off.
    VertexCut,
    /// Boundary relation certified by the Hirzebruch schema conditions.
    HirzebruchSchema,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Construction::Boundary => "boundary",
            Construction::Decomposition => "decomposition",
            Construction::VertexCut => "vertex-cut",
            Construction::HirzebruchSchema => "hirzebruch-schema",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub construction: Construction,
    /// Exceptional facet of the host polytope each component came from.
    pub facets: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub model: OmniorientedModel,
    pub sign: i8,
}

/// The claim `Σ sign · [component] = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CobordismRelation {
    pub provenance: Provenance,
    pub components: Vec<Component>,
}

impl CobordismRelation {
    pub fn is_smooth(&self) -> bool {
        self.components.iter().all(|c| c.model.model().is_smooth())
    }
}

/// One characteristic model per exceptional facet, in marking order.
pub fn boundary_components(m: &IsotropyModel) -> Result<Vec<CharacteristicModel>, CobordismError> {
    m.ensure_valid()?;
    m.marking()
        .facets()
        .par_iter()
        .map(|&q| m.restrict_to_exceptional(q).map_err(CobordismError::from))
        .collect()
}

/// Builds the boundary relation. Without a target every component gets sign
/// `+1` and the orientation induced from the canonical orientation of `Q`.
/// With a target facet, `Q` is oriented so that the target's induced
/// orientation is the reverse of its canonical one; the target is then listed
/// first, canonically oriented, with sign `-1`.
fn boundary_relation(
    m: &IsotropyModel,
    target: Option<usize>,
    construction: Construction,
) -> Result<CobordismRelation, CobordismError> {
    let models = boundary_components(m)?;
    let q = m.polytope();
    let mut host = OrientationDatum::canonical(q);
    let mut notes = Vec::new();
    if let Some(t) = target {
        let i = m
            .marking()
            .facets()
            .iter()
            .position(|&f| f == t)
            .expect("target is exceptional");
        let p = models[i].polytope();
        if host.induced_on_facet(q, t, p) == OrientationDatum::canonical(p) {
            host = host.reversed();
            notes.push("host orientation reversed so the target keeps its canonical orientation".to_string());
        }
    }
    let mut components = Vec::with_capacity(models.len());
    let mut facets = Vec::with_capacity(models.len());
    for (model, &f) in models.into_iter().zip(m.marking().facets()) {
        let induced = host.induced_on_facet(q, f, model.polytope());
        let is_target = Some(f) == target;
        let (orientation, sign) = if is_target {
            (induced.reversed(), -1)
        } else {
            (induced, 1)
        };
        let model = OmniorientedModel::new(model, orientation).expect("induced orientation is consistent");
        let component = Component { model, sign };
        let name = q.facet_name(f).to_string();
        if is_target {
            components.insert(0, component);
            facets.insert(0, name);
        } else {
            components.push(component);
            facets.push(name);
        }
    }
    Ok(CobordismRelation {
        provenance: Provenance {
            construction,
            facets,
            notes,
        },
        components,
    })
}

/// `Σ [X(Q_j, ξ^j)] = 0` over the exceptional facets.
pub fn comcob_relation(m: &IsotropyModel) -> Result<CobordismRelation, CobordismError> {
    boundary_relation(m, None, Construction::Boundary)
}

/// Output of [`qbd_decompose`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// `-[X] + Σ [M_j] = 0`, target first.
    pub relation: CobordismRelation,
    pub lambda0: IntVector,
    /// The truncated prism with its isotropy labels.
    pub isotropy: IsotropyModel,
    pub top: usize,
    pub bottom: usize,
}

impl Decomposition {
    pub fn simplices(&self) -> Result<Vec<FakeWeightedProjective>, CobordismError> {
        self.relation.components[1..]
            .iter()
            .map(|c| FakeWeightedProjective::new(c.model.model().clone()))
            .collect()
    }
}

/// The sublattices `Z(e)` spanned by the labels on each edge of `P`.
pub fn edge_spans(x: &CharacteristicModel) -> Result<Vec<(Face, Sublattice)>, CobordismError> {
    x.polytope()
        .edges()
        .into_iter()
        .map(|e| {
            let gens: Vec<IntVector> = e.facets().iter().map(|&f| x.label(f).clone()).collect();
            let span = Sublattice::new(&gens, x.dim())?;
            Ok((e, span))
        })
        .collect()
}

/// Checks a user-supplied `λ₀`: primitive and outside every edge span.
pub fn check_lambda0(x: &CharacteristicModel, lambda0: &IntVector) -> Result<(), CobordismError> {
    if lambda0.len() != x.dim() {
        return Err(CobordismError::Lambda0Length {
            expected: x.dim(),
            found: lambda0.len(),
        });
    }
    if !lattice::is_primitive(lambda0) {
        return Err(CobordismError::Lambda0NotPrimitive(lambda0.clone()));
    }
    for (e, span) in edge_spans(x)? {
        if span.rational_span_contains(lambda0)? {
            return Err(CobordismError::Lambda0InEdgeSpan {
                lambda0: lambda0.clone(),
                edge: x.polytope().names(&e),
            });
        }
    }
    Ok(())
}

/// Writes `[X]` as a sum of fake weighted projective spaces: one per vertex
/// of `P`, labelled by the vertex's labels together with `λ₀`.
pub fn qbd_decompose(x: &CharacteristicModel, lambda0: Option<IntVector>) -> Result<Decomposition, CobordismError> {
    x.ensure_valid()?;
    let p = x.polytope();
    let lambda0 = match lambda0 {
        Some(l) => {
            check_lambda0(x, &l)?;
            l
        }
        None => {
            let spans: Vec<Sublattice> = edge_spans(x)?.into_iter().map(|(_, s)| s).collect();
            lattice::find_avoiding_vector(&spans, x.dim())?
        }
    };

    let prism = p.prism();
    let mut q = prism.polytope.clone();
    let mut marked = vec![prism.top];
    for v in p.vertices() {
        let (next, h) = q.truncate_vertex(&v.with(prism.bottom))?;
        q = next;
        marked.push(h);
    }
    let labels: Vec<Option<IntVector>> = (0..q.num_facets())
        .map(|f| {
            if f < p.num_facets() {
                Some(x.label(f).clone())
            } else if f == prism.bottom {
                Some(lambda0.clone())
            } else {
                None
            }
        })
        .collect();
    let isotropy = IsotropyModel::new(q, ExceptionalMarking::new(marked), labels)?;
    let mut relation = boundary_relation(&isotropy, Some(prism.top), Construction::Decomposition)?;
    relation.provenance.notes.push(format!("lambda0 = {lambda0}"));
    Ok(Decomposition {
        relation,
        lambda0,
        isotropy,
        top: prism.top,
        bottom: prism.bottom,
    })
}

/// Output of [`vertex_cut_relation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCut {
    pub relation: CobordismRelation,
    pub isotropy: IsotropyModel,
}

/// Cuts off every vertex of `q` and returns the boundary relation among the
/// resulting simplices. `labels` are indexed by the facets of `q`.
pub fn vertex_cut_relation(q: &Polytope, labels: Vec<IntVector>) -> Result<VertexCut, CobordismError> {
    if labels.len() != q.num_facets() {
        return Err(ModelError::LabelCount {
            expected: q.num_facets(),
            found: labels.len(),
        }
        .into());
    }
    let mut cut = q.clone();
    let mut marked = Vec::with_capacity(q.num_vertices());
    for v in q.vertices() {
        let (next, h) = cut.truncate_vertex(v)?;
        cut = next;
        marked.push(h);
    }
    let mut all: Vec<Option<IntVector>> = labels.into_iter().map(Some).collect();
    all.resize(cut.num_facets(), None);
    let isotropy = IsotropyModel::new(cut, ExceptionalMarking::new(marked), all)?;
    let relation = boundary_relation(&isotropy, None, Construction::VertexCut)?;
    Ok(VertexCut { relation, isotropy })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemaViolation {
    /// A facet meeting the target carries a label different from the target's.
    LabelMismatch {
        facet: String,
        expected: IntVector,
        found: IntVector,
    },
    /// An edge off the exceptional facets whose labels are not a basis.
    NotBasis { edge: Vec<String>, det: BigInt },
}

impl fmt::Display for SchemaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaViolation::LabelMismatch { facet, expected, found } => {
                write!(
                    f,
                    "condition (1): facet {facet:?} has label {found}, target has {expected}"
                )
            }
            SchemaViolation::NotBasis { edge, det } => {
                write!(f, "condition (2): edge {edge:?} has label determinant {det}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaCheck {
    pub target_facet: String,
    pub violations: Vec<SchemaViolation>,
    /// `-[M] + Σ [X(Δ_i, ξ^i)] = 0`, present when every condition holds.
    pub relation: Option<CobordismRelation>,
}

impl SchemaCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the two conditions under which the boundary of `(Q, λ)` exhibits
/// `target` as cobordant to a sum of smooth simplex models.
pub fn check_hirzebruch_schema(target: &CharacteristicModel, q: &IsotropyModel) -> Result<SchemaCheck, CobordismError> {
    q.ensure_valid()?;
    let host = q.polytope();
    let mut target_facet = None;
    for &f in q.marking().facets() {
        let r = q.restrict_to_exceptional(f)?;
        if target_facet.is_none() && r.polytope() == target.polytope() {
            target_facet = Some(f);
        } else if !r.polytope().is_simplex() {
            return Err(CobordismError::NotSimplexFacet(host.facet_name(f).to_string()));
        }
    }
    let t = target_facet.ok_or(CobordismError::NoTargetFacet)?;

    let mut violations = Vec::new();
    for (name, expected) in target.polytope().facets().iter().zip(target.labels()) {
        let f = host.facet_index(name).expect("restriction keeps host names");
        let found = q.label(f).expect("facets meeting the target are labelled");
        if found != expected {
            violations.push(SchemaViolation::LabelMismatch {
                facet: name.clone(),
                expected: expected.clone(),
                found: found.clone(),
            });
        }
    }
    for edge in host.edges() {
        if edge.facets().iter().any(|&f| q.marking().contains(f)) {
            continue;
        }
        let labels: Vec<IntVector> = edge
            .facets()
            .iter()
            .map(|&f| q.label(f).expect("plain").clone())
            .collect();
        let det = lattice::det(&labels)?;
        if !det.abs().is_one() {
            violations.push(SchemaViolation::NotBasis {
                edge: host.names(&edge),
                det,
            });
        }
    }
    let relation = if violations.is_empty() {
        Some(boundary_relation(q, Some(t), Construction::HirzebruchSchema)?)
    } else {
        None
    };
    Ok(SchemaCheck {
        target_facet: host.facet_name(t).to_string(),
        violations,
        relation,
    })
}
