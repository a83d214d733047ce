//! Characteristic models `(P, ξ)` and isotropy models `(Q, λ)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{self, IntVector, LatticeError};
use crate::polytope::{validate_marking, ExceptionalMarking, Face, MarkingReport, Polytope, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("expected {expected} labels, found {found}")]
    LabelCount { expected: usize, found: usize },
    #[error("label of facet {facet:?} has length {found}, expected {expected}")]
    LabelLength {
        facet: String,
        expected: usize,
        found: usize,
    },
    #[error("facet {0:?} has no label")]
    MissingLabel(String),
    #[error("label given for unknown facet {0:?}")]
    UnknownLabel(String),
    #[error("exceptional facet {0:?} must not carry a label")]
    LabelOnExceptional(String),
    #[error("labels are linearly dependent on the face {face:?}")]
    Dependent { face: Vec<String> },
    #[error("exceptional marking is invalid: {0}")]
    Marking(String),
    #[error("{0:?} is not an exceptional facet")]
    NotExceptional(String),
    #[error("isotropy models need a polytope of dimension at least 2")]
    DimensionTooSmall,
    #[error("models live over different polytopes")]
    PolytopeMismatch,
}

/// A polytope with an integer vector on every facet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicModel {
    polytope: Polytope,
    labels: Vec<IntVector>,
}

/// Outcome of [`CharacteristicModel::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicReport {
    /// Label determinant at each vertex, facets in sorted order.
    pub determinants: Vec<BigInt>,
    /// Vertices where the labels are dependent.
    pub failures: Vec<Face>,
}

impl CharacteristicReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn is_smooth(&self) -> bool {
        self.determinants.iter().all(|d| d.abs().is_one())
    }

    /// Sorted multiset of `|det|` over vertices: the orders of the local groups.
    pub fn local_group_orders(&self) -> Vec<BigInt> {
        let mut orders: Vec<BigInt> = self.determinants.iter().map(|d| d.abs()).collect();
        orders.sort();
        orders
    }
}

impl CharacteristicModel {
    /// Checks shapes only; independence is reported by [`validate`](Self::validate).
    pub fn new(polytope: Polytope, labels: Vec<IntVector>) -> Result<Self, ModelError> {
        if labels.len() != polytope.num_facets() {
            return Err(ModelError::LabelCount {
                expected: polytope.num_facets(),
                found: labels.len(),
            });
        }
        for (f, l) in labels.iter().enumerate() {
            if l.len() != polytope.dim() {
                return Err(ModelError::LabelLength {
                    facet: polytope.facet_name(f).to_string(),
                    expected: polytope.dim(),
                    found: l.len(),
                });
            }
        }
        Ok(CharacteristicModel { polytope, labels })
    }

    pub fn from_named(polytope: Polytope, mut labels: BTreeMap<String, IntVector>) -> Result<Self, ModelError> {
        let ordered = polytope
            .facets()
            .iter()
            .map(|f| labels.remove(f).ok_or_else(|| ModelError::MissingLabel(f.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(extra) = labels.into_keys().next() {
            return Err(ModelError::UnknownLabel(extra));
        }
        Self::new(polytope, ordered)
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn labels(&self) -> &[IntVector] {
        &self.labels
    }

    pub fn label(&self, facet: usize) -> &IntVector {
        &self.labels[facet]
    }

    pub fn named_labels(&self) -> BTreeMap<String, IntVector> {
        self.polytope
            .facets()
            .iter()
            .cloned()
            .zip(self.labels.iter().cloned())
            .collect()
    }

    pub fn vertex_labels(&self, v: usize) -> Vec<IntVector> {
        self.polytope.vertices()[v]
            .facets()
            .iter()
            .map(|&f| self.labels[f].clone())
            .collect()
    }

    pub fn vertex_determinants(&self) -> Vec<BigInt> {
        (0..self.polytope.num_vertices())
            .map(|v| lattice::det(&self.vertex_labels(v)).expect("labels have length dim"))
            .collect()
    }

    /// Every face lies in a vertex, so checking vertex determinants suffices.
    pub fn validate(&self) -> CharacteristicReport {
        let determinants = self.vertex_determinants();
        let failures = determinants
            .iter()
            .zip(self.polytope.vertices())
            .filter(|(d, _)| d.is_zero())
            .map(|(_, v)| v.clone())
            .collect();
        CharacteristicReport { determinants, failures }
    }

    pub fn ensure_valid(&self) -> Result<(), ModelError> {
        match self.validate().failures.first() {
            Some(v) => Err(ModelError::Dependent {
                face: self.polytope.names(v),
            }),
            None => Ok(()),
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.validate().is_smooth()
    }

    /// The model `(P, D ∘ ξ)` for a matrix `D` given by rows.
    pub fn transformed(&self, rows: &[IntVector]) -> Result<Self, ModelError> {
        let labels = self
            .labels
            .iter()
            .map(|l| apply(rows, l))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.polytope.clone(), labels)
    }
}

fn apply(rows: &[IntVector], v: &IntVector) -> Result<IntVector, LatticeError> {
    rows.iter()
        .map(|r| {
            if r.len() != v.len() {
                Err(LatticeError::LengthMismatch {
                    expected: v.len(),
                    found: r.len(),
                })
            } else {
                Ok(r.dot(v.entries()))
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(IntVector::new)
}

/// Result of a bounded search for `δ_*` with `δ_* ∘ ξ₁ = ξ₂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaSearch {
    /// The unimodular matrix, by rows.
    Found(Vec<IntVector>),
    NotFoundWithinBound,
}

/// Looks for `D ∈ GL(n, Z)` with entries bounded by `bound` and `D ξ₁(F) = ξ₂(F)`
/// for every facet.
///
/// The labels at any vertex form a rational basis, so `D` is pinned down by a
/// single vertex; the search over the bounded box collapses to checking that
/// one candidate.
#[allow(clippy::needless_range_loop)]
pub fn delta_equivalent(
    m1: &CharacteristicModel,
    m2: &CharacteristicModel,
    bound: u64,
) -> Result<DeltaSearch, ModelError> {
    if m1.polytope() != m2.polytope() {
        return Err(ModelError::PolytopeMismatch);
    }
    m1.ensure_valid()?;
    m2.ensure_valid()?;
    let n = m1.dim();
    let a = m1.vertex_labels(0);
    let b = m2.vertex_labels(0);
    let d = lattice::det(&a)?;
    // D = B A⁻¹ = B adj(A) / det(A); adj(A) comes back as rows.
    let adj = lattice::adjugate(&a)?;
    let bound = BigInt::from(bound);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let num: BigInt = (0..n).map(|k| &b[k][i] * &adj[k][j]).sum();
            let (q, r) = num.div_rem(&d);
            if !r.is_zero() || q.abs() > bound {
                return Ok(DeltaSearch::NotFoundWithinBound);
            }
            row.push(q);
        }
        rows.push(IntVector::new(row));
    }
    let columns: Vec<IntVector> = (0..n)
        .map(|j| IntVector::new(rows.iter().map(|r| r[j].clone()).collect()))
        .collect();
    if !lattice::det(&columns)?.abs().is_one() {
        return Ok(DeltaSearch::NotFoundWithinBound);
    }
    for (l1, l2) in m1.labels().iter().zip(m2.labels()) {
        if &apply(&rows, l1)? != l2 {
            return Ok(DeltaSearch::NotFoundWithinBound);
        }
    }
    Ok(DeltaSearch::Found(rows))
}

/// A polytope of dimension `n + 1` with exceptional facets and `Z^n` labels on
/// the remaining facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropyModel {
    polytope: Polytope,
    marking: ExceptionalMarking,
    labels: Vec<Option<IntVector>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropyReport {
    pub marking: MarkingReport,
    /// Faces (non-exceptional facets of a vertex) whose labels are dependent.
    pub dependent: Vec<Face>,
}

impl IsotropyReport {
    pub fn passed(&self) -> bool {
        self.marking.passed() && self.dependent.is_empty()
    }
}

impl IsotropyModel {
    pub fn new(
        polytope: Polytope,
        marking: ExceptionalMarking,
        labels: Vec<Option<IntVector>>,
    ) -> Result<Self, ModelError> {
        if polytope.dim() < 2 {
            return Err(ModelError::DimensionTooSmall);
        }
        if let Some(&f) = marking.facets().iter().find(|&&f| f >= polytope.num_facets()) {
            return Err(PolytopeError::FacetOutOfRange(f).into());
        }
        if labels.len() != polytope.num_facets() {
            return Err(ModelError::LabelCount {
                expected: polytope.num_facets(),
                found: labels.len(),
            });
        }
        let n = polytope.dim() - 1;
        for (f, l) in labels.iter().enumerate() {
            let name = polytope.facet_name(f).to_string();
            match (marking.contains(f), l) {
                (true, Some(_)) => return Err(ModelError::LabelOnExceptional(name)),
                (false, None) => return Err(ModelError::MissingLabel(name)),
                (false, Some(l)) if l.len() != n => {
                    return Err(ModelError::LabelLength {
                        facet: name,
                        expected: n,
                        found: l.len(),
                    })
                }
                _ => {}
            }
        }
        Ok(IsotropyModel {
            polytope,
            marking,
            labels,
        })
    }

    pub fn from_named(
        polytope: Polytope,
        marking: ExceptionalMarking,
        mut labels: BTreeMap<String, IntVector>,
    ) -> Result<Self, ModelError> {
        let mut ordered = Vec::with_capacity(polytope.num_facets());
        for (f, name) in polytope.facets().iter().enumerate() {
            let l = labels.remove(name);
            if marking.contains(f) && l.is_some() {
                return Err(ModelError::LabelOnExceptional(name.clone()));
            }
            ordered.push(l);
        }
        if let Some(extra) = labels.into_keys().next() {
            return Err(ModelError::UnknownLabel(extra));
        }
        Self::new(polytope, marking, ordered)
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn marking(&self) -> &ExceptionalMarking {
        &self.marking
    }

    /// Rank `n` of the label lattice (one less than the polytope dimension).
    pub fn rank(&self) -> usize {
        self.polytope.dim() - 1
    }

    pub fn label(&self, facet: usize) -> Option<&IntVector> {
        self.labels[facet].as_ref()
    }

    pub fn labels(&self) -> &[Option<IntVector>] {
        &self.labels
    }

    /// At each vertex, the labels of its non-exceptional facets must be
    /// independent; every nonempty intersection of non-exceptional facets is
    /// contained in such a set.
    pub fn validate(&self) -> IsotropyReport {
        let marking = validate_marking(&self.polytope, &self.marking).expect("marking indices checked");
        let mut dependent = Vec::new();
        for v in self.polytope.vertices() {
            let plain: Vec<usize> = v
                .facets()
                .iter()
                .copied()
                .filter(|&f| !self.marking.contains(f))
                .collect();
            let labels: Vec<IntVector> = plain
                .iter()
                .map(|&f| self.labels[f].clone().expect("present"))
                .collect();
            if !lattice::is_independent(&labels).expect("lengths checked") {
                let face = Face::new(plain);
                if !dependent.contains(&face) {
                    dependent.push(face);
                }
            }
        }
        IsotropyReport { marking, dependent }
    }

    pub fn ensure_valid(&self) -> Result<(), ModelError> {
        let report = self.validate();
        self.ensure_marking(&report.marking)?;
        match report.dependent.first() {
            Some(face) => Err(ModelError::Dependent {
                face: self.polytope.names(face),
            }),
            None => Ok(()),
        }
    }

    fn ensure_marking(&self, report: &MarkingReport) -> Result<(), ModelError> {
        match report.violations.first() {
            Some(v) => Err(ModelError::Marking(describe_violation(&self.polytope, v))),
            None => Ok(()),
        }
    }

    /// The characteristic model `(Q, η)`: `(0, …, 0, 1)` on exceptional facets
    /// and `(λ, 0)` elsewhere.
    pub fn extend_to_eta(&self) -> Result<CharacteristicModel, ModelError> {
        self.ensure_valid()?;
        let n = self.rank();
        let labels = self
            .labels
            .iter()
            .map(|l| match l {
                Some(l) => l.extended(BigInt::zero()),
                None => IntVector::unit(n + 1, n),
            })
            .collect();
        CharacteristicModel::new(self.polytope.clone(), labels)
    }

    /// The characteristic model on exceptional facet `q`: its facets are the
    /// intersections with the other facets, carrying the same labels.
    pub fn restrict_to_exceptional(&self, q: usize) -> Result<CharacteristicModel, ModelError> {
        if q >= self.polytope.num_facets() || !self.marking.contains(q) {
            let name = self
                .polytope
                .facets()
                .get(q)
                .cloned()
                .unwrap_or_else(|| format!("#{q}"));
            return Err(ModelError::NotExceptional(name));
        }
        self.ensure_marking(&validate_marking(&self.polytope, &self.marking)?)?;
        let on_q: Vec<&Face> = self.polytope.vertices().iter().filter(|v| v.contains(q)).collect();
        let mut meeting: Vec<usize> = on_q
            .iter()
            .flat_map(|v| v.facets().iter().copied())
            .filter(|&f| f != q)
            .collect();
        meeting.sort_unstable();
        meeting.dedup();
        let local: BTreeMap<usize, usize> = meeting.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let facets = meeting
            .iter()
            .map(|&f| self.polytope.facet_name(f).to_string())
            .collect();
        let vertices = on_q
            .iter()
            .map(|v| v.without(q).facets().iter().map(|f| local[f]).collect())
            .collect();
        let polytope = Polytope::from_indices(self.rank(), facets, vertices)?;
        let labels = meeting
            .iter()
            .map(|&f| self.labels[f].clone().expect("non-exceptional facets are labelled"))
            .collect();
        CharacteristicModel::new(polytope, labels)
    }
}

/// Human-readable witness for a marking violation.
pub fn describe_violation(p: &Polytope, v: &crate::polytope::MarkingViolation) -> String {
    use crate::polytope::MarkingViolation::*;
    match v {
        Intersecting { vertex, facets } => format!(
            "vertex {:?} lies on exceptional facets {:?} and {:?}",
            p.names(vertex),
            p.facet_name(facets.0),
            p.facet_name(facets.1)
        ),
        Uncovered { vertex } => format!("vertex {:?} lies on no exceptional facet", p.names(vertex)),
    }
}
