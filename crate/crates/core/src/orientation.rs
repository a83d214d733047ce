//! Orientation data and omnioriented models.
//!
//! An orientation of a simple polytope is recorded as one sign per vertex: the
//! sign attached to the vertex's facets listed in increasing index order. Any
//! other ordering of the same facets carries that sign times the parity of the
//! permutation. Consistency means that for neighbouring vertices `R + G` and
//! `R + G'` the orderings `(R, G)` and `(R, G')` get opposite signs.

use num_bigint::Sign;
use thiserror::Error;

use crate::charmodel::{CharacteristicModel, ModelError};
use crate::lattice::{self, IntVector};
use crate::polytope::{Face, Polytope};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrientationError {
    #[error("expected {expected} vertex signs, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("sign must be +1 or -1, found {0}")]
    BadSign(i64),
    #[error("{0:?} is not a vertex")]
    NotAVertex(Vec<usize>),
    #[error("vertex {0:?} given twice")]
    Repeated(Vec<usize>),
    #[error("vertex {0:?} has no orientation entry")]
    Missing(Vec<usize>),
    #[error("orientation is inconsistent across the ridge between {0:?} and {1:?}")]
    Inconsistent(Vec<usize>, Vec<usize>),
}

/// Parity of the permutation taking `ordering` to its sorted order.
pub fn permutation_sign(ordering: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..ordering.len() {
        for j in i + 1..ordering.len() {
            if ordering[i] > ordering[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrientationDatum {
    signs: Vec<i8>,
}

impl OrientationDatum {
    /// The orientation giving the first vertex (in sorted order) sign `+1`.
    pub fn canonical(p: &Polytope) -> Self {
        OrientationDatum {
            signs: p.canonical_orientation().to_vec(),
        }
    }

    pub fn from_signs(p: &Polytope, signs: Vec<i8>) -> Result<Self, OrientationError> {
        if signs.len() != p.num_vertices() {
            return Err(OrientationError::WrongLength {
                expected: p.num_vertices(),
                found: signs.len(),
            });
        }
        if let Some(&s) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(OrientationError::BadSign(s.into()));
        }
        let datum = OrientationDatum { signs };
        datum.check(p)?;
        Ok(datum)
    }

    /// Builds a datum from explicit `(ordering, sign)` entries, one per vertex.
    pub fn from_orderings(p: &Polytope, entries: &[(Vec<usize>, i8)]) -> Result<Self, OrientationError> {
        let mut signs = vec![0i8; p.num_vertices()];
        for (ordering, sign) in entries {
            if *sign != 1 && *sign != -1 {
                return Err(OrientationError::BadSign((*sign).into()));
            }
            let face = Face::new(ordering.clone());
            let vi = p
                .vertex_index(&face)
                .filter(|_| face.codim() == ordering.len())
                .ok_or_else(|| OrientationError::NotAVertex(ordering.clone()))?;
            if signs[vi] != 0 {
                return Err(OrientationError::Repeated(ordering.clone()));
            }
            signs[vi] = sign * permutation_sign(ordering);
        }
        if let Some(vi) = signs.iter().position(|&s| s == 0) {
            return Err(OrientationError::Missing(p.vertices()[vi].facets().to_vec()));
        }
        let datum = OrientationDatum { signs };
        datum.check(p)?;
        Ok(datum)
    }

    fn check(&self, p: &Polytope) -> Result<(), OrientationError> {
        // a connected polytope has exactly two orientations
        let canonical = p.canonical_orientation();
        let global = self.signs[0] * canonical[0];
        let agrees = |v: usize| self.signs[v] == global * canonical[v];
        // vertex 0 agrees, so some disagreeing vertex has an agreeing neighbour
        for vi in (0..self.signs.len()).filter(|&v| !agrees(v)) {
            if let Some(&w) = p.neighbors(vi).iter().find(|&&w| agrees(w)) {
                return Err(OrientationError::Inconsistent(
                    p.vertices()[w].facets().to_vec(),
                    p.vertices()[vi].facets().to_vec(),
                ));
            }
        }
        Ok(())
    }

    pub fn is_consistent(&self, p: &Polytope) -> bool {
        self.signs.len() == p.num_vertices() && self.check(p).is_ok()
    }

    /// Sign of vertex `v`'s sorted facet ordering.
    pub fn sign(&self, v: usize) -> i8 {
        self.signs[v]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Sign of an arbitrary ordering of some vertex's facets.
    pub fn sign_of_ordering(&self, p: &Polytope, ordering: &[usize]) -> Option<i8> {
        let vi = p.vertex_index(&Face::new(ordering.to_vec()))?;
        Some(self.signs[vi] * permutation_sign(ordering))
    }

    pub fn reversed(&self) -> Self {
        OrientationDatum {
            signs: self.signs.iter().map(|s| -s).collect(),
        }
    }

    /// Boundary orientation induced on facet `q` of `host`, expressed on
    /// `facet_polytope`, whose facets are the host facets meeting `q`
    /// (same names, same relative order). A vertex `u` of the facet gets the
    /// sign of the host ordering `(q, u)`.
    pub fn induced_on_facet(&self, host: &Polytope, q: usize, facet_polytope: &Polytope) -> Self {
        let to_host: Vec<usize> = facet_polytope
            .facets()
            .iter()
            .map(|name| host.facet_index(name).expect("facet polytope uses host names"))
            .collect();
        let signs = facet_polytope
            .vertices()
            .iter()
            .map(|u| {
                let v = Face::new(u.facets().iter().map(|&f| to_host[f]).collect()).with(q);
                let vi = host.vertex_index(&v).expect("facet vertex is a host vertex");
                let pos = v.position(q).expect("contains q");
                let parity = if pos.is_multiple_of(2) { 1 } else { -1 };
                self.signs[vi] * parity
            })
            .collect();
        OrientationDatum { signs }
    }
}

/// A characteristic model together with an orientation and a choice of sign
/// for each facet's label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmniorientedModel {
    model: CharacteristicModel,
    orientation: OrientationDatum,
    flips: Vec<bool>,
}

impl OmniorientedModel {
    pub fn new(model: CharacteristicModel, orientation: OrientationDatum) -> Result<Self, OrientationError> {
        if orientation.signs.len() != model.polytope().num_vertices() {
            return Err(OrientationError::WrongLength {
                expected: model.polytope().num_vertices(),
                found: orientation.signs.len(),
            });
        }
        orientation.check(model.polytope())?;
        let flips = vec![false; model.polytope().num_facets()];
        Ok(OmniorientedModel {
            model,
            orientation,
            flips,
        })
    }

    /// The model with its canonical orientation and no flips.
    pub fn canonical(model: CharacteristicModel) -> Self {
        let orientation = OrientationDatum::canonical(model.polytope());
        let flips = vec![false; model.polytope().num_facets()];
        OmniorientedModel {
            model,
            orientation,
            flips,
        }
    }

    pub fn model(&self) -> &CharacteristicModel {
        &self.model
    }

    pub fn orientation(&self) -> &OrientationDatum {
        &self.orientation
    }

    pub fn flips(&self) -> &[bool] {
        &self.flips
    }

    pub fn with_flip(mut self, facet: usize) -> Self {
        self.flips[facet] = !self.flips[facet];
        self
    }

    pub fn reversed(mut self) -> Self {
        self.orientation = self.orientation.reversed();
        self
    }

    /// Label of `facet` after applying its sign choice.
    pub fn label(&self, facet: usize) -> IntVector {
        let l = self.model.label(facet);
        if self.flips[facet] {
            -l
        } else {
            l.clone()
        }
    }

    /// Signed labels at vertex `v`, in sorted facet order.
    pub fn vertex_labels(&self, v: usize) -> Vec<IntVector> {
        self.model.polytope().vertices()[v]
            .facets()
            .iter()
            .map(|&f| self.label(f))
            .collect()
    }

    /// Orientation sign times the sign of the label determinant at `v`.
    pub fn vertex_sign(&self, v: usize) -> Result<i8, ModelError> {
        let d = lattice::det(&self.vertex_labels(v))?;
        match d.sign() {
            Sign::Plus => Ok(self.orientation.sign(v)),
            Sign::Minus => Ok(-self.orientation.sign(v)),
            Sign::NoSign => Err(ModelError::Dependent {
                face: self.model.polytope().names(&self.model.polytope().vertices()[v]),
            }),
        }
    }

    pub fn vertex_signs(&self) -> Result<Vec<i8>, ModelError> {
        (0..self.model.polytope().num_vertices())
            .map(|v| self.vertex_sign(v))
            .collect()
    }
}
