//! Combinatorial simple polytopes.
//!
//! A polytope is stored purely by its vertex–facet incidence: each vertex is
//! identified with the sorted set of facet indices meeting at it. Every face
//! of a simple polytope is the intersection of a unique set of facets, so a
//! [`Face`] is just that facet set.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("polytope has no vertices")]
    NoVertices,
    #[error("duplicate facet id {0:?}")]
    DuplicateFacet(String),
    #[error("unknown facet id {0:?}")]
    UnknownFacet(String),
    #[error("facet index {0} out of range")]
    FacetOutOfRange(usize),
    #[error("vertex {vertex:?} has {found} facets, expected {expected}")]
    NotSimple {
        vertex: Vec<String>,
        expected: usize,
        found: usize,
    },
    #[error("vertex {0:?} listed twice")]
    DuplicateVertex(Vec<String>),
    #[error("facet {facet:?} lies on {found} vertices, needs at least {needed}")]
    ThinFacet { facet: String, found: usize, needed: usize },
    #[error("ridge {ridge:?} lies on {found} vertices, expected exactly 2")]
    BadRidge { ridge: Vec<String>, found: usize },
    #[error("vertex graph is disconnected; {unreached:?} not reachable")]
    Disconnected { unreached: Vec<String> },
    #[error("dual complex is not orientable (conflict at vertex {0:?})")]
    NonOrientable(Vec<String>),
    #[error("{0:?} is not a vertex")]
    NotAVertex(Vec<String>),
    #[error("codimension {codim} out of range 0..={dim}")]
    CodimOutOfRange { codim: usize, dim: usize },
}

/// A face, identified by the sorted indices of the facets containing it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face(Vec<usize>);

impl Face {
    pub fn new(mut facets: Vec<usize>) -> Self {
        facets.sort_unstable();
        facets.dedup();
        Face(facets)
    }

    pub fn facets(&self) -> &[usize] {
        &self.0
    }

    pub fn codim(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, facet: usize) -> bool {
        self.0.binary_search(&facet).is_ok()
    }

    pub fn position(&self, facet: usize) -> Option<usize> {
        self.0.binary_search(&facet).ok()
    }

    pub fn is_subset(&self, other: &Face) -> bool {
        self.0.iter().all(|f| other.contains(*f))
    }

    pub fn without(&self, facet: usize) -> Face {
        Face(self.0.iter().copied().filter(|&f| f != facet).collect())
    }

    pub fn with(&self, facet: usize) -> Face {
        let mut v = self.0.clone();
        v.push(facet);
        Face::new(v)
    }
}

/// A simple polytope given by vertex–facet incidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    dim: usize,
    facets: Vec<String>,
    /// Sorted; each entry has exactly `dim` facets.
    vertices: Vec<Face>,
    /// `neighbors[v][k]` is the vertex across the ridge `vertices[v] \ {vertices[v][k]}`.
    neighbors: Vec<Vec<usize>>,
    /// Orientation sign of each vertex's sorted facet ordering; `+1` at vertex 0.
    orientation: Vec<i8>,
}

impl Polytope {
    /// Builds a polytope from facet names and vertices given as facet-name lists.
    pub fn new(dim: usize, facets: Vec<String>, vertices: Vec<Vec<String>>) -> Result<Self, PolytopeError> {
        let mut index = HashMap::new();
        for (i, f) in facets.iter().enumerate() {
            if index.insert(f.as_str(), i).is_some() {
                return Err(PolytopeError::DuplicateFacet(f.clone()));
            }
        }
        let vertices = vertices
            .into_iter()
            .map(|v| {
                v.iter()
                    .map(|name| {
                        index
                            .get(name.as_str())
                            .copied()
                            .ok_or_else(|| PolytopeError::UnknownFacet(name.clone()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_indices(dim, facets, vertices)
    }

    pub fn from_indices(dim: usize, facets: Vec<String>, vertices: Vec<Vec<usize>>) -> Result<Self, PolytopeError> {
        if dim == 0 {
            return Err(PolytopeError::ZeroDimension);
        }
        {
            let mut seen = BTreeSet::new();
            for f in &facets {
                if !seen.insert(f) {
                    return Err(PolytopeError::DuplicateFacet(f.clone()));
                }
            }
        }
        let names = |ids: &[usize]| ids.iter().map(|&i| facets[i].clone()).collect::<Vec<_>>();
        let mut faces = Vec::with_capacity(vertices.len());
        for raw in vertices {
            if let Some(&bad) = raw.iter().find(|&&i| i >= facets.len()) {
                return Err(PolytopeError::FacetOutOfRange(bad));
            }
            let face = Face::new(raw.clone());
            if face.codim() != dim || raw.len() != dim {
                return Err(PolytopeError::NotSimple {
                    vertex: names(&raw),
                    expected: dim,
                    found: face.codim(),
                });
            }
            faces.push(face);
        }
        if faces.is_empty() {
            return Err(PolytopeError::NoVertices);
        }
        faces.sort();
        if let Some(w) = faces.windows(2).find(|w| w[0] == w[1]) {
            return Err(PolytopeError::DuplicateVertex(names(w[0].facets())));
        }

        let mut incidence = vec![0usize; facets.len()];
        for v in &faces {
            for &f in v.facets() {
                incidence[f] += 1;
            }
        }
        if let Some(f) = (0..facets.len()).find(|&f| incidence[f] < dim) {
            return Err(PolytopeError::ThinFacet {
                facet: facets[f].clone(),
                found: incidence[f],
                needed: dim,
            });
        }

        let mut ridges: HashMap<Face, Vec<usize>> = HashMap::new();
        for (vi, v) in faces.iter().enumerate() {
            for &f in v.facets() {
                ridges.entry(v.without(f)).or_default().push(vi);
            }
        }
        let mut bad: Vec<_> = ridges.iter().filter(|(_, vs)| vs.len() != 2).collect();
        bad.sort();
        if let Some((ridge, vs)) = bad.first() {
            return Err(PolytopeError::BadRidge {
                ridge: names(ridge.facets()),
                found: vs.len(),
            });
        }
        let neighbors: Vec<Vec<usize>> = faces
            .iter()
            .enumerate()
            .map(|(vi, v)| {
                v.facets()
                    .iter()
                    .map(|&f| {
                        let pair = &ridges[&v.without(f)];
                        if pair[0] == vi {
                            pair[1]
                        } else {
                            pair[0]
                        }
                    })
                    .collect()
            })
            .collect();

        // Breadth-first propagation of an orientation of the dual sphere. Across
        // the ridge R shared by v = R + G and w = R + G', the orderings (R, G)
        // and (R, G') carry opposite signs.
        let mut orientation = vec![0i8; faces.len()];
        let mut queue = VecDeque::from([0]);
        orientation[0] = 1;
        while let Some(v) = queue.pop_front() {
            for (k, &w) in neighbors[v].iter().enumerate() {
                let g = faces[v].facets()[k];
                let ridge = faces[v].without(g);
                let g2 = faces[w]
                    .facets()
                    .iter()
                    .copied()
                    .find(|f| !ridge.contains(*f))
                    .expect("neighbor differs in one facet");
                let k2 = faces[w].position(g2).expect("present");
                let parity = if (k + k2) % 2 == 0 { 1 } else { -1 };
                let expected = -orientation[v] * parity;
                if orientation[w] == 0 {
                    orientation[w] = expected;
                    queue.push_back(w);
                } else if orientation[w] != expected {
                    return Err(PolytopeError::NonOrientable(names(faces[w].facets())));
                }
            }
        }
        if let Some(u) = orientation.iter().position(|&o| o == 0) {
            return Err(PolytopeError::Disconnected {
                unreached: names(faces[u].facets()),
            });
        }

        Ok(Polytope {
            dim,
            facets,
            vertices: faces,
            neighbors,
            orientation,
        })
    }

    /// The n-simplex with facets `F1..F{n+1}`.
    pub fn simplex(n: usize) -> Result<Self, PolytopeError> {
        if n == 0 {
            return Err(PolytopeError::ZeroDimension);
        }
        let facets = (1..=n + 1).map(|i| format!("F{i}")).collect();
        let vertices = (0..=n).map(|skip| (0..=n).filter(|&f| f != skip).collect()).collect();
        Self::from_indices(n, facets, vertices)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[String] {
        &self.facets
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn facet_name(&self, facet: usize) -> &str {
        &self.facets[facet]
    }

    pub fn facet_index(&self, name: &str) -> Option<usize> {
        self.facets.iter().position(|f| f == name)
    }

    pub fn vertices(&self) -> &[Face] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, v: &Face) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    /// Vertex indices across each ridge of vertex `v`, aligned with its facets.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    /// The canonical orientation: sign of each vertex's sorted facet ordering.
    pub fn canonical_orientation(&self) -> &[i8] {
        &self.orientation
    }

    pub fn names(&self, face: &Face) -> Vec<String> {
        face.facets().iter().map(|&f| self.facets[f].clone()).collect()
    }

    pub fn is_face(&self, face: &Face) -> bool {
        self.vertices.iter().any(|v| face.is_subset(v))
    }

    pub fn is_simplex(&self) -> bool {
        self.num_facets() == self.dim + 1
    }

    /// Faces of codimension `codim`, sorted. Codimension 0 is the polytope itself.
    pub fn faces_of_codim(&self, codim: usize) -> Result<Vec<Face>, PolytopeError> {
        if codim > self.dim {
            return Err(PolytopeError::CodimOutOfRange { codim, dim: self.dim });
        }
        let mut out = BTreeSet::new();
        for v in &self.vertices {
            for_each_subset(v.facets(), codim, &mut |s| {
                out.insert(Face(s.to_vec()));
            });
        }
        Ok(out.into_iter().collect())
    }

    pub fn edges(&self) -> Vec<Face> {
        self.faces_of_codim(self.dim - 1).expect("dim - 1 is in range")
    }

    fn fresh_name(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.facets.contains(&name) {
            name.push('\'');
        }
        name
    }

    /// `P × [0, 1]`.
    pub fn prism(&self) -> Prism {
        let m = self.num_facets();
        let mut facets = self.facets.clone();
        let bottom = self.fresh_name("BOTTOM");
        facets.push(bottom);
        let top = {
            let mut name = "TOP".to_string();
            while facets.contains(&name) {
                name.push('\'');
            }
            name
        };
        facets.push(top);
        let vertices = self
            .vertices
            .iter()
            .flat_map(|v| [m, m + 1].map(|end| v.with(end).0))
            .collect();
        let polytope =
            Self::from_indices(self.dim + 1, facets, vertices).expect("prism of a simple polytope is simple");
        Prism {
            polytope,
            bottom: m,
            top: m + 1,
        }
    }

    /// Cuts off vertex `v`. The new facet is appended last; its index is returned.
    pub fn truncate_vertex(&self, v: &Face) -> Result<(Polytope, usize), PolytopeError> {
        let Some(vi) = self.vertex_index(v) else {
            return Err(PolytopeError::NotAVertex(
                v.facets()
                    .iter()
                    .map(|&f| self.facets.get(f).cloned().unwrap_or_else(|| format!("#{f}")))
                    .collect(),
            ));
        };
        let h = self.num_facets();
        let mut facets = self.facets.clone();
        facets.push(self.fresh_name(&format!("H({})", self.names(v).join(","))));
        let mut vertices: Vec<Vec<usize>> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != vi)
            .map(|(_, w)| w.0.clone())
            .collect();
        for &f in v.facets() {
            vertices.push(v.without(f).with(h).0);
        }
        let q = Self::from_indices(self.dim, facets, vertices).expect("vertex truncation preserves simplicity");
        Ok((q, h))
    }
}

/// Output of [`Polytope::prism`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prism {
    pub polytope: Polytope,
    pub bottom: usize,
    pub top: usize,
}

fn for_each_subset(items: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(items: &[usize], k: usize, start: usize, buf: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if buf.len() == k {
            f(buf);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - buf.len() {
                break;
            }
            buf.push(items[i]);
            go(items, k, i + 1, buf, f);
            buf.pop();
        }
    }
    go(items, k, 0, &mut Vec::with_capacity(k), f)
}

/// A set of facets marked as exceptional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalMarking {
    exceptional: Vec<usize>,
}

impl ExceptionalMarking {
    /// Facet order is preserved; duplicates are dropped.
    pub fn new(facets: Vec<usize>) -> Self {
        let mut exceptional = Vec::with_capacity(facets.len());
        for f in facets {
            if !exceptional.contains(&f) {
                exceptional.push(f);
            }
        }
        ExceptionalMarking { exceptional }
    }

    pub fn from_names(p: &Polytope, names: &[String]) -> Result<Self, PolytopeError> {
        names
            .iter()
            .map(|n| p.facet_index(n).ok_or_else(|| PolytopeError::UnknownFacet(n.clone())))
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
    }

    pub fn facets(&self) -> &[usize] {
        &self.exceptional
    }

    pub fn contains(&self, facet: usize) -> bool {
        self.exceptional.contains(&facet)
    }

    pub fn len(&self) -> usize {
        self.exceptional.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exceptional.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarkingViolation {
    /// A vertex on two exceptional facets.
    Intersecting { vertex: Face, facets: (usize, usize) },
    /// A vertex on no exceptional facet.
    Uncovered { vertex: Face },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MarkingReport {
    pub violations: Vec<MarkingViolation>,
}

impl MarkingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that exceptional facets are pairwise disjoint and cover every vertex.
pub fn validate_marking(p: &Polytope, m: &ExceptionalMarking) -> Result<MarkingReport, PolytopeError> {
    if let Some(&f) = m.facets().iter().find(|&&f| f >= p.num_facets()) {
        return Err(PolytopeError::FacetOutOfRange(f));
    }
    let mut report = MarkingReport::default();
    for v in p.vertices() {
        let on: Vec<usize> = m.facets().iter().copied().filter(|&f| v.contains(f)).collect();
        match on.as_slice() {
            [] => report
                .violations
                .push(MarkingViolation::Uncovered { vertex: v.clone() }),
            [_] => {}
            [a, b, ..] => report.violations.push(MarkingViolation::Intersecting {
                vertex: v.clone(),
                facets: (*a, *b),
            }),
        }
    }
    Ok(report)
}

impl fmt::Display for MarkingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarkingViolation::Intersecting { vertex, facets } => write!(
                f,
                "vertex {:?} lies on exceptional facets #{} and #{}",
                vertex.facets(),
                facets.0,
                facets.1
            ),
            MarkingViolation::Uncovered { vertex } => {
                write!(f, "vertex {:?} lies on no exceptional facet", vertex.facets())
            }
        }
    }
}
