//! Chern numbers of smooth omnioriented models by fixed-point localization.
//!
//! At a vertex `v` the tangent weights are the basis dual to the (signed)
//! facet labels at `v`. For a partition `ω` of `n`,
//!
//! ```text
//! c_ω[M] = Σ_v  sign(v) · Π_i e_{ω_i}(w_v) / Π_j w_{v,j}
//! ```
//!
//! evaluated at a point where no weight form vanishes. The sum is a constant
//! rational function, so two evaluation points must agree and give an integer.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::charmodel::ModelError;
use crate::cobordism::CobordismRelation;
use crate::lattice::{self, IntVector};
use crate::orientation::OmniorientedModel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChernError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("vertex {0:?} is singular (|det| = {1}); localization needs a smooth model")]
    NotSmooth(Vec<String>, BigInt),
    #[error("partition {0} does not sum to {1}")]
    WrongWeight(Partition, usize),
    /// Values at the two evaluation points, with the points.
    #[error("localization sum is not a constant integer: {} at {}, {} at {}", .0.0, .0.1, .0.2, .0.3)]
    Inconsistent(Box<(BigRational, IntVector, BigRational, IntVector)>),
}

/// A partition of `n`: positive parts in non-increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Option<Self> {
        if parts.contains(&0) {
            return None;
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Some(Partition(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `n`, largest first part first: `(n), (n-1,1), …, (1,…,1)`.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn go(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            prefix.push(p);
            go(rest - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// Fixed-point data: tangent weights and sign at every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSystem {
    pub dim: usize,
    pub weights: Vec<Vec<IntVector>>,
    pub signs: Vec<i8>,
}

/// The basis dual to the signed labels at vertex `v`, rows of the inverse
/// label matrix (facets in sorted order).
pub fn tangent_weights(m: &OmniorientedModel, v: usize) -> Result<Vec<IntVector>, ChernError> {
    let labels = m.vertex_labels(v);
    let d = lattice::det(&labels).map_err(ModelError::from)?;
    if !d.abs().is_one() {
        let p = m.model().polytope();
        return Err(ChernError::NotSmooth(p.names(&p.vertices()[v]), d.abs()));
    }
    let adj = lattice::adjugate(&labels).map_err(ModelError::from)?;
    Ok(adj.iter().map(|row| row.scaled(&d)).collect())
}

impl WeightSystem {
    pub fn of(m: &OmniorientedModel) -> Result<Self, ChernError> {
        let p = m.model().polytope();
        let weights = (0..p.num_vertices())
            .map(|v| tangent_weights(m, v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WeightSystem {
            dim: p.dim(),
            weights,
            signs: m.vertex_signs()?,
        })
    }

    fn degenerate_at(&self, point: &[BigInt]) -> bool {
        self.weights.iter().flatten().any(|w| w.dot(point).is_zero())
    }

    /// The localization sum at one point.
    pub fn evaluate(&self, omega: &Partition, point: &[BigInt]) -> BigRational {
        let mut total = BigRational::zero();
        for (ws, &sign) in self.weights.iter().zip(&self.signs) {
            let values: Vec<BigInt> = ws.iter().map(|w| w.dot(point)).collect();
            let elementary = elementary_symmetric(&values);
            let numerator: BigInt = omega.parts().iter().map(|&k| elementary[k].clone()).product();
            let denominator: BigInt = values.iter().product();
            let term = BigRational::new(numerator, denominator);
            if sign > 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    /// Two evaluation points with no vanishing weight form, drawn from
    /// consecutive disjoint blocks of primes.
    pub fn evaluation_points(&self) -> [IntVector; 2] {
        let mut primes = Primes::default();
        let mut found = Vec::with_capacity(2);
        while found.len() < 2 {
            let point: Vec<BigInt> = (0..self.dim).map(|_| BigInt::from(primes.next_prime())).collect();
            if !self.degenerate_at(&point) {
                found.push(point);
            }
        }
        let second = found.pop().expect("two points");
        let first = found.pop().expect("two points");
        [IntVector::new(first), IntVector::new(second)]
    }
}

/// `e_0, …, e_len` of the given values.
fn elementary_symmetric(values: &[BigInt]) -> Vec<BigInt> {
    let mut e = vec![BigInt::zero(); values.len() + 1];
    e[0] = BigInt::one();
    for (i, x) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            let add = &e[k - 1] * x;
            e[k] += add;
        }
    }
    e
}

#[derive(Default)]
struct Primes {
    found: Vec<u64>,
}

impl Primes {
    fn next_prime(&mut self) -> u64 {
        let mut c = self.found.last().map_or(2, |p| p + 1);
        while self
            .found
            .iter()
            .take_while(|&&p| p * p <= c)
            .any(|&p| c.is_multiple_of(p))
        {
            c += 1;
        }
        self.found.push(c);
        c
    }
}

/// A Chern number with the two points it was confirmed at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChernValue {
    pub partition: Partition,
    #[serde(serialize_with = "lattice::serialize_int")]
    pub value: BigInt,
    pub points: [IntVector; 2],
}

fn checked_value(ws: &WeightSystem, omega: &Partition, points: &[IntVector; 2]) -> Result<BigInt, ChernError> {
    if omega.weight() != ws.dim {
        return Err(ChernError::WrongWeight(omega.clone(), ws.dim));
    }
    let a = ws.evaluate(omega, points[0].entries());
    let b = ws.evaluate(omega, points[1].entries());
    if a != b || !a.is_integer() {
        return Err(ChernError::Inconsistent(Box::new((
            a,
            points[0].clone(),
            b,
            points[1].clone(),
        ))));
    }
    Ok(a.to_integer())
}

pub fn chern_number(m: &OmniorientedModel, omega: &Partition) -> Result<ChernValue, ChernError> {
    let ws = WeightSystem::of(m)?;
    let points = ws.evaluation_points();
    let value = checked_value(&ws, omega, &points)?;
    Ok(ChernValue {
        partition: omega.clone(),
        value,
        points,
    })
}

/// Every Chern number of a smooth model, one per partition of its dimension.
pub fn chern_numbers(m: &OmniorientedModel) -> Result<Vec<ChernValue>, ChernError> {
    let ws = WeightSystem::of(m)?;
    let points = ws.evaluation_points();
    partitions(ws.dim)
        .into_iter()
        .map(|omega| {
            let value = checked_value(&ws, &omega, &points)?;
            Ok(ChernValue {
                partition: omega,
                value,
                points: points.clone(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerificationStatus {
    /// Every signed sum vanished.
    Pass,
    /// Some signed sum is nonzero.
    Fail,
    /// At least one component is an orbifold; only structural checks apply.
    Unverifiable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionSum {
    pub partition: Partition,
    #[serde(serialize_with = "lattice::serialize_int")]
    pub sum: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentNumbers {
    pub index: usize,
    pub sign: i8,
    /// `None` for orbifold components.
    pub numbers: Option<Vec<ChernValue>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationVerification {
    pub status: VerificationStatus,
    pub sums: Vec<PartitionSum>,
    pub components: Vec<ComponentNumbers>,
    /// Indices of components that are not smooth.
    pub orbifold_components: Vec<usize>,
}

impl RelationVerification {
    pub fn passed(&self) -> bool {
        self.status == VerificationStatus::Pass
    }
}

/// Checks that `Σ sign · c_ω` vanishes for every partition `ω` of `n`.
pub fn verify_relation(r: &CobordismRelation) -> Result<RelationVerification, ChernError> {
    let mut components = Vec::with_capacity(r.components.len());
    let mut orbifold_components = Vec::new();
    let mut dim = None;
    for (index, c) in r.components.iter().enumerate() {
        dim.get_or_insert(c.model.model().dim());
        let numbers = if c.model.model().is_smooth() {
            Some(chern_numbers(&c.model)?)
        } else {
            orbifold_components.push(index);
            None
        };
        components.push(ComponentNumbers {
            index,
            sign: c.sign,
            numbers,
        });
    }
    if !orbifold_components.is_empty() {
        return Ok(RelationVerification {
            status: VerificationStatus::Unverifiable,
            sums: Vec::new(),
            components,
            orbifold_components,
        });
    }
    let sums: Vec<PartitionSum> = partitions(dim.unwrap_or(0))
        .into_iter()
        .enumerate()
        .map(|(i, partition)| {
            let sum = components
                .iter()
                .map(|c| BigInt::from(c.sign) * &c.numbers.as_ref().expect("smooth")[i].value)
                .sum();
            PartitionSum { partition, sum }
        })
        .collect();
    let status = if sums.iter().all(|s| s.sum.is_zero()) {
        VerificationStatus::Pass
    } else {
        VerificationStatus::Fail
    };
    Ok(RelationVerification {
        status,
        sums,
        components,
        orbifold_components,
    })
}
