//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use num_traits::Signed;
use qtorb::lattice::{self, IntVector};
use qtorb::{BigInt, CharacteristicModel, Face, Polytope};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn iv(xs: &[i64]) -> IntVector {
    IntVector::from(xs.to_vec())
}

pub fn model(p: Polytope, labels: &[&[i64]]) -> CharacteristicModel {
    CharacteristicModel::new(p, labels.iter().map(|l| iv(l)).collect()).unwrap()
}

pub fn cp(n: usize) -> CharacteristicModel {
    let mut labels: Vec<IntVector> = (0..n).map(|i| IntVector::unit(n, i)).collect();
    labels.push(IntVector::from(vec![-1; n]));
    CharacteristicModel::new(Polytope::simplex(n).unwrap(), labels).unwrap()
}

/// A simple polytope of dimension `dim` with at most `max_vertices` vertices:
/// a simplex or a prism, followed by random vertex truncations.
pub fn random_polytope(rng: &mut TestRng, dim: usize, max_vertices: usize) -> Polytope {
    let mut p = match rng.gen_range(0..3) {
        0 => Polytope::simplex(dim).unwrap(),
        1 => Polytope::simplex(dim - 1).unwrap().prism().polytope,
        _ if dim == 3 => Polytope::simplex(1).unwrap().prism().polytope.prism().polytope,
        _ => Polytope::simplex(dim).unwrap(),
    };
    let cuts = rng.gen_range(0..=4);
    for _ in 0..cuts {
        if p.num_vertices() + dim - 1 > max_vertices {
            break;
        }
        let v = p.vertices().choose(rng).unwrap().clone();
        p = p.truncate_vertex(&v).unwrap().0;
    }
    p
}

fn random_vector(rng: &mut TestRng, n: usize, radius: i64) -> IntVector {
    loop {
        let v = IntVector::from((0..n).map(|_| rng.gen_range(-radius..=radius)).collect::<Vec<_>>());
        if !v.is_zero() {
            return v;
        }
    }
}

/// Labels independent at every vertex, assigned facet by facet so each
/// partial assignment stays independent on every vertex.
pub fn random_valid_model(rng: &mut TestRng, p: &Polytope) -> CharacteristicModel {
    let n = p.dim();
    'restart: loop {
        let mut labels: Vec<Option<IntVector>> = vec![None; p.num_facets()];
        for f in 0..p.num_facets() {
            let mut placed = false;
            for _ in 0..200 {
                let cand = random_vector(rng, n, 3);
                labels[f] = Some(cand);
                if partial_independent(p, &labels, f) {
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'restart;
            }
        }
        let labels = labels.into_iter().map(Option::unwrap).collect();
        return CharacteristicModel::new(p.clone(), labels).unwrap();
    }
}

fn partial_independent(p: &Polytope, labels: &[Option<IntVector>], f: usize) -> bool {
    p.vertices().iter().filter(|v| v.contains(f)).all(|v| {
        let assigned: Vec<IntVector> = v.facets().iter().filter_map(|&g| labels[g].clone()).collect();
        lattice::is_independent(&assigned).unwrap()
    })
}

/// A random matrix in `GL(n, Z)` as a product of elementary moves.
pub fn random_unimodular(rng: &mut TestRng, n: usize) -> Vec<IntVector> {
    let mut rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..(3 * n) {
        let i = rng.gen_range(0..n);
        match rng.gen_range(0..3) {
            0 if n > 1 => {
                let j = (i + rng.gen_range(1..n)) % n;
                let k = if rng.gen_bool(0.5) { 1 } else { -1 };
                let rj = rows[j].clone();
                for (a, b) in rows[i].iter_mut().zip(rj) {
                    *a += k * b;
                }
            }
            1 => rows[i].iter_mut().for_each(|a| *a = -*a),
            _ if n > 1 => {
                let j = rng.gen_range(0..n);
                rows.swap(i, j);
            }
            _ => {}
        }
    }
    rows.into_iter().map(IntVector::from).collect()
}

/// Cuts off vertex `v` and labels the new facet by the sum of the labels at
/// `v`, which keeps a smooth model smooth.
pub fn blow_up(m: &CharacteristicModel, v: &Face) -> CharacteristicModel {
    let (p, h) = m.polytope().truncate_vertex(v).unwrap();
    let n = m.dim();
    let mut sum = IntVector::zeros(n);
    for &f in v.facets() {
        let e: Vec<BigInt> = sum
            .entries()
            .iter()
            .zip(m.label(f).entries())
            .map(|(a, b)| a + b)
            .collect();
        sum = IntVector::new(e);
    }
    let labels: Vec<IntVector> = (0..p.num_facets())
        .map(|f| if f == h { sum.clone() } else { m.label(f).clone() })
        .collect();
    CharacteristicModel::new(p, labels).unwrap()
}

/// `CP^1 × X` over the prism of `X`'s polytope.
pub fn times_cp1(x: &CharacteristicModel) -> CharacteristicModel {
    let prism = x.polytope().prism();
    let n = x.dim() + 1;
    let labels: Vec<IntVector> = (0..prism.polytope.num_facets())
        .map(|f| {
            if f == prism.bottom {
                IntVector::unit(n, n - 1)
            } else if f == prism.top {
                IntVector::unit(n, n - 1).scaled(&BigInt::from(-1))
            } else {
                x.label(f).extended(BigInt::from(0))
            }
        })
        .collect();
    CharacteristicModel::new(prism.polytope, labels).unwrap()
}

/// Hirzebruch surface `F_k` over the square.
pub fn hirzebruch_surface(k: i64) -> CharacteristicModel {
    let sq = Polytope::simplex(1).unwrap().prism().polytope;
    // Facet order: F1, F2, BOTTOM, TOP.
    model(sq, &[&[1, 0], &[-1, k], &[0, 1], &[0, -1]])
}

/// First `λ₀` (by max-norm shell, then lexicographic) that completes every
/// edge of `x` to a basis, if any lies within `radius`.
pub fn basis_completing_lambda0(x: &CharacteristicModel, radius: u64) -> Option<IntVector> {
    let n = x.dim();
    let edges = x.polytope().edges();
    (1..=radius).flat_map(|r| lattice::shell(n, r)).find(|l| {
        edges.iter().all(|e| {
            let mut cols: Vec<IntVector> = e.facets().iter().map(|&f| x.label(f).clone()).collect();
            cols.push(l.clone());
            lattice::det(&cols).unwrap().abs() == BigInt::from(1)
        })
    })
}

/// Smooth models in dimensions 1 to 3 that admit a basis-completing `λ₀`.
pub fn smooth_corpus(rng: &mut TestRng, count: usize) -> Vec<(CharacteristicModel, IntVector)> {
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 50 * count, "smooth corpus generator stalled");
        let base = match rng.gen_range(0..5) {
            0 => cp(1),
            1 => times_cp1(&cp(1)),
            2 => hirzebruch_surface(rng.gen_range(-3..=3)),
            3 => times_cp1(&times_cp1(&cp(1))),
            _ => times_cp1(&hirzebruch_surface(rng.gen_range(-2..=2))),
        };
        let mut m = base;
        if m.dim() >= 2 && rng.gen_bool(0.5) {
            let v = m.polytope().vertices().choose(rng).unwrap().clone();
            m = blow_up(&m, &v);
        }
        let g = random_unimodular(rng, m.dim());
        m = m.transformed(&g).unwrap();
        assert!(m.is_smooth());
        if let Some(l) = basis_completing_lambda0(&m, 2) {
            out.push((m, l));
        }
    }
    out
}
