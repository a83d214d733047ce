mod common;

use common::*;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use qtorb::lattice::{self, IntVector, Sublattice};
use qtorb::{
    chern_numbers, delta_equivalent, qbd_decompose, BigInt, CharacteristicModel, DeltaSearch, OmniorientedModel,
    Polytope,
};

fn vector(n: usize) -> impl Strategy<Value = IntVector> {
    prop::collection::vec(-4i64..=4, n).prop_map(IntVector::from)
}

fn square_matrix() -> impl Strategy<Value = Vec<IntVector>> {
    (1usize..=4).prop_flat_map(|n| prop::collection::vec(vector(n), n))
}

/// Rank over Q by fraction-free elimination on i128, independent of the
/// library's Hermite form.
fn oracle_rank(vs: &[IntVector]) -> usize {
    let mut rows: Vec<Vec<i128>> = vs
        .iter()
        .map(|v| v.entries().iter().map(|x| i128::try_from(x).unwrap()).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let (a, b) = (rows[rank][c], rows[r][c]);
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x = *x * a - y * b;
                }
                let g = rows[r].iter().fold(0i128, |g, x| gcd(g, x.abs()));
                if g > 1 {
                    rows[r].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Leibniz expansion.
fn oracle_det(cols: &[IntVector]) -> BigInt {
    let n = cols.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = BigInt::zero();
    permutations(&mut perm, 0, &mut |p| {
        let mut term = BigInt::from(qtorb::orientation::permutation_sign(p));
        for (j, &i) in p.iter().enumerate() {
            term *= &cols[j][i];
        }
        total += term;
    });
    total
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Every `D` with entries in `[-bound, bound]` and `D ξ₁ = ξ₂`, by enumeration.
fn brute_force_delta(m1: &CharacteristicModel, m2: &CharacteristicModel, bound: i64) -> Vec<Vec<IntVector>> {
    let n = m1.dim();
    let entries: Vec<i64> = (-bound..=bound).collect();
    let total = entries.len().pow((n * n) as u32);
    let mut found = Vec::new();
    for mut code in 0..total {
        let mut flat = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            flat.push(entries[code % entries.len()]);
            code /= entries.len();
        }
        let rows: Vec<IntVector> = flat.chunks(n).map(|r| IntVector::from(r.to_vec())).collect();
        let maps = m1.labels().iter().zip(m2.labels()).all(|(a, b)| {
            let image: Vec<BigInt> = rows.iter().map(|r| r.dot(a.entries())).collect();
            IntVector::new(image) == *b
        });
        let cols: Vec<IntVector> = (0..n)
            .map(|j| IntVector::from(flat.iter().skip(j).step_by(n).copied().collect::<Vec<_>>()))
            .collect();
        if maps && lattice::det(&cols).unwrap().abs() == BigInt::from(1) {
            found.push(rows);
        }
    }
    found
}

fn small_model(seed: u64, dim: usize) -> CharacteristicModel {
    let mut rng = rng(seed);
    let p = random_polytope(&mut rng, dim, 12);
    random_valid_model(&mut rng, &p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rank_matches_elimination(vs in (1usize..=4).prop_flat_map(|n| prop::collection::vec(vector(n), 0..=5))) {
        prop_assert_eq!(lattice::rank(&vs).unwrap(), oracle_rank(&vs));
        prop_assert_eq!(lattice::is_independent(&vs).unwrap(), oracle_rank(&vs) == vs.len());
    }

    #[test]
    fn det_matches_leibniz(cols in square_matrix()) {
        let d = lattice::det(&cols).unwrap();
        prop_assert_eq!(&d, &oracle_det(&cols));
        prop_assert_eq!(d.is_zero(), oracle_rank(&cols) < cols.len());
    }

    #[test]
    fn adjugate_inverts_up_to_det(cols in square_matrix()) {
        let n = cols.len();
        let adj = lattice::adjugate(&cols).unwrap();
        let d = lattice::det(&cols).unwrap();
        for (i, row) in adj.iter().enumerate() {
            for (j, col) in cols.iter().enumerate() {
                let entry: BigInt = (0..n).map(|k| &row[k] * &col[k]).sum();
                prop_assert_eq!(entry, if i == j { d.clone() } else { BigInt::zero() });
            }
        }
    }

    #[test]
    fn sublattice_membership(gens in (1usize..=3).prop_flat_map(|n| (prop::collection::vec(vector(n), 1..=3), prop::collection::vec(-3i64..=3, 3)))) {
        let (gens, coeffs) = gens;
        let n = gens[0].len();
        let l = Sublattice::new(&gens, n).unwrap();
        prop_assert_eq!(l.rank(), oracle_rank(&gens));
        let mut combo = IntVector::zeros(n);
        for (g, c) in gens.iter().zip(&coeffs) {
            let e: Vec<BigInt> = combo.entries().iter().zip(g.scaled(&BigInt::from(*c)).entries()).map(|(a, b)| a + b).collect();
            combo = IntVector::new(e);
        }
        prop_assert!(l.contains(&combo).unwrap());
        prop_assert!(l.rational_span_contains(&combo).unwrap());
        for b in l.basis() {
            prop_assert!(l.contains(b).unwrap());
        }
    }

    #[test]
    fn avoiding_vector_avoids(spans in (1usize..=3).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(vector(n), 1..=2), 0..=4))) {
        let Some(n) = spans.first().map(|s| s[0].len()) else { return Ok(()) };
        let lattices: Vec<Sublattice> = spans.iter().filter_map(|g| {
            let l = Sublattice::new(g, n).unwrap();
            (l.rank() < n).then_some(l)
        }).collect();
        let v = lattice::find_avoiding_vector(&lattices, n).unwrap();
        prop_assert!(lattice::is_primitive(&v));
        for l in &lattices {
            let mut with = l.basis().to_vec();
            with.push(v.clone());
            prop_assert_eq!(oracle_rank(&with), l.rank() + 1);
        }
        // Minimality: nothing earlier in the enumeration order also avoids.
        let earlier = (1..=v.max_norm().to_string().parse::<u64>().unwrap())
            .flat_map(|r| lattice::shell(n, r))
            .take_while(|w| *w != v)
            .find(|w| lattice::is_primitive(w) && lattices.iter().all(|l| !l.rational_span_contains(w).unwrap()));
        prop_assert_eq!(earlier, None);
    }

    #[test]
    fn truncation_and_prism_counts(seed in any::<u64>(), dim in 2usize..=3) {
        let mut rng = rng(seed);
        let p = random_polytope(&mut rng, dim, 16);
        let v = p.vertices()[0].clone();
        let (t, h) = p.truncate_vertex(&v).unwrap();
        prop_assert_eq!(t.num_facets(), p.num_facets() + 1);
        prop_assert_eq!(t.num_vertices(), p.num_vertices() + dim - 1);
        prop_assert_eq!(t.vertices().iter().filter(|w| w.contains(h)).count(), dim);
        let prism = p.prism();
        prop_assert_eq!(prism.polytope.num_facets(), p.num_facets() + 2);
        prop_assert_eq!(prism.polytope.num_vertices(), 2 * p.num_vertices());
        prop_assert_eq!(prism.polytope.dim(), dim + 1);
    }

    #[test]
    fn eta_extension_is_valid(seed in any::<u64>(), dim in 2usize..=3) {
        let x = small_model(seed, dim);
        let d = qbd_decompose(&x, None).unwrap();
        prop_assert!(d.isotropy.validate().passed());
        prop_assert!(d.isotropy.extend_to_eta().unwrap().validate().passed());
        prop_assert_eq!(&d.isotropy.restrict_to_exceptional(d.top).unwrap(), &x);
    }

    #[test]
    fn delta_equivalence_is_reflexive_and_symmetric(seed in any::<u64>(), dim in 2usize..=3) {
        let x = small_model(seed, dim);
        let mut rng = rng(seed ^ 0xd);
        let g = random_unimodular(&mut rng, dim);
        let y = x.transformed(&g).unwrap();
        let bound = g.iter().flat_map(|r| r.entries()).map(|e| e.abs()).max().unwrap();
        let bound = u64::try_from(&bound).unwrap();
        match delta_equivalent(&x, &y, bound).unwrap() {
            DeltaSearch::Found(d) => prop_assert_eq!(&d, &g),
            other => prop_assert!(false, "{:?}", other),
        }
        let DeltaSearch::Found(back) = delta_equivalent(&y, &x, u64::MAX).unwrap() else {
            return Err(TestCaseError::fail("no inverse"));
        };
        let recovered = y.transformed(&back).unwrap();
        prop_assert_eq!(&recovered, &x);
        let n = dim;
        let identity: Vec<IntVector> = (0..n).map(|k| IntVector::unit(n, k)).collect();
        prop_assert_eq!(delta_equivalent(&x, &x, 1).unwrap(), DeltaSearch::Found(identity));
    }

    #[test]
    fn reversal_negates_chern_numbers(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (x, _) = smooth_corpus(&mut rng, 1).pop().unwrap();
        let m = OmniorientedModel::canonical(x);
        let a = chern_numbers(&m).unwrap();
        let b = chern_numbers(&m.clone().reversed()).unwrap();
        for (p, q) in a.iter().zip(&b) {
            prop_assert_eq!(&p.value, &(-q.value.clone()));
        }
        let top = a.iter().find(|c| c.partition.parts() == [m.model().dim()]).unwrap();
        let signed_vertices: i64 = m.vertex_signs().unwrap().iter().map(|&s| i64::from(s)).sum();
        prop_assert_eq!(&top.value, &BigInt::from(signed_vertices));
    }

    #[test]
    fn flipping_a_facet_flips_its_vertices(seed in any::<u64>(), facet in any::<prop::sample::Index>()) {
        let x = small_model(seed, 2);
        let m = OmniorientedModel::canonical(x);
        let f = facet.index(m.model().polytope().num_facets());
        let before = m.vertex_signs().unwrap();
        let after = m.clone().with_flip(f).vertex_signs().unwrap();
        for (v, face) in m.model().polytope().vertices().iter().enumerate() {
            let flipped = before[v] != after[v];
            prop_assert_eq!(flipped, face.contains(f));
        }
    }
}

#[test]
fn delta_search_agrees_with_enumeration() {
    let mut rng = rng(7);
    let seg = Polytope::simplex(1).unwrap();
    let mut pairs = vec![
        (model(seg.clone(), &[&[1], &[-1]]), model(seg.clone(), &[&[-1], &[1]])),
        (model(seg.clone(), &[&[1], &[2]]), model(seg, &[&[2], &[1]])),
        (
            cp(2),
            model(Polytope::simplex(2).unwrap(), &[&[0, 1], &[1, 0], &[-1, -1]]),
        ),
    ];
    for seed in 0..12 {
        let x = small_model(seed, 2);
        let g = random_unimodular(&mut rng, 2);
        let y = x.transformed(&g).unwrap();
        pairs.push((x.clone(), y));
        pairs.push((x.clone(), small_model(seed + 100, 2)));
        pairs.push((x.clone(), x));
    }
    for (a, b) in pairs {
        if a.polytope() != b.polytope() {
            continue;
        }
        for bound in 1..=2 {
            let brute = brute_force_delta(&a, &b, bound);
            assert!(brute.len() <= 1, "a rational basis pins the matrix down");
            let fast = delta_equivalent(&a, &b, bound as u64).unwrap();
            match brute.first() {
                Some(d) => assert_eq!(fast, DeltaSearch::Found(d.clone())),
                None => assert_eq!(fast, DeltaSearch::NotFoundWithinBound),
            }
        }
    }
}
