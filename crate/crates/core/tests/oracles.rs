//! Cross-checks against straightforward brute-force computations that share no
//! code with the library's own enumeration, group and orbit routines.

use std::collections::BTreeSet;

use crystal_core::charsub::{construct_model, find_rescaling, from_prime_constants};
use crystal_core::fmcount::count_fm_formula;
use crystal_core::orthogroup::m_invariant;
use crystal_core::{
    isotropic_count_formula, make_extension, ogus_basis, ortho_group_elements, Budget, CharDatum, DescentOptions,
    Matrix, QuadraticSpace, Subspace,
};
use num_bigint::BigUint;

fn pair(g: &[Vec<u64>], x: &[u64], y: &[u64], p: u64) -> u64 {
    let mut s = 0;
    for i in 0..x.len() {
        for j in 0..y.len() {
            s = (s + x[i] * g[i][j] % p * y[j]) % p;
        }
    }
    s
}

fn all_vectors(p: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..p).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

/// All `g` with `gᵀ G g = G`, built column by column.
fn isometries(gram: &[Vec<u64>], p: u64) -> Vec<Vec<Vec<u64>>> {
    fn rec(gram: &[Vec<u64>], p: u64, vs: &[Vec<u64>], cols: &mut Vec<Vec<u64>>, out: &mut Vec<Vec<Vec<u64>>>) {
        let j = cols.len();
        let n = gram.len();
        if j == n {
            out.push((0..n).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect());
            return;
        }
        for u in vs {
            if pair(gram, u, u, p) != gram[j][j] {
                continue;
            }
            if (0..j).all(|i| pair(gram, &cols[i], u, p) == gram[i][j]) {
                cols.push(u.clone());
                rec(gram, p, vs, cols, out);
                cols.pop();
            }
        }
    }
    let vs = all_vectors(p, gram.len());
    let mut out = Vec::new();
    rec(gram, p, &vs, &mut Vec::new(), &mut out);
    out
}

fn stabilizer(d: &CharDatum) -> Vec<Vec<Vec<u64>>> {
    isometries(d.space().gram(), d.p())
        .into_iter()
        .filter(|g| d.k().image_under(&Matrix::from_prime(d.field(), g)).unwrap() == *d.k())
        .collect()
}

fn apply(g: &[Vec<u64>], v: &[u64], p: u64) -> Vec<u64> {
    g.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum::<u64>() % p).collect()
}

#[test]
fn isotropic_counts_by_direct_loop() {
    for (p, s) in [(3u64, 1usize), (3, 2), (3, 3), (5, 1), (5, 2), (7, 2)] {
        let v = QuadraticSpace::standard(p, s).unwrap();
        let direct = all_vectors(p, 2 * s)
            .into_iter()
            .filter(|x| x.iter().any(|&c| c != 0) && pair(v.gram(), x, x, p) == 0)
            .count();
        let listed = v.enumerate_isotropic(&Budget::default()).unwrap();
        assert_eq!(listed.len(), direct, "p={p} sigma0={s}");
        assert_eq!(isotropic_count_formula(p, s), BigUint::from(direct));
    }
}

#[test]
fn group_orders_match_isometry_search() {
    let budget = Budget::default();
    for (p, s, a) in [(3u64, 1usize, vec![]), (5, 1, vec![]), (3, 2, vec![0u64]), (3, 2, vec![1]), (3, 2, vec![2])] {
        let d = from_prime_constants(p, s, &a).unwrap();
        let brute = stabilizer(&d);
        let found = ortho_group_elements(&d, &budget).unwrap();
        assert_eq!(found.len(), brute.len(), "p={p} sigma0={s} a={a:?}");
        let brute: BTreeSet<_> = brute.into_iter().collect();
        let found: BTreeSet<_> = found.into_iter().map(|e| e.matrix).collect();
        assert_eq!(brute, found);
    }
}

#[test]
fn partner_counts_from_orbit_sweep() {
    for (p, s, a) in [(3u64, 1usize, vec![]), (3, 2, vec![0u64]), (3, 2, vec![1])] {
        let d = from_prime_constants(p, s, &a).unwrap();
        let group = stabilizer(&d);
        let mut seen = BTreeSet::new();
        let mut orbits = 0u64;
        for x in all_vectors(p, 2 * s) {
            if x.iter().all(|&c| c == 0) || pair(d.space().gram(), &x, &x, p) != 0 || seen.contains(&x) {
                continue;
            }
            orbits += 1;
            for g in &group {
                seen.insert(apply(g, &x, p));
            }
        }
        let m = m_invariant(&ogus_basis(&d).unwrap().a, s);
        assert_eq!(count_fm_formula(p, s, m).unwrap(), BigUint::from(orbits + 1), "p={p} sigma0={s} a={a:?}");
    }
}

#[test]
fn gf9_example_matches_rebuilt_datum() {
    let f = make_extension(3, 2).unwrap();
    let v = QuadraticSpace::standard(3, 1).unwrap();
    let k = Subspace::new(v.clone(), &f, vec![vec![f.one(), f.gen()]]).unwrap();
    let example = CharDatum::new(v, k).unwrap();
    let rebuilt = from_prime_constants(3, 1, &[]).unwrap();
    assert_eq!(rebuilt.field(), example.field());
    // an isometry V_example -> V_rebuilt carrying K onto K
    let ge = example.space().gram();
    let gr = rebuilt.space().gram();
    let found = all_vectors(3, 4).into_iter().any(|e| {
        let g = vec![vec![e[0], e[1]], vec![e[2], e[3]]];
        let gt = [vec![e[0], e[2]], vec![e[1], e[3]]];
        let pulled: Vec<Vec<u64>> = (0..2)
            .map(|i| (0..2).map(|j| (0..2).map(|k| gt[i][k] * apply(gr, &[g[0][j], g[1][j]], 3)[k]).sum::<u64>() % 3).collect())
            .collect();
        pulled == ge && example.k().vectors().iter().all(|x| {
            let gx = Matrix::from_prime(example.field(), &g).mul_vec(x);
            rebuilt.k().contains(&gx)
        })
    });
    assert!(found);
}

#[test]
fn constants_round_trip_over_gf9() {
    let base = make_extension(3, 2).unwrap();
    let elements = base.elements().unwrap();
    for a in &elements {
        let model = construct_model(2, std::slice::from_ref(a), &base, &DescentOptions::default()).unwrap();
        let ob = ogus_basis(&model.datum).unwrap();
        assert_eq!(ob.a[0].is_zero(), a.is_zero());
        assert!(find_rescaling(model.datum.field(), &ob.a, &model.a, 2).unwrap().is_some());
    }
}
