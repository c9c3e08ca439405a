use gridknot_normal::vector::to_dense;
use gridknot_normal::{build_triangulation, matching_matrix, vertex_enumerate, vertex_link};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Rank over the rationals by plain Gaussian elimination.
fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &pivot;
                for k in c..cols {
                    let v = &m[r][k] * &f;
                    m[i][k] -= v;
                }
            }
        }
        r += 1;
    }
    r
}

#[test]
fn triangulation_audit_two_to_sixteen() {
    for n in 2..=16 {
        let a = build_triangulation(n).unwrap().audit();
        assert!(a.ok_for(n), "n = {n}: {a:?}");
    }
}

#[test]
fn matching_system_at_two() {
    let tri = build_triangulation(2).unwrap();
    let dense = to_dense(&matching_matrix(&tri), 28);
    assert_eq!(dense.len(), 24);
    assert!(dense.iter().flatten().all(|&x| (-1..=1).contains(&x)));
    // Frozen from the elimination oracle.
    assert_eq!(rank(&dense), 16);
}

#[test]
fn vertex_links_in_kernel() {
    for n in 2..=3 {
        let tri = build_triangulation(n).unwrap();
        let dense = to_dense(&matching_matrix(&tri), 7 * n * n);
        for v in 0..2 * n {
            let link = vertex_link(&tri, v);
            for row in &dense {
                let s: BigInt = row.iter().zip(&link.coords).map(|(&a, x)| BigInt::from(a) * BigInt::from(x.clone())).sum();
                assert!(s.is_zero());
            }
        }
    }
}

/// A non-negative kernel vector spans an extreme ray exactly when the
/// matching columns on its support have rank one less than the support size.
#[test]
fn enumerated_vectors_are_extreme() {
    for n in 2..=3 {
        let tri = build_triangulation(n).unwrap();
        let dense = to_dense(&matching_matrix(&tri), 7 * n * n);
        for v in vertex_enumerate(&tri, 1).unwrap() {
            let support: Vec<usize> = (0..v.coords.len()).filter(|&k| !v.coords[k].is_zero()).collect();
            let sub: Vec<Vec<i64>> = dense.iter().map(|row| support.iter().map(|&k| row[k]).collect()).collect();
            assert_eq!(rank(&sub), support.len() - 1, "n = {n}");
            let g = v.coords.iter().fold(num_bigint::BigUint::zero(), |g, x| num_integer::Integer::gcd(&g, x));
            assert!(g.is_one());
        }
    }
}
