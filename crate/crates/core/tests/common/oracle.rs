//! Independent invariants of PD codes, used to cross-check conversions.
//! Nothing here calls into the library's own geometry.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

pub type Pd = Vec<[u32; 4]>;

fn find(parent: &mut Vec<usize>, mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

fn union(parent: &mut Vec<usize>, a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra] = rb;
    }
}

fn label_index(pd: &Pd) -> HashMap<u32, usize> {
    let mut idx = HashMap::new();
    for x in pd {
        for &l in x {
            let next = idx.len();
            idx.entry(l).or_insert(next);
        }
    }
    idx
}

/// Link components of the diagram (without free loops).
pub fn components(pd: &Pd) -> usize {
    let idx = label_index(pd);
    let mut parent: Vec<usize> = (0..idx.len()).collect();
    for x in pd {
        union(&mut parent, idx[&x[0]], idx[&x[2]]);
        union(&mut parent, idx[&x[1]], idx[&x[3]]);
    }
    (0..idx.len()).filter(|&i| find(&mut parent, i) == i).count()
}

/// |det| by fraction-free Gaussian elimination.
pub fn bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    (BigInt::from(sign) * &m[n - 1][n - 1]).abs()
}

/// Knot determinant from the Fox colouring matrix: one equation
/// `2 over - under_in - under_out` per crossing over the arcs of the
/// diagram, with one row and one column deleted.
pub fn determinant(pd: &Pd, free_loops: usize) -> BigInt {
    let c = pd.len();
    if c == 0 {
        return BigInt::from(if free_loops == 1 { 1 } else { 0 });
    }
    if free_loops > 0 {
        return BigInt::zero();
    }
    let idx = label_index(pd);
    let mut parent: Vec<usize> = (0..idx.len()).collect();
    for x in pd {
        union(&mut parent, idx[&x[1]], idx[&x[3]]);
    }
    let mut arcs = HashMap::new();
    for i in 0..idx.len() {
        let r = find(&mut parent, i);
        let next = arcs.len();
        arcs.entry(r).or_insert(next);
    }
    if arcs.len() != c {
        // A component that never passes under splits off.
        return BigInt::zero();
    }
    let mut arc = |l: u32| arcs[&find(&mut parent, idx[&l])];
    let mut m = vec![vec![BigInt::zero(); c]; c];
    for (i, x) in pd.iter().enumerate() {
        m[i][arc(x[1])] += 2;
        m[i][arc(x[0])] -= 1;
        m[i][arc(x[2])] -= 1;
    }
    let minor: Vec<Vec<BigInt>> = m[..c - 1].iter().map(|row| row[..c - 1].to_vec()).collect();
    bareiss(minor)
}

/// Laurent polynomial in `A`: exponent to coefficient.
pub type Laurent = BTreeMap<i64, i64>;

fn mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (&i, &x) in a {
        for (&j, &y) in b {
            *out.entry(i + j).or_default() += x * y;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

/// Crossing signs from the over-strand direction, found by walking each
/// component. Under strands run slot 0 to 2.
fn signs(pd: &Pd) -> Vec<i64> {
    let mut at: HashMap<u32, Vec<(usize, usize)>> = HashMap::new();
    for (i, x) in pd.iter().enumerate() {
        for (s, &l) in x.iter().enumerate() {
            at.entry(l).or_default().push((i, s));
        }
    }
    let mut dir: Vec<Option<bool>> = vec![None; pd.len()];
    let other = |x: usize, s: usize| {
        let v = &at[&pd[x][s]];
        if v[0] == (x, s) {
            v[1]
        } else {
            v[0]
        }
    };
    let walk = |x0: usize, s0: usize, dir: &mut Vec<Option<bool>>| {
        let (mut x, mut s) = (x0, s0);
        loop {
            let (y, j) = other(x, s);
            if j == 1 || j == 3 {
                dir[y].get_or_insert(j == 1);
            }
            x = y;
            s = (j + 2) % 4;
            if (x, s) == (x0, s0) {
                break;
            }
        }
    };
    for x in 0..pd.len() {
        walk(x, 2, &mut dir);
    }
    for x in 0..pd.len() {
        if dir[x].is_none() {
            dir[x] = Some(true);
            walk(x, 3, &mut dir);
        }
    }
    // Entering slot 1 means the over strand runs from the second slot to the
    // fourth, which is a negative crossing in this convention.
    dir.iter().map(|d| if d.unwrap() { -1 } else { 1 }).collect()
}

/// Writhe-normalised Kauffman bracket `(-A^3)^(-w) <D>`, by state sum. It
/// distinguishes mirror images, unlike the determinant.
pub fn jones(pd: &Pd, free_loops: usize) -> Laurent {
    let c = pd.len();
    assert!(c <= 20, "state sum too large");
    let idx = label_index(pd);
    let delta: Laurent = [(2, -1), (-2, -1)].into_iter().collect();
    let mut bracket = Laurent::new();
    for state in 0u32..(1u32 << c) {
        let mut parent: Vec<usize> = (0..idx.len()).collect();
        let mut a_count = 0i64;
        for (i, x) in pd.iter().enumerate() {
            let [a, b, cc, d] = x.map(|l| idx[&l]);
            if state >> i & 1 == 0 {
                a_count += 1;
                union(&mut parent, a, b);
                union(&mut parent, cc, d);
            } else {
                union(&mut parent, a, d);
                union(&mut parent, b, cc);
            }
        }
        let loops = (0..idx.len()).filter(|&i| find(&mut parent, i) == i).count() + free_loops;
        let mut term: Laurent = [(a_count - (c as i64 - a_count), 1)].into_iter().collect();
        for _ in 1..loops.max(1) {
            term = mul(&term, &delta);
        }
        for (e, v) in term {
            *bracket.entry(e).or_default() += v;
        }
    }
    if c == 0 {
        bracket = [(0, 1)].into_iter().collect();
        for _ in 1..free_loops.max(1) {
            bracket = mul(&bracket, &delta);
        }
    }
    bracket.retain(|_, v| *v != 0);
    let w: i64 = signs(pd).iter().sum();
    let sign = if w % 2 == 0 { 1 } else { -1 };
    let norm: Laurent = [(-3 * w, sign)].into_iter().collect();
    mul(&bracket, &norm)
}

/// The same polynomial with `A` replaced by `A^-1`.
pub fn mirror(p: &Laurent) -> Laurent {
    p.iter().map(|(&e, &v)| (-e, v)).collect()
}
