//! Normal coordinates in standard form: per tetrahedron, four triangle
//! types (indexed by the vertex they cut off) then three quadrilateral
//! types, `{01|23}`, `{02|13}`, `{03|12}`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::triangulation::JoinTriangulation;

pub fn tri_index(t: usize, v: usize) -> usize {
    7 * t + v
}

pub fn quad_index(t: usize, q: usize) -> usize {
    7 * t + 4 + q
}

/// The quadrilateral type that puts local vertices `a` and `b` on the same side.
pub fn quad_pairing(a: usize, b: usize) -> usize {
    match (a.min(b), a.max(b)) {
        (0, 1) | (2, 3) => 0,
        (0, 2) | (1, 3) => 1,
        (0, 3) | (1, 2) => 2,
        other => panic!("not a vertex pair: {other:?}"),
    }
}

/// Sparse matching equations: one per glued face pair and normal arc type.
/// Each row lists `(column, coefficient)`.
pub fn matching_matrix(tri: &JoinTriangulation) -> Vec<Vec<(usize, i64)>> {
    let mut rows = Vec::new();
    for t in 0..tri.tet_count() {
        for f in 0..4 {
            let gl = tri.gluings[t][f];
            let f2 = gl.perm[f];
            // Each face pair once.
            if (gl.tet, f2) < (t, f) {
                continue;
            }
            for v in (0..4).filter(|&v| v != f) {
                let w = gl.perm[v];
                let mut row: Vec<(usize, i64)> = Vec::with_capacity(4);
                let mut add = |col: usize, c: i64| match row.iter_mut().find(|(k, _)| *k == col) {
                    Some(e) => e.1 += c,
                    None => row.push((col, c)),
                };
                add(tri_index(t, v), 1);
                add(quad_index(t, quad_pairing(f, v)), 1);
                add(tri_index(gl.tet, w), -1);
                add(quad_index(gl.tet, quad_pairing(f2, w)), -1);
                row.retain(|&(_, c)| c != 0);
                row.sort();
                rows.push(row);
            }
        }
    }
    rows
}

pub fn to_dense(rows: &[Vec<(usize, i64)>], cols: usize) -> Vec<Vec<i64>> {
    rows.iter()
        .map(|r| {
            let mut d = vec![0; cols];
            for &(k, c) in r {
                d[k] = c;
            }
            d
        })
        .collect()
}

fn ser_coords<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NormalVector {
    #[serde(serialize_with = "ser_coords")]
    pub coords: Vec<BigUint>,
    pub satisfies_matching: bool,
    pub satisfies_compatibility: bool,
}

impl NormalVector {
    pub fn new(tri: &JoinTriangulation, coords: Vec<BigUint>) -> NormalVector {
        assert_eq!(coords.len(), 7 * tri.tet_count(), "coordinate count");
        let satisfies_matching = satisfies_matching(tri, &coords);
        let satisfies_compatibility = compatible(&coords);
        NormalVector { coords, satisfies_matching, satisfies_compatibility }
    }

    pub fn zero(tri: &JoinTriangulation) -> NormalVector {
        NormalVector::new(tri, vec![BigUint::zero(); 7 * tri.tet_count()])
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn max_coord(&self) -> BigUint {
        self.coords.iter().max().cloned().unwrap_or_default()
    }

    /// Coordinates as machine integers, if they all fit.
    pub fn small_coords(&self) -> Option<Vec<u64>> {
        self.coords.iter().map(|c| u64::try_from(c).ok()).collect()
    }
}

pub fn satisfies_matching(tri: &JoinTriangulation, coords: &[BigUint]) -> bool {
    matching_matrix(tri).iter().all(|row| {
        let (mut pos, mut neg) = (BigUint::zero(), BigUint::zero());
        for &(k, c) in row {
            if c > 0 {
                pos += &coords[k] * BigUint::from(c as u64);
            } else {
                neg += &coords[k] * BigUint::from((-c) as u64);
            }
        }
        pos == neg
    })
}

/// At most one quadrilateral type per tetrahedron.
pub fn compatible(coords: &[BigUint]) -> bool {
    coords.chunks(7).all(|tet| tet[4..].iter().filter(|c| !c.is_zero()).count() <= 1)
}

/// The same compatibility test on a support mask.
pub fn compatible_mask(support: u128, tets: usize) -> bool {
    (0..tets).all(|t| ((support >> (7 * t + 4)) & 0b111).count_ones() <= 1)
}

/// Coordinatewise sum. Matching is preserved; compatibility is rechecked.
pub fn haken_sum(tri: &JoinTriangulation, a: &NormalVector, b: &NormalVector) -> NormalVector {
    let coords = a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
    NormalVector::new(tri, coords)
}

/// The normal sphere around global vertex `v`: one triangle at every corner
/// of a tetrahedron at `v`.
pub fn vertex_link(tri: &JoinTriangulation, v: usize) -> NormalVector {
    let mut coords = vec![BigUint::zero(); 7 * tri.tet_count()];
    for t in 0..tri.tet_count() {
        for k in 0..4 {
            if tri.vertex(t, k) == v {
                coords[tri_index(t, k)] = BigUint::one();
            }
        }
    }
    NormalVector::new(tri, coords)
}

/// `2^(7t - 1)`, the coordinate bound for vertex surfaces.
pub fn coordinate_bound(tri: &JoinTriangulation) -> BigUint {
    BigUint::one() << (7 * tri.tet_count() - 1)
}

/// Image under the circle-swapping automorphism.
pub fn swap_circles(tri: &JoinTriangulation, v: &NormalVector) -> NormalVector {
    let mut coords = vec![BigUint::zero(); v.coords.len()];
    for t in 0..tri.tet_count() {
        let (t2, perm) = tri.swap_circles(t);
        for k in 0..4 {
            coords[tri_index(t2, perm[k])] = v.coords[tri_index(t, k)].clone();
        }
        for q in 0..3 {
            // A quad pairing {a, b} maps to {perm a, perm b}.
            let (a, b) = [(0, 1), (0, 2), (0, 3)][q];
            coords[quad_index(t2, quad_pairing(perm[a], perm[b]))] = v.coords[quad_index(t, q)].clone();
        }
    }
    NormalVector::new(tri, coords)
}
