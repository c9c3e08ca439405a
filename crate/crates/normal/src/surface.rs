//! Gluing normal discs into a surface and reading off its topology.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::triangulation::{JoinTriangulation, LOCAL_EDGES};
use crate::vector::{quad_pairing, NormalVector};
use crate::NormalError;

/// Refuse to materialise surfaces with more discs than this.
pub const MAX_DISCS: u64 = 4_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceReport {
    /// From the glued cell complex.
    pub euler: i64,
    /// From the linear functional on coordinates.
    pub euler_functional: i64,
    pub component_count: usize,
    pub edge_weights: BTreeMap<usize, u64>,
    pub binding_weight: u64,
    pub is_sphere: bool,
    pub meets_link: bool,
}

pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub(crate) fn new(n: usize) -> UnionFind {
        UnionFind((0..n).collect())
    }

    pub(crate) fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }

    pub(crate) fn classes(&mut self) -> usize {
        (0..self.0.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// Per-tetrahedron disc counts: triangles by vertex, then quads by type.
pub(crate) struct Counts {
    pub tri: Vec<[u64; 4]>,
    pub quad: Vec<[u64; 3]>,
}

impl Counts {
    pub(crate) fn new(c: &[u64]) -> Counts {
        let tri = c.chunks(7).map(|t| [t[0], t[1], t[2], t[3]]).collect();
        let quad = c.chunks(7).map(|t| [t[4], t[5], t[6]]).collect();
        Counts { tri, quad }
    }

    /// Normal arcs around `u` in face `f` of `t`.
    fn arcs(&self, t: usize, f: usize, u: usize) -> u64 {
        self.tri[t][u] + self.quad[t][quad_pairing(f, u)]
    }

    /// Points of the surface on local edge `(a, b)` of `t`.
    pub(crate) fn weight(&self, t: usize, a: usize, b: usize) -> u64 {
        let pair = quad_pairing(a, b);
        self.tri[t][a] + self.tri[t][b] + (0..3).filter(|&q| q != pair).map(|q| self.quad[t][q]).sum::<u64>()
    }
}

/// Linear-functional Euler characteristic: each disc contributes one face,
/// half of each of its arcs, and `1/deg(e)` for each corner on edge `e`.
pub fn euler_functional(tri: &JoinTriangulation, v: &NormalVector) -> BigRational {
    let deg = tri.edge_degrees();
    let inv = |t: usize, a: usize, b: usize| BigRational::new(BigInt::one(), BigInt::from(deg[tri.edge(t, a, b)]));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut chi = BigRational::zero();
    for t in 0..tri.tet_count() {
        for k in 0..4 {
            let mut per = BigRational::one() - &half * BigInt::from(3);
            for x in (0..4).filter(|&x| x != k) {
                per += inv(t, k, x);
            }
            chi += per * BigInt::from(v.coords[7 * t + k].clone());
        }
        for q in 0..3 {
            let mut per = BigRational::one() - &half * BigInt::from(4);
            for &(a, b) in LOCAL_EDGES.iter().filter(|&&(a, b)| quad_pairing(a, b) != q) {
                per += inv(t, a, b);
            }
            chi += per * BigInt::from(v.coords[7 * t + 4 + q].clone());
        }
    }
    chi
}

/// Glues the discs of `v` and reports the resulting surface.
pub fn reconstruct(tri: &JoinTriangulation, v: &NormalVector) -> Result<SurfaceReport, NormalError> {
    if !v.satisfies_matching || !v.satisfies_compatibility {
        return Err(NormalError::NotAdmissible);
    }
    let small = v.small_coords().ok_or(NormalError::TooManyDiscs)?;
    let total: u64 = small.iter().sum();
    if total > MAX_DISCS {
        return Err(NormalError::TooManyDiscs);
    }
    let tets = tri.tet_count();
    let counts = Counts::new(&small);

    // Disc ids: per tetrahedron, triangles by vertex then the quads.
    let mut base = vec![[0usize; 7]; tets];
    let mut next = 0usize;
    for t in 0..tets {
        for k in 0..7 {
            base[t][k] = next;
            next += small[7 * t + k] as usize;
        }
    }
    let disc_count = next;
    let disc_at = |t: usize, f: usize, u: usize, p: u64| -> usize {
        let tri_u = counts.tri[t][u];
        if p < tri_u {
            return base[t][u] + p as usize;
        }
        let q = quad_pairing(f, u);
        let m = counts.quad[t][q];
        let from_u = p - tri_u;
        // Quad copies are numbered from the side holding local vertex 0.
        let copy = if u == 0 || quad_pairing(0, u) == q { from_u } else { m - 1 - from_u };
        base[t][4 + q] + copy as usize
    };

    let mut discs = UnionFind::new(disc_count);
    let mut arc_slots = 0u64;
    for t in 0..tets {
        for f in 0..4 {
            let gl = tri.gluings[t][f];
            for u in (0..4).filter(|&u| u != f) {
                let a = counts.arcs(t, f, u);
                arc_slots += a;
                debug_assert_eq!(a, counts.arcs(gl.tet, gl.perm[f], gl.perm[u]));
                for p in 0..a {
                    discs.union(disc_at(t, f, u, p), disc_at(gl.tet, gl.perm[f], gl.perm[u], p));
                }
            }
        }
    }

    // Surface vertices: points on tetrahedron edges, identified across faces.
    let mut point_base = vec![[0usize; 6]; tets];
    let mut points = 0usize;
    for t in 0..tets {
        for (e, &(a, b)) in LOCAL_EDGES.iter().enumerate() {
            point_base[t][e] = points;
            points += counts.weight(t, a, b) as usize;
        }
    }
    let edge_slot = |a: usize, b: usize| LOCAL_EDGES.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
    let mut pts = UnionFind::new(points);
    for t in 0..tets {
        for f in 0..4 {
            let gl = tri.gluings[t][f];
            for &(a, b) in LOCAL_EDGES.iter().filter(|&&(a, b)| a != f && b != f) {
                let w = counts.weight(t, a, b);
                let (a2, b2) = (gl.perm[a], gl.perm[b]);
                let flip = a2 > b2;
                for k in 0..w {
                    let k2 = if flip { w - 1 - k } else { k };
                    pts.union(
                        point_base[t][edge_slot(a, b)] + k as usize,
                        point_base[gl.tet][edge_slot(a2, b2)] + k2 as usize,
                    );
                }
            }
        }
    }

    let faces = disc_count as i64;
    let edges = (arc_slots / 2) as i64;
    let vertices = pts.classes() as i64;
    let euler = vertices - edges + faces;

    let functional = euler_functional(tri, v);
    if !functional.is_integer() {
        return Err(NormalError::Inconsistent(format!("non-integral Euler functional {functional}")));
    }
    let euler_functional: i64 = functional.to_integer().try_into().map_err(|_| NormalError::TooManyDiscs)?;

    let mut edge_weights = BTreeMap::new();
    for t in 0..tets {
        for &(a, b) in &LOCAL_EDGES {
            edge_weights.entry(tri.edge(t, a, b)).or_insert(counts.weight(t, a, b));
        }
    }
    let binding_weight = tri.binding_edges.iter().map(|e| edge_weights[e]).sum();
    let meets_link = tri.link_edges.iter().any(|e| edge_weights[e] > 0);
    let component_count = discs.classes();
    Ok(SurfaceReport {
        euler,
        euler_functional,
        component_count,
        edge_weights,
        binding_weight,
        is_sphere: component_count == 1 && euler == 2,
        meets_link,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::build_triangulation;
    use crate::vector::{haken_sum, vertex_link};

    #[test]
    fn vertex_links_are_spheres() {
        for n in 2..=4 {
            let tri = build_triangulation(n).unwrap();
            for v in 0..2 * n {
                let r = reconstruct(&tri, &vertex_link(&tri, v)).unwrap();
                assert_eq!((r.euler, r.euler_functional, r.component_count), (2, 2, 1));
                assert!(r.is_sphere);
            }
        }
    }

    #[test]
    fn disjoint_links_add() {
        let tri = build_triangulation(3).unwrap();
        let s = haken_sum(&tri, &vertex_link(&tri, 0), &vertex_link(&tri, 4));
        let r = reconstruct(&tri, &s).unwrap();
        assert_eq!((r.euler, r.component_count), (4, 2));
        assert!(!r.is_sphere);
    }

    #[test]
    fn empty_surface() {
        let tri = build_triangulation(2).unwrap();
        let r = reconstruct(&tri, &NormalVector::zero(&tri)).unwrap();
        assert_eq!((r.euler, r.component_count, r.binding_weight), (0, 0, 0));
    }

    #[test]
    fn binding_weight_of_a_t_vertex_link() {
        // The link of t_0 misses the binding circle; the link of s_0 meets
        // the two binding edges at s_0.
        let tri = build_triangulation(3).unwrap();
        assert_eq!(reconstruct(&tri, &vertex_link(&tri, 3)).unwrap().binding_weight, 0);
        assert_eq!(reconstruct(&tri, &vertex_link(&tri, 0)).unwrap().binding_weight, 2);
    }
}
