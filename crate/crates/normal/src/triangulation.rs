//! The join triangulation of S³ = S¹_φ ∗ S¹_θ with `n` vertices on each
//! circle.
//!
//! Tetrahedron `(i, j)` is `[s_i, s_{i+1}] ∗ [t_j, t_{j+1}]`, stored at index
//! `i * n + j` with local vertices `0 = s_i`, `1 = s_{i+1}`, `2 = t_j`,
//! `3 = t_{j+1}`. Face `k` of a tetrahedron is the face opposite local
//! vertex `k`.
//!
//! Global numbering: vertex `s_a` is `a` and `t_b` is `n + b`; edge
//! `[s_i, s_{i+1}]` is `i`, edge `[t_j, t_{j+1}]` is `n + j`, and the join
//! edge `s_a t_b` is `2n + a * n + b`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use gridknot::GridDiagram;
use serde::Serialize;

use crate::NormalError;

/// Local edges of a tetrahedron as vertex pairs.
pub const LOCAL_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Where a face is glued: the other tetrahedron and the map on local
/// vertices, which sends this face's opposite vertex to the other's.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Gluing {
    pub tet: usize,
    pub perm: [usize; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JoinTriangulation {
    pub n: usize,
    pub gluings: Vec<[Gluing; 4]>,
    /// The circle edges of S¹_φ.
    pub binding_edges: Vec<usize>,
    /// Join edges carrying a link; empty unless built with [`JoinTriangulation::for_grid`].
    pub link_edges: Vec<usize>,
    /// Link component of each entry of `link_edges`.
    pub link_components: Vec<usize>,
}

pub fn build_triangulation(n: usize) -> Result<JoinTriangulation, NormalError> {
    if n < 2 {
        return Err(NormalError::TooSmall(n));
    }
    let tet = |i: usize, j: usize| (i % n) * n + (j % n);
    let mut gluings = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let swap_s = [1, 0, 2, 3];
            let swap_t = [0, 1, 3, 2];
            gluings.push([
                Gluing { tet: tet(i + 1, j), perm: swap_s },
                Gluing { tet: tet(i + n - 1, j), perm: swap_s },
                Gluing { tet: tet(i, j + 1), perm: swap_t },
                Gluing { tet: tet(i, j + n - 1), perm: swap_t },
            ]);
        }
    }
    Ok(JoinTriangulation {
        n,
        gluings,
        binding_edges: (0..n).collect(),
        link_edges: Vec::new(),
        link_components: Vec::new(),
    })
}

impl JoinTriangulation {
    /// The triangulation with the link of `g` in its 1-skeleton: the arc in
    /// row `r` runs `s_a - t_r - s_b` between the columns of its markers.
    pub fn for_grid(g: &GridDiagram) -> Result<JoinTriangulation, NormalError> {
        let mut tri = build_triangulation(g.n())?;
        let n = g.n();
        let (xc, oc) = (g.x_col(), g.o_col());
        let mut comp_of_col = vec![0; n];
        for (k, c) in g.components().iter().enumerate() {
            for &col in &c.columns {
                comp_of_col[col] = k;
            }
        }
        for r in 0..n {
            for col in [xc[r], oc[r]] {
                tri.link_edges.push(tri.join_edge(col, r));
                tri.link_components.push(comp_of_col[col]);
            }
        }
        Ok(tri)
    }

    pub fn tet_count(&self) -> usize {
        self.n * self.n
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.n
    }

    pub fn edge_count(&self) -> usize {
        2 * self.n + self.n * self.n
    }

    pub fn triangle_count(&self) -> usize {
        2 * self.n * self.n
    }

    pub fn join_edge(&self, a: usize, b: usize) -> usize {
        2 * self.n + a * self.n + b
    }

    /// Global vertex at local vertex `k` of tetrahedron `t`.
    pub fn vertex(&self, t: usize, k: usize) -> usize {
        let n = self.n;
        let (i, j) = (t / n, t % n);
        match k {
            0 => i,
            1 => (i + 1) % n,
            2 => n + j,
            3 => n + (j + 1) % n,
            _ => panic!("local vertex {k}"),
        }
    }

    /// Global edge between local vertices `a` and `b` of tetrahedron `t`.
    pub fn edge(&self, t: usize, a: usize, b: usize) -> usize {
        let n = self.n;
        let (i, j) = (t / n, t % n);
        let (a, b) = (a.min(b), a.max(b));
        match (a, b) {
            (0, 1) => i,
            (2, 3) => n + j,
            _ => self.join_edge(self.vertex(t, a), self.vertex(t, b) - n),
        }
    }

    /// Number of tetrahedron edges identified with each global edge.
    pub fn edge_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.edge_count()];
        for t in 0..self.tet_count() {
            for &(a, b) in &LOCAL_EDGES {
                deg[self.edge(t, a, b)] += 1;
            }
        }
        deg
    }

    /// Structural audit: counts of distinct cells, involutive gluings, and
    /// vertex and edge identifications that agree across every face.
    pub fn audit(&self) -> Audit {
        let t = self.tet_count();
        let mut vertices = BTreeSet::new();
        let mut edges = BTreeSet::new();
        let mut involutive = true;
        let mut consistent = true;
        for tet in 0..t {
            for k in 0..4 {
                vertices.insert(self.vertex(tet, k));
            }
            for &(a, b) in &LOCAL_EDGES {
                edges.insert(self.edge(tet, a, b));
            }
            for f in 0..4 {
                let gl = self.gluings[tet][f];
                let back = self.gluings[gl.tet][gl.perm[f]];
                let composed: Vec<usize> = (0..4).map(|k| back.perm[gl.perm[k]]).collect();
                if back.tet != tet || composed != [0, 1, 2, 3] || (gl.tet == tet && gl.perm[f] == f) {
                    involutive = false;
                }
                for a in (0..4).filter(|&a| a != f) {
                    if self.vertex(tet, a) != self.vertex(gl.tet, gl.perm[a]) {
                        consistent = false;
                    }
                    for b in (a + 1..4).filter(|&b| b != f) {
                        if self.edge(tet, a, b) != self.edge(gl.tet, gl.perm[a], gl.perm[b]) {
                            consistent = false;
                        }
                    }
                }
            }
        }
        let faces = 4 * t / 2;
        Audit {
            vertices: vertices.len(),
            edges: edges.len(),
            faces,
            tetrahedra: t,
            euler: vertices.len() as i64 - edges.len() as i64 + faces as i64 - t as i64,
            involutive,
            consistent,
            face_degree_sum: self.edge_degrees().iter().sum(),
        }
    }

    /// Face-gluing text: a `tetrahedra <t>` header, then one line per
    /// tetrahedron listing, for faces 0 to 3, `<tet>:<perm>` with the
    /// permutation written as four digits.
    pub fn export(&self) -> String {
        let mut out = format!("tetrahedra {}\n", self.tet_count());
        for (t, gl) in self.gluings.iter().enumerate() {
            let _ = write!(out, "{t}");
            for g in gl {
                let p: String = g.perm.iter().map(|d| char::from(b'0' + *d as u8)).collect();
                let _ = write!(out, " {}:{}", g.tet, p);
            }
            out.push('\n');
        }
        out
    }

    /// The automorphism exchanging the two circles: tetrahedron `(i, j)`
    /// goes to `(j, i)` with local vertices `0 <-> 2`, `1 <-> 3`.
    pub fn swap_circles(&self, t: usize) -> (usize, [usize; 4]) {
        let n = self.n;
        ((t % n) * n + t / n, [2, 3, 0, 1])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Audit {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub tetrahedra: usize,
    pub euler: i64,
    pub involutive: bool,
    pub consistent: bool,
    /// Sum over edges of the number of tetrahedra around them; `6T`.
    pub face_degree_sum: usize,
}

impl Audit {
    pub fn ok_for(&self, n: usize) -> bool {
        self.vertices == 2 * n
            && self.edges == 2 * n + n * n
            && self.faces == 2 * n * n
            && self.tetrahedra == n * n
            && self.euler == 0
            && self.involutive
            && self.consistent
            && self.face_degree_sum == 6 * n * n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let a = build_triangulation(2).unwrap().audit();
        assert_eq!((a.vertices, a.edges, a.faces, a.tetrahedra, a.euler), (4, 8, 8, 4, 0));
        assert!(a.ok_for(2));
        assert_eq!(build_triangulation(3).unwrap().audit().tetrahedra, 9);
        assert!(build_triangulation(1).is_err());
    }

    #[test]
    fn degrees() {
        let tri = build_triangulation(5).unwrap();
        let deg = tri.edge_degrees();
        assert!(deg[..10].iter().all(|&d| d == 5));
        assert!(deg[10..].iter().all(|&d| d == 4));
    }

    #[test]
    fn export_lists_every_tetrahedron() {
        let text = build_triangulation(2).unwrap().export();
        assert_eq!(text.lines().count(), 5);
        assert_eq!(text.lines().nth(1), Some("0 2:1023 2:1023 1:0132 1:0132"));
    }

    #[test]
    fn link_edges_follow_rows() {
        let g = GridDiagram::new(vec![1, 0, 2], vec![0, 2, 1]).unwrap();
        let tri = JoinTriangulation::for_grid(&g).unwrap();
        assert_eq!(tri.link_edges.len(), 6);
        let distinct: BTreeSet<_> = tri.link_edges.iter().collect();
        assert_eq!(distinct.len(), 6);
    }
}
