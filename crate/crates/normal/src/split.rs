//! Looking for a normal splitting sphere among vertex surfaces.

use std::collections::HashMap;

use gridknot::GridDiagram;
use serde::Serialize;

use crate::enumerate::{vertex_enumerate_face, MAX_N};
use crate::surface::{reconstruct, Counts, SurfaceReport, UnionFind};
use crate::triangulation::{JoinTriangulation, LOCAL_EDGES};
use crate::vector::{quad_index, quad_pairing, tri_index, NormalVector};
use crate::NormalError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplittingSphere {
    pub vector: NormalVector,
    pub report: SurfaceReport,
    /// Complementary region of each link component.
    pub sides: Vec<usize>,
}

/// Coordinates of discs that would meet a link edge.
fn link_coords(tri: &JoinTriangulation) -> Vec<usize> {
    let mut out = Vec::new();
    for t in 0..tri.tet_count() {
        for &(a, b) in &LOCAL_EDGES {
            if !tri.link_edges.contains(&tri.edge(t, a, b)) {
                continue;
            }
            out.push(tri_index(t, a));
            out.push(tri_index(t, b));
            let pair = quad_pairing(a, b);
            out.extend((0..3).filter(|&q| q != pair).map(|q| quad_index(t, q)));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Complementary regions of the surface, found by cutting each tetrahedron
/// into chambers. Every chamber contains a piece of some edge, so edge
/// segments stand in for chambers: segment `k` of an edge lies between
/// surface points `k - 1` and `k`, counted from the edge's lower local
/// vertex. Returns the region of segment 0 of every global edge, and the
/// number of regions.
fn regions(tri: &JoinTriangulation, coords: &[u64]) -> (HashMap<usize, usize>, usize) {
    let counts = Counts::new(coords);
    let mut weight = vec![None; tri.edge_count()];
    for t in 0..tri.tet_count() {
        for &(a, b) in &LOCAL_EDGES {
            weight[tri.edge(t, a, b)].get_or_insert(counts.weight(t, a, b));
        }
    }
    let mut seg_base = Vec::with_capacity(weight.len());
    let mut total = 0usize;
    for w in &weight {
        seg_base.push(total);
        total += w.expect("every edge lies in a tetrahedron") as usize + 1;
    }
    let mut uf = UnionFind::new(total);
    for t in 0..tri.tet_count() {
        let tri_c = counts.tri[t];
        let (q, m) = (0..3).find(|&q| counts.quad[t][q] > 0).map_or((0, 0), |q| (q, counts.quad[t][q]));
        let on_zero_side = |v: usize| v == 0 || quad_pairing(0, v) == q;
        let mut chamber: HashMap<([u64; 4], u64), usize> = HashMap::new();
        for &(a, b) in &LOCAL_EDGES {
            let e = tri.edge(t, a, b);
            let w = counts.weight(t, a, b);
            for k in 0..=w {
                let mut levels = tri_c;
                levels[a] = k.min(tri_c[a]);
                levels[b] = (w - k).min(tri_c[b]);
                let quad_level = if quad_pairing(a, b) == q {
                    if on_zero_side(a) {
                        0
                    } else {
                        m
                    }
                } else {
                    let s = k.saturating_sub(tri_c[a]).min(m);
                    if on_zero_side(a) {
                        s
                    } else {
                        m - s
                    }
                };
                let seg = seg_base[e] + k as usize;
                match chamber.get(&(levels, quad_level)) {
                    Some(&other) => uf.union(seg, other),
                    None => {
                        chamber.insert((levels, quad_level), seg);
                    }
                }
            }
        }
    }
    let count = uf.classes();
    let first = (0..weight.len()).map(|e| (e, uf.find(seg_base[e]))).collect();
    (first, count)
}

/// Scans vertex surfaces disjoint from the link for a sphere with link
/// components on both sides. `None` does not show the link is non-split:
/// only vertex surfaces are examined.
pub fn splitting_sphere_scan(g: &GridDiagram, workers: usize) -> Result<Option<SplittingSphere>, NormalError> {
    if g.n() > MAX_N {
        return Err(NormalError::TooLarge { n: g.n(), max: MAX_N });
    }
    let components = g.component_count();
    if components < 2 {
        return Err(NormalError::Precondition(format!("{components} component; a split needs two")));
    }
    let tri = JoinTriangulation::for_grid(g)?;
    let candidates = vertex_enumerate_face(&tri, &link_coords(&tri), workers)?;
    for v in candidates {
        let report = reconstruct(&tri, &v)?;
        if !report.is_sphere || report.meets_link {
            continue;
        }
        let coords = v.small_coords().ok_or(NormalError::TooManyDiscs)?;
        let (region, count) = regions(&tri, &coords);
        if count != 2 {
            return Err(NormalError::Inconsistent(format!("a sphere with {count} complementary regions")));
        }
        let mut sides = vec![usize::MAX; components];
        for (e, &c) in tri.link_edges.iter().zip(&tri.link_components) {
            let r = region[e];
            if sides[c] != usize::MAX && sides[c] != r {
                return Err(NormalError::Inconsistent("a link component on both sides".into()));
            }
            sides[c] = r;
        }
        if sides.iter().any(|&s| s != sides[0]) {
            return Ok(Some(SplittingSphere { vector: v, report, sides }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preconditions() {
        assert!(matches!(
            splitting_sphere_scan(&GridDiagram::trivial(), 1),
            Err(NormalError::Precondition(_))
        ));
        let g3 = GridDiagram::new(vec![1, 0, 2], vec![0, 2, 1]).unwrap();
        assert!(splitting_sphere_scan(&g3, 1).is_err());
    }
}
