//! Vertex normal surfaces by the double description method, filtered by
//! quadrilateral compatibility after every hyperplane.
//!
//! Rays are kept with their zero sets as bit masks (at most 112 coordinates
//! at the largest allowed size), so adjacency is decided combinatorially.
//! A ray whose support breaks compatibility is dropped on creation; every
//! compatible extreme ray of the final cone arises from compatible rays
//! only, since supports grow under positive combination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::surface;
use crate::triangulation::JoinTriangulation;
use crate::vector::{compatible_mask, matching_matrix, NormalVector};
use crate::NormalError;

/// Largest arc index accepted by the enumerator.
pub const MAX_N: usize = 4;

#[derive(Clone, Debug)]
struct Ray {
    coords: Vec<BigInt>,
    /// Bit k set when coordinate k is zero.
    zero: u128,
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && g != BigInt::from(1) {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}

fn zero_mask(v: &[BigInt]) -> u128 {
    v.iter().enumerate().filter(|(_, x)| x.is_zero()).fold(0u128, |m, (k, _)| m | 1 << k)
}

/// Fraction-free row echelon form, used only to track the rank of the
/// equations seen so far.
struct Echelon {
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl Echelon {
    fn insert(&mut self, mut row: Vec<BigInt>) {
        for (p, r) in &self.rows {
            if row[*p].is_zero() {
                continue;
            }
            let (a, b) = (r[*p].clone(), row[*p].clone());
            for k in 0..row.len() {
                row[k] = &row[k] * &a - &r[k] * &b;
            }
            row = primitive(row);
        }
        if let Some(p) = row.iter().position(|x| !x.is_zero()) {
            self.rows.push((p, row));
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Extreme rays of `{x >= 0, Mx = 0, x_k = 0 for k in forced_zero}` that
/// satisfy compatibility, as primitive integer vectors.
pub fn admissible_rays(
    tri: &JoinTriangulation,
    forced_zero: &[usize],
    workers: usize,
) -> Result<Vec<NormalVector>, NormalError> {
    if tri.n > MAX_N {
        return Err(NormalError::TooLarge { n: tri.n, max: MAX_N });
    }
    let dim = 7 * tri.tet_count();
    let tets = tri.tet_count();
    let full: u128 = if dim == 128 { u128::MAX } else { (1u128 << dim) - 1 };
    let mut free = full;
    for &k in forced_zero {
        free &= !(1u128 << k);
    }
    let free_dim = free.count_ones() as usize;
    let mut rays: Vec<Ray> = (0..dim)
        .filter(|&k| free >> k & 1 == 1)
        .map(|k| {
            let mut coords = vec![BigInt::zero(); dim];
            coords[k] = BigInt::from(1);
            Ray { coords, zero: full & !(1u128 << k) }
        })
        .collect();

    let mut eqs = matching_matrix(tri);
    eqs.iter_mut().for_each(|r| r.retain(|&(k, _)| free >> k & 1 == 1));
    eqs.retain(|r| !r.is_empty());
    // Sweeping tetrahedra in order keeps the intermediate cones local.
    eqs.sort_by_key(|r| (r.iter().map(|e| e.0).max(), r.iter().map(|e| e.0).min()));

    let mut echelon = Echelon { rows: Vec::new() };
    let run = |rays: &mut Vec<Ray>, echelon: &mut Echelon| {
        for eq in &eqs {
            let value = |r: &Ray| -> BigInt { eq.iter().map(|&(k, c)| &r.coords[k] * c).sum() };
            let values: Vec<BigInt> = rays.iter().map(value).collect();
            let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
            let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
            if pos.is_empty() && neg.is_empty() {
                continue;
            }
            // A 2-face of the current cone has at least this many zeros
            // among the free coordinates.
            let need = free_dim.saturating_sub(2 + echelon.rank());
            let current: &Vec<Ray> = rays;
            let combine = |&i: &usize| -> Vec<Ray> {
                let mut out = Vec::new();
                for &j in &neg {
                    let z = current[i].zero & current[j].zero;
                    if ((z & free).count_ones() as usize) < need {
                        continue;
                    }
                    if !compatible_mask(!z & full, tets) {
                        continue;
                    }
                    let blocked = current
                        .iter()
                        .enumerate()
                        .any(|(k, r)| k != i && k != j && r.zero & z == z);
                    if blocked {
                        continue;
                    }
                    let (a, b) = (&values[i], -&values[j]);
                    let coords: Vec<BigInt> = current[i]
                        .coords
                        .iter()
                        .zip(&current[j].coords)
                        .map(|(x, y)| x * &b + y * a)
                        .collect();
                    let coords = primitive(coords);
                    let zero = zero_mask(&coords) & full;
                    debug_assert_eq!(zero, z);
                    out.push(Ray { coords, zero });
                }
                out
            };
            let fresh: Vec<Ray> = if workers > 1 {
                pos.par_iter().map(combine).collect::<Vec<_>>().into_iter().flatten().collect()
            } else {
                pos.iter().flat_map(combine).collect()
            };
            let mut next: Vec<Ray> = (0..rays.len()).filter(|&i| values[i].is_zero()).map(|i| rays[i].clone()).collect();
            next.extend(fresh);
            *rays = next;
            let mut dense = vec![BigInt::zero(); dim];
            for &(k, c) in eq {
                dense[k] = BigInt::from(c);
            }
            echelon.insert(dense);
        }
    };
    if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| NormalError::Workers(e.to_string()))?;
        pool.install(|| run(&mut rays, &mut echelon));
    } else {
        run(&mut rays, &mut echelon);
    }

    let mut out: Vec<NormalVector> = rays
        .into_iter()
        .map(|r| NormalVector::new(tri, r.coords.into_iter().map(|x| x.to_biguint().expect("rays are non-negative")).collect()))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Admissible vertex surfaces: extreme, compatible, primitive and connected.
pub fn vertex_enumerate(tri: &JoinTriangulation, workers: usize) -> Result<Vec<NormalVector>, NormalError> {
    connected_only(tri, admissible_rays(tri, &[], workers)?)
}

/// Vertex surfaces on the face of the cone where the listed coordinates vanish.
pub fn vertex_enumerate_face(
    tri: &JoinTriangulation,
    forced_zero: &[usize],
    workers: usize,
) -> Result<Vec<NormalVector>, NormalError> {
    connected_only(tri, admissible_rays(tri, forced_zero, workers)?)
}

fn connected_only(tri: &JoinTriangulation, rays: Vec<NormalVector>) -> Result<Vec<NormalVector>, NormalError> {
    let mut out = Vec::with_capacity(rays.len());
    for v in rays {
        if surface::reconstruct(tri, &v)?.component_count == 1 {
            out.push(v);
        }
    }
    Ok(out)
}
