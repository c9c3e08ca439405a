#![allow(dead_code)]

pub mod oracle;

use gridknot::GridDiagram;
use rand::seq::SliceRandom;
use rand::Rng;

/// Uniformly random valid grid of size `n`.
pub fn random_grid<R: Rng>(rng: &mut R, n: usize) -> GridDiagram {
    loop {
        let mut x: Vec<usize> = (0..n).collect();
        let mut o: Vec<usize> = (0..n).collect();
        x.shuffle(rng);
        o.shuffle(rng);
        if let Ok(g) = GridDiagram::new(x, o) {
            return g;
        }
    }
}

pub fn g5() -> GridDiagram {
    GridDiagram::new(vec![1, 2, 3, 4, 0], vec![3, 4, 0, 1, 2]).unwrap()
}

pub fn g3() -> GridDiagram {
    GridDiagram::new(vec![1, 0, 2], vec![0, 2, 1]).unwrap()
}
