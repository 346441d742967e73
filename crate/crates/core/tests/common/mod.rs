#![allow(dead_code)]

use std::path::PathBuf;

use fullrank::coding::{BroadcastMode, LncProblem, PolySystem, RankBlock};
use fullrank::{BoolPoly, Monomial, VarId};
use rand::Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn load(name: &str, mode: BroadcastMode) -> (PolySystem, Option<LncProblem>) {
    let l = fullrank::cli::load(&data(name), mode).unwrap_or_else(|e| panic!("{name}: {}", e.message));
    (l.system, l.problem)
}

pub fn poly(s: &str) -> BoolPoly {
    s.parse().unwrap()
}

/// A sum of up to `terms` monomials of degree at most `deg` in `x_1..x_n`.
pub fn random_x_poly<R: Rng>(rng: &mut R, n: usize, terms: usize, deg: usize) -> BoolPoly {
    let mut f = BoolPoly::zero();
    for _ in 0..rng.gen_range(0..=terms) {
        let d = rng.gen_range(0..=deg.min(n));
        let vars: Vec<VarId> = (0..d).map(|_| VarId::new(rng.gen_range(1..=n)).unwrap()).collect();
        f = f.add(&BoolPoly::monomial(Monomial::from_vars(vars)));
    }
    f
}

/// A random x̃-linear system with `n <= 10` and `v <= 4`, split into one or
/// two rank blocks.
pub fn random_system<R: Rng>(rng: &mut R) -> PolySystem {
    let n = rng.gen_range(1..=10);
    let v = rng.gen_range(1..=4);
    let widths = if v > 1 && rng.gen_bool(0.4) {
        let a = rng.gen_range(1..v);
        vec![a, v - a]
    } else {
        vec![v]
    };
    let mut blocks = Vec::new();
    let mut base = n;
    for w in widths {
        let cols = rng.gen_range(1..=w + 2);
        let polys = (0..cols)
            .map(|_| {
                (0..w).fold(BoolPoly::zero(), |acc, k| {
                    let z = BoolPoly::x(n + k + 1);
                    acc.add(&random_x_poly(rng, n, 3, 2).mul(&z))
                })
            })
            .collect();
        blocks.push(RankBlock { zeta_base: base, width: w, polys });
        base += w;
    }
    let nonrank = (0..rng.gen_range(0..=2)).map(|_| random_x_poly(rng, n, 2, 2)).collect();
    PolySystem::new(n, v, blocks, nonrank)
}
