#![allow(dead_code)]

use cosub_core::{InnerProduct, MatrixSymbol, Polynomial, TestFunction};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Invertible matrix with entries in [−r, r] and |det| ≥ floor.
pub fn random_symbol(rng: &mut ChaCha8Rng, dim: usize, r: f64, floor: f64) -> MatrixSymbol {
    loop {
        let v: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-r..r)).collect();
        if let Ok(a) = MatrixSymbol::from_row_slice(dim, &v) {
            if a.absdet() >= floor {
                return a;
            }
        }
    }
}

pub fn random_spd(rng: &mut ChaCha8Rng, dim: usize) -> InnerProduct {
    let l = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-0.6..0.6));
    InnerProduct::new(&l * l.transpose() + DMatrix::identity(dim, dim) * 0.7).unwrap()
}

pub fn rotation(theta: f64, scale: f64) -> MatrixSymbol {
    let (s, c) = theta.sin_cos();
    MatrixSymbol::from_row_slice(2, &[scale * c, -scale * s, scale * s, scale * c]).unwrap()
}

/// `P^{−1/2} M P^{1/2}`, normal in the P-inner product when `M` is normal.
pub fn p_conjugate(m: &MatrixSymbol, p: &InnerProduct) -> MatrixSymbol {
    MatrixSymbol::new(p.inv_factor() * m.entries() * p.factor()).unwrap()
}

/// Gaussian with a random shape `S ≥ smin·I` and a polynomial factor of
/// degree ≤ 2.
pub fn random_test_function(rng: &mut ChaCha8Rng, dim: usize, smin: f64) -> TestFunction {
    let l = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-0.5..0.5));
    let shape = &l * l.transpose() + DMatrix::identity(dim, dim) * smin;
    let mut terms = vec![(vec![0u8; dim], rng.gen_range(0.5..1.5))];
    for i in 0..dim {
        let mut e = vec![0u8; dim];
        e[i] = 1;
        terms.push((e.clone(), rng.gen_range(-1.0..1.0)));
        e[i] = 2;
        terms.push((e, rng.gen_range(-0.5..0.5)));
    }
    TestFunction::gaussian(Polynomial::from_terms(dim, terms).unwrap(), shape).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-r..r)).collect()
}
