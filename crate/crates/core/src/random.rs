//! Seeded random test data.
//!
//! Values are `r·u` with `r` a small rational and `u` a Gaussian rational
//! of modulus one, so exact `L¹` norms stay rational.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::function::{GFunction, KFunction};
use crate::group::{FiniteGroup, SemidirectGroup};
use crate::scalar::Scalar;

/// Unit-modulus Gaussian rationals `(re, im, den)`.
const UNITS: [(i64, i64, i64); 12] = [
    (1, 0, 1),
    (-1, 0, 1),
    (0, 1, 1),
    (0, -1, 1),
    (3, 4, 5),
    (-3, 4, 5),
    (4, -3, 5),
    (5, 12, 13),
    (-12, 5, 13),
    (8, 15, 17),
    (-15, -8, 17),
    (7, 24, 25),
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One random scalar; zero with probability `zero_prob`.
pub fn scalar<S: Scalar, R: Rng>(rng: &mut R, zero_prob: f64) -> S {
    if rng.gen_bool(zero_prob) {
        return S::zero();
    }
    let num = rng.gen_range(1..=9);
    let den = rng.gen_range(1..=4);
    let (ur, ui, ud) = UNITS[rng.gen_range(0..UNITS.len())];
    S::from_ratio((num * ur, den * ud), (num * ui, den * ud))
}

pub fn gfunction<S: Scalar, R: Rng>(group: &Arc<SemidirectGroup>, rng: &mut R) -> GFunction<S> {
    let values = (0..group.order()).map(|_| scalar(rng, 0.25)).collect();
    GFunction::from_values(group, values).expect("shape")
}

pub fn kfunction<S: Scalar, R: Rng>(group: &Arc<FiniteGroup>, rng: &mut R) -> KFunction<S> {
    let values = (0..group.order()).map(|_| scalar(rng, 0.25)).collect();
    KFunction::from_values(group, values).expect("shape")
}

/// A random element of the kernel ideal: each `K`-column sums to zero
/// against `δ(h) w_H(h)`.
pub fn j1_element<S: Scalar, R: Rng>(group: &Arc<SemidirectGroup>, rng: &mut R) -> GFunction<S> {
    let mut f = gfunction::<S, R>(group, rng);
    let nh = group.h().order();
    if nh == 1 {
        return GFunction::zero(group);
    }
    let haar = group.haar();
    let last = nh - 1;
    let w_last = haar.delta[last] * haar.h_weights[last];
    for k in 0..group.k().order() {
        let mut col = S::zero();
        for h in 0..last {
            col = col.add(&f.get(h, k).scale(haar.delta[h] * haar.h_weights[h]));
        }
        f.set(last, k, col.neg().scale(1.0 / w_last));
    }
    f
}
