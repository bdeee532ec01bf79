//! The τ-convolution algebra on `L¹(G_τ)`.
//!
//! With `f_h` the section of `f` over `h` and `f̃(k) = Σ_t f(t,k) δ(t) dt`:
//!
//! * right τ-convolution: `(f ⋆r g)(h,·) = f_h ∗ g̃`
//! * left τ-convolution:  `(f ⋆l g)(h,·) = f̃ ∗ g_h`
//! * τ-convolution:       `f ⋆ g = ½ (f ⋆r g + f ⋆l g)`
//! * τ-involution:        `f*(h,k) = Δ_K(k⁻¹) conj(f(h,k⁻¹))`
//!
//! where `∗` is the ordinary convolution of `L¹(K)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::{GFunction, KFunction};
use crate::group::{FiniteGroup, SemidirectGroup};
use crate::norm::{weighted_norm, Exponent, Norm};
use crate::scalar::Scalar;

/// Fault injection for sensitivity testing of the verification suite.
///
/// Inside [`with_sign_flip`](fault::with_sign_flip) every convolution on
/// `K` negates the contribution of the element with index 1. The switch
/// is thread-local, so concurrently running code is unaffected.
pub mod fault {
    use std::cell::Cell;

    thread_local! {
        static SIGN_FLIP: Cell<bool> = const { Cell::new(false) };
    }

    struct Reset(bool);

    impl Drop for Reset {
        fn drop(&mut self) {
            SIGN_FLIP.with(|c| c.set(self.0));
        }
    }

    pub fn with_sign_flip<R>(f: impl FnOnce() -> R) -> R {
        let _reset = Reset(SIGN_FLIP.with(|c| c.replace(true)));
        f()
    }

    pub fn sign_flip_active() -> bool {
        SIGN_FLIP.with(Cell::get)
    }
}

/// `(φ ∗ ψ)(x) = Σ_y φ(y) ψ(y⁻¹x) w(y)`, scattered as `out[y·z] += φ(y)ψ(z)w(y)`.
pub(crate) fn conv_values<S: Scalar>(k: &FiniteGroup, weights: Option<&[f64]>, phi: &[S], psi: &[S]) -> Vec<S> {
    let n = k.order();
    let flip = n > 1 && fault::sign_flip_active();
    let mut out = vec![S::zero(); n];
    for (y, py) in phi.iter().enumerate() {
        if py.is_zero() {
            continue;
        }
        let mut a = match weights {
            Some(w) => py.scale(w[y]),
            None => py.clone(),
        };
        if flip && y == 1 {
            a = a.neg();
        }
        for (z, pz) in psi.iter().enumerate() {
            S::mul_add_assign(&mut out[k.mul(y, z)], &a, pz);
        }
    }
    out
}

fn unit_weights(w: &[f64]) -> Option<&[f64]> {
    if w.iter().all(|&x| x == 1.0) {
        None
    } else {
        Some(w)
    }
}

/// The section `f_h`.
pub fn section<S: Scalar>(f: &GFunction<S>, h: usize) -> Result<KFunction<S>> {
    let g = f.group();
    if h >= g.h().order() {
        return Err(Error::OutOfRange {
            what: "H",
            index: h,
            size: g.h().order(),
        });
    }
    KFunction::from_values(g.k_arc(), f.row(h).to_vec())
}

/// `f̃(k) = Σ_t f(t,k) δ(t) w_H(t)`.
pub fn tilde<S: Scalar>(f: &GFunction<S>) -> KFunction<S> {
    let g = f.group();
    let haar = g.haar();
    let nk = g.k().order();
    let mut out = vec![S::zero(); nk];
    for t in 0..g.h().order() {
        let w = haar.delta[t] * haar.h_weights[t];
        for (acc, v) in out.iter_mut().zip(f.row(t)) {
            if !v.is_zero() {
                *acc = acc.add(&v.scale(w));
            }
        }
    }
    KFunction::from_values(g.k_arc(), out).expect("row length is |K|")
}

/// Convolution on `L¹(K)` with counting measure.
pub fn conv_k<S: Scalar>(phi: &KFunction<S>, psi: &KFunction<S>) -> Result<KFunction<S>> {
    phi.check_same_group(psi)?;
    let k = phi.group();
    KFunction::from_values(k, conv_values(k, None, phi.values(), psi.values()))
}

/// `φ*(k) = conj(φ(k⁻¹))` (finite `K` is unimodular).
pub fn involution_k<S: Scalar>(phi: &KFunction<S>) -> KFunction<S> {
    let k = phi.group();
    let values = (0..k.order()).map(|x| phi.get(k.inv(x)).conj()).collect();
    KFunction::from_values(k, values).expect("same length")
}

fn row_wise<S: Scalar>(
    group: &Arc<SemidirectGroup>,
    row: impl Fn(usize) -> Vec<S>,
) -> GFunction<S> {
    let values = (0..group.h().order()).flat_map(row).collect();
    GFunction::from_values(group, values).expect("rows have length |K|")
}

/// Right τ-convolution `(f ⋆r g)(h,·) = f_h ∗ g̃`.
pub fn rconv<S: Scalar>(f: &GFunction<S>, g: &GFunction<S>) -> Result<GFunction<S>> {
    f.check_same_group(g)?;
    let gt = tilde(g);
    Ok(rconv_with(f, &gt))
}

fn rconv_with<S: Scalar>(f: &GFunction<S>, gt: &KFunction<S>) -> GFunction<S> {
    let group = f.group();
    let kw = unit_weights(&group.haar().k_weights);
    row_wise(group, |h| conv_values(group.k(), kw, f.row(h), gt.values()))
}

/// Left τ-convolution `(f ⋆l g)(h,·) = f̃ ∗ g_h`.
pub fn lconv<S: Scalar>(f: &GFunction<S>, g: &GFunction<S>) -> Result<GFunction<S>> {
    f.check_same_group(g)?;
    let ft = tilde(f);
    Ok(lconv_with(&ft, g))
}

fn lconv_with<S: Scalar>(ft: &KFunction<S>, g: &GFunction<S>) -> GFunction<S> {
    let group = g.group();
    let kw = unit_weights(&group.haar().k_weights);
    row_wise(group, |h| conv_values(group.k(), kw, ft.values(), g.row(h)))
}

/// τ-convolution `½ (f ⋆r g + f ⋆l g)`; both halves computed once.
pub fn tconv<S: Scalar>(f: &GFunction<S>, g: &GFunction<S>) -> Result<GFunction<S>> {
    f.check_same_group(g)?;
    let right = rconv_with(f, &tilde(g));
    let left = lconv_with(&tilde(f), g);
    let half = S::half();
    Ok(GFunction::from_values(
        f.group(),
        right
            .values()
            .iter()
            .zip(left.values())
            .map(|(r, l)| half.mul(&r.add(l)))
            .collect(),
    )
    .expect("same shape"))
}

/// τ-involution, the `K`-involution applied to every section.
pub fn involution_tau<S: Scalar>(f: &GFunction<S>) -> GFunction<S> {
    let group = f.group();
    let k = group.k();
    let mod_k = &group.haar().mod_k;
    row_wise(group, |h| {
        let row = f.row(h);
        (0..k.order())
            .map(|x| {
                let xi = k.inv(x);
                row[xi].conj().scale(mod_k[xi])
            })
            .collect()
    })
}

/// `L^p(G_τ)` norm with respect to `δ(h) dh dk`.
pub fn norm<S: Scalar>(f: &GFunction<S>, p: Exponent) -> Norm {
    let group = f.group();
    let haar = group.haar();
    let weights = f.values().iter().enumerate().map(|(x, v)| {
        let (h, k) = group.split(x);
        (v, haar.delta[h] * haar.h_weights[h] * haar.k_weights[k])
    });
    weighted_norm(weights, p)
}

pub fn norm_k<S: Scalar>(phi: &KFunction<S>, p: Exponent) -> Norm {
    weighted_norm(phi.values().iter().map(|v| (v, 1.0)), p)
}

/// Ordinary convolution on `L¹(G_τ)`: `Σ_y f(y) g(y⁻¹x) μ(y)`.
pub fn standard_conv_g<S: Scalar>(f: &GFunction<S>, g: &GFunction<S>) -> Result<GFunction<S>> {
    f.check_same_group(g)?;
    let group = f.group();
    let haar = group.haar();
    let mut out = vec![S::zero(); group.order()];
    for (y, fy) in f.values().iter().enumerate() {
        if fy.is_zero() {
            continue;
        }
        let (yh, yk) = group.split(y);
        let a = fy.scale(haar.delta[yh] * haar.h_weights[yh] * haar.k_weights[yk]);
        for (z, gz) in g.values().iter().enumerate() {
            S::mul_add_assign(&mut out[group.mul_flat(y, z)], &a, gz);
        }
    }
    GFunction::from_values(group, out)
}

/// `(f ⋆ g) ⋆ u − f ⋆ (g ⋆ u)`, which equals `¼ ((f ⋆l g) ⋆l u − (f ⋆r g) ⋆r u)`.
pub fn associator_tau<S: Scalar>(
    f: &GFunction<S>,
    g: &GFunction<S>,
    u: &GFunction<S>,
) -> Result<GFunction<S>> {
    let left = tconv(&tconv(f, g)?, u)?;
    let right = tconv(f, &tconv(g, u)?)?;
    left.sub(&right)
}

/// Membership in the kernel ideal `{f : f̃ = 0}`. Exact scalars ignore `tol`.
pub fn in_j1<S: Scalar>(f: &GFunction<S>, tol: f64) -> bool {
    let ft = tilde(f);
    if S::EXACT {
        ft.is_zero()
    } else {
        norm_k(&ft, Exponent::ONE).value <= tol
    }
}

/// Tolerance for floating density normalization.
pub const DENSITY_TOL: f64 = 1e-12;

/// A nonnegative element of `L¹(G_τ)` with unit norm.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiDensity<S: Scalar>(GFunction<S>);

impl<S: Scalar> PhiDensity<S> {
    pub fn new(phi: GFunction<S>) -> Result<PhiDensity<S>> {
        if let Some(i) = phi.values().iter().position(|v| !v.is_nonneg_real()) {
            let (h, k) = phi.group().split(i);
            return Err(Error::InvalidDensity(format!("negative or complex value at ({h},{k})")));
        }
        let group = phi.group();
        let haar = group.haar();
        let mut mass = S::zero();
        for (x, v) in phi.values().iter().enumerate() {
            let (h, k) = group.split(x);
            mass = mass.add(&v.scale(haar.delta[h] * haar.h_weights[h] * haar.k_weights[k]));
        }
        if !mass.close_to(&S::one(), DENSITY_TOL) {
            return Err(Error::InvalidDensity(format!(
                "total mass {} instead of 1",
                mass.to_c64().re
            )));
        }
        Ok(PhiDensity(phi))
    }

    /// Uniform density `1/|G|` (counting measure).
    pub fn uniform(group: &Arc<SemidirectGroup>) -> PhiDensity<S> {
        let n = group.order() as i64;
        let v = S::from_ratio((1, n), (0, 1));
        PhiDensity::new(GFunction::from_values(group, vec![v; group.order()]).expect("shape"))
            .expect("uniform density is normalized")
    }

    pub fn function(&self) -> &GFunction<S> {
        &self.0
    }

    /// `‖Φ_h‖_{L¹(K)} = Σ_s Φ(h,s)`.
    pub fn row_mass(&self, h: usize) -> S {
        let kw = &self.0.group().haar().k_weights;
        self.0
            .row(h)
            .iter()
            .zip(kw)
            .fold(S::zero(), |acc, (v, &w)| acc.add(&v.scale(w)))
    }
}

/// `Φ(ψ)(h,k) = ψ(k) ‖Φ_h‖₁`.
pub fn lift_phi<S: Scalar>(phi: &PhiDensity<S>, psi: &KFunction<S>) -> Result<GFunction<S>> {
    let group = phi.function().group();
    if !(Arc::ptr_eq(group.k_arc(), psi.group()) || **group.k_arc() == **psi.group()) {
        return Err(Error::GroupMismatch);
    }
    let masses: Vec<S> = (0..group.h().order()).map(|h| phi.row_mass(h)).collect();
    Ok(row_wise(group, |h| psi.values().iter().map(|v| v.mul(&masses[h])).collect()))
}

/// `ψ_φ(h,k) = δ(h⁻¹) φ(h) ψ(k)` for a probability density `φ` on `H`.
pub fn psi_phi_embed<S: Scalar>(
    group: &Arc<SemidirectGroup>,
    phi_h: &[S],
    psi: &KFunction<S>,
) -> Result<GFunction<S>> {
    let h = group.h();
    if phi_h.len() != h.order() {
        return Err(Error::Structural(format!(
            "density on H has {} values, |H| = {}",
            phi_h.len(),
            h.order()
        )));
    }
    if !(Arc::ptr_eq(group.k_arc(), psi.group()) || **group.k_arc() == **psi.group()) {
        return Err(Error::GroupMismatch);
    }
    if phi_h.iter().any(|v| !v.is_nonneg_real()) {
        return Err(Error::InvalidDensity("density on H must be nonnegative".into()));
    }
    let haar = group.haar();
    let mass = phi_h
        .iter()
        .enumerate()
        .fold(S::zero(), |acc, (t, v)| acc.add(&v.scale(haar.h_weights[t])));
    if !mass.close_to(&S::one(), DENSITY_TOL) {
        return Err(Error::InvalidDensity("density on H must have unit mass".into()));
    }
    Ok(row_wise(group, |t| {
        let c = phi_h[t].scale(haar.delta[h.inv(t)]);
        psi.values().iter().map(|v| c.mul(v)).collect()
    }))
}
