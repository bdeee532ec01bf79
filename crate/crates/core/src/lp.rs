//! The left module action of `(L¹(G_τ), ⋆l)` on `L^p(G_τ)`.
//!
//! `(f ⋆p u)(h,·) = Σ_t f_t ∗ u_h δ(t) = f̃ ∗ u_h`. For `p = 1` this is the
//! left τ-convolution.

use crate::algebra::{conv_values, lconv, lift_phi, norm, tilde, PhiDensity};
use crate::error::Result;
use crate::function::{GFunction, KFunction};
use crate::norm::{Exponent, Norm};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct LpElement<S: Scalar> {
    pub func: GFunction<S>,
    pub p: Exponent,
}

impl<S: Scalar> LpElement<S> {
    pub fn new(func: GFunction<S>, p: Exponent) -> Result<LpElement<S>> {
        Ok(LpElement { func, p: p.validate()? })
    }

    pub fn norm(&self) -> Norm {
        norm(&self.func, self.p)
    }

    /// `p = ∞` lies outside the finite-exponent argument and is reported
    /// as an extension.
    pub fn is_extension(&self) -> bool {
        self.p == Exponent::Infinity
    }
}

pub fn module_action<S: Scalar>(f: &GFunction<S>, u: &LpElement<S>) -> Result<LpElement<S>> {
    f.check_same_group(&u.func)?;
    let group = f.group();
    let ft = tilde(f);
    let kw = &group.haar().k_weights;
    let kw = if kw.iter().all(|&w| w == 1.0) { None } else { Some(kw.as_slice()) };
    let values = (0..group.h().order())
        .flat_map(|h| conv_values(group.k(), kw, ft.values(), u.func.row(h)))
        .collect();
    Ok(LpElement {
        func: GFunction::from_values(group, values)?,
        p: u.p,
    })
}

/// `max |((f ⋆l g) ⋆p u − f ⋆p (g ⋆p u))(x)|`.
pub fn check_module_associativity<S: Scalar>(
    f: &GFunction<S>,
    g: &GFunction<S>,
    u: &LpElement<S>,
) -> Result<f64> {
    let lhs = module_action(&lconv(f, g)?, u)?;
    let rhs = module_action(f, &module_action(g, u)?)?;
    Ok(lhs.func.max_deviation(&rhs.func))
}

/// `‖Φ(1_e) ⋆p u − u‖_p`; zero because `Φ(1_e)` has tilde `1_e`.
pub fn approx_identity_action<S: Scalar>(phi: &PhiDensity<S>, u: &LpElement<S>) -> Result<Norm> {
    let unit = KFunction::unit(phi.function().group().k_arc());
    let e = lift_phi(phi, &unit)?;
    let acted = module_action(&e, u)?;
    Ok(norm(&acted.func.sub(&u.func)?, u.p))
}

/// `(‖f ⋆p u‖_p, ‖f‖₁ ‖u‖_p)`.
pub fn contraction<S: Scalar>(f: &GFunction<S>, u: &LpElement<S>) -> Result<(Norm, Norm)> {
    let acted = module_action(f, u)?;
    Ok((acted.norm(), norm(f, Exponent::ONE).times(&u.norm())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::algebra::tconv;
    use crate::group::{semidirect, AutomorphismAction, FiniteGroup, SemidirectGroup};
    use crate::norm::NORM_REL_SLACK;
    use crate::random;
    use crate::scalar::GaussQ;

    type Q = GaussQ;

    fn z2_z3() -> Arc<SemidirectGroup> {
        let h = FiniteGroup::cyclic(2).unwrap();
        let k = FiniteGroup::cyclic(3).unwrap();
        let a = AutomorphismAction::inversion(&h, &k);
        Arc::new(semidirect(h, k, a).unwrap())
    }

    /// Integral form: `Σ_t f_t ∗ u_h` by explicit loops.
    fn integral_form(f: &GFunction<Q>, u: &GFunction<Q>) -> GFunction<Q> {
        let g = f.group();
        let k = g.k();
        let mut out = GFunction::zero(g);
        for h in 0..g.h().order() {
            for x in 0..k.order() {
                let mut acc = Q::zero();
                for t in 0..g.h().order() {
                    for y in 0..k.order() {
                        acc = acc.add(&f.get(t, y).mul(u.get(h, k.mul(k.inv(y), x))));
                    }
                }
                out.set(h, x, acc);
            }
        }
        out
    }

    #[test]
    fn shift_by_point_mass() {
        let g = z2_z3();
        let mut rng = random::rng(4);
        let u = LpElement::new(random::gfunction::<Q, _>(&g, &mut rng), Exponent::Finite(2.0)).unwrap();
        let out = module_action(&GFunction::point_mass(&g, 0, 1), &u).unwrap();
        for h in 0..2 {
            for k in 0..3 {
                assert_eq!(out.func.get(h, k), u.func.get(h, (k + 2) % 3));
            }
        }
    }

    #[test]
    fn matches_integral_form_and_lconv() {
        let g = z2_z3();
        let mut rng = random::rng(5);
        for _ in 0..20 {
            let f = random::gfunction::<Q, _>(&g, &mut rng);
            let u = random::gfunction::<Q, _>(&g, &mut rng);
            let acted = module_action(&f, &LpElement::new(u.clone(), Exponent::ONE).unwrap()).unwrap();
            assert_eq!(acted.func, integral_form(&f, &u));
            assert_eq!(acted.func, lconv(&f, &u).unwrap());
        }
    }

    #[test]
    fn unit_tilde_acts_trivially() {
        let g = z2_z3();
        let f = GFunction::<Q>::point_mass(&g, 1, 0);
        let u = LpElement::new(random::gfunction(&g, &mut random::rng(6)), Exponent::Infinity).unwrap();
        assert_eq!(module_action(&f, &u).unwrap(), u);
        assert!(u.is_extension());
    }

    #[test]
    fn associativity_and_identity() {
        let g = z2_z3();
        let mut rng = random::rng(7);
        let phi = PhiDensity::uniform(&g);
        for p in [Exponent::ONE, Exponent::Finite(2.0), Exponent::Finite(3.0), Exponent::Infinity] {
            let f = random::gfunction::<Q, _>(&g, &mut rng);
            let h = random::gfunction::<Q, _>(&g, &mut rng);
            let u = LpElement::new(random::gfunction(&g, &mut rng), p).unwrap();
            assert_eq!(check_module_associativity(&f, &h, &u).unwrap(), 0.0);
            assert_eq!(approx_identity_action(&phi, &u).unwrap().value, 0.0);
            let (lhs, rhs) = contraction(&f, &u).unwrap();
            assert!(lhs.at_most(&rhs, NORM_REL_SLACK));
        }
        let zero = LpElement::new(GFunction::zero(&g), Exponent::ONE).unwrap();
        assert_eq!(approx_identity_action(&phi, &zero).unwrap().value, 0.0);
        let u = LpElement::new(GFunction::point_mass(&g, 1, 2), Exponent::ONE).unwrap();
        assert_eq!(approx_identity_action(&phi, &u).unwrap().value, 0.0);
    }

    #[test]
    fn acts_through_tilde_only() {
        let g = z2_z3();
        let a = GFunction::<Q>::point_mass(&g, 0, 1);
        let b = GFunction::<Q>::point_mass(&g, 1, 1);
        let u = LpElement::new(random::gfunction(&g, &mut random::rng(8)), Exponent::Finite(3.0)).unwrap();
        assert_eq!(module_action(&a, &u).unwrap(), module_action(&b, &u).unwrap());
        // contrast: the τ-product does see the difference
        assert_ne!(tconv(&a, &u.func).unwrap(), tconv(&b, &u.func).unwrap());
        assert!(LpElement::new(u.func.clone(), Exponent::Finite(0.5)).is_err());
    }
}
