//! Functions on `G_τ` and on `K`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, SemidirectGroup};
use crate::scalar::Scalar;

/// A function on `G_τ`, stored row-major: `values[h * |K| + k]`.
#[derive(Clone, Debug)]
pub struct GFunction<S> {
    group: Arc<SemidirectGroup>,
    values: Vec<S>,
}

/// A function on `K`.
#[derive(Clone, Debug)]
pub struct KFunction<S> {
    group: Arc<FiniteGroup>,
    values: Vec<S>,
}

fn same_arc<T: PartialEq>(a: &Arc<T>, b: &Arc<T>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl<S: Scalar> GFunction<S> {
    pub fn zero(group: &Arc<SemidirectGroup>) -> GFunction<S> {
        GFunction {
            group: group.clone(),
            values: vec![S::zero(); group.order()],
        }
    }

    pub fn from_values(group: &Arc<SemidirectGroup>, values: Vec<S>) -> Result<GFunction<S>> {
        if values.len() != group.order() {
            return Err(Error::Structural(format!(
                "expected {} values, got {}",
                group.order(),
                values.len()
            )));
        }
        Ok(GFunction {
            group: group.clone(),
            values,
        })
    }

    /// Unit mass at `(h, k)`.
    pub fn point_mass(group: &Arc<SemidirectGroup>, h: usize, k: usize) -> GFunction<S> {
        let mut f = GFunction::zero(group);
        f.values[group.index(h, k)] = S::one();
        f
    }

    pub fn point_mass_flat(group: &Arc<SemidirectGroup>, x: usize) -> GFunction<S> {
        let (h, k) = group.split(x);
        GFunction::point_mass(group, h, k)
    }

    pub fn group(&self) -> &Arc<SemidirectGroup> {
        &self.group
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn get(&self, h: usize, k: usize) -> &S {
        &self.values[self.group.index(h, k)]
    }

    pub fn set(&mut self, h: usize, k: usize, v: S) {
        let i = self.group.index(h, k);
        self.values[i] = v;
    }

    pub fn row(&self, h: usize) -> &[S] {
        let nk = self.group.k().order();
        &self.values[h * nk..(h + 1) * nk]
    }

    pub fn row_mut(&mut self, h: usize) -> &mut [S] {
        let nk = self.group.k().order();
        &mut self.values[h * nk..(h + 1) * nk]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Scalar::is_zero)
    }

    pub fn check_same_group(&self, other: &GFunction<S>) -> Result<()> {
        if same_arc(&self.group, &other.group) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    fn zip(&self, other: &GFunction<S>, op: impl Fn(&S, &S) -> S) -> Result<GFunction<S>> {
        self.check_same_group(other)?;
        Ok(GFunction {
            group: self.group.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| op(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &GFunction<S>) -> Result<GFunction<S>> {
        self.zip(other, S::add)
    }

    pub fn sub(&self, other: &GFunction<S>) -> Result<GFunction<S>> {
        self.zip(other, S::sub)
    }

    pub fn scale(&self, c: &S) -> GFunction<S> {
        self.map(|v| c.mul(v))
    }

    pub fn map(&self, op: impl Fn(&S) -> S) -> GFunction<S> {
        GFunction {
            group: self.group.clone(),
            values: self.values.iter().map(op).collect(),
        }
    }

    /// Values equal exactly (exact backend) or within `tol` per entry.
    pub fn close_to(&self, other: &GFunction<S>, tol: f64) -> bool {
        self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a.close_to(b, tol))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &GFunction<S>) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.sub(b).modulus())
            .fold(0.0, f64::max)
    }
}

impl<S: Scalar> PartialEq for GFunction<S> {
    fn eq(&self, other: &GFunction<S>) -> bool {
        same_arc(&self.group, &other.group) && self.values == other.values
    }
}

impl<S: Scalar> KFunction<S> {
    pub fn zero(group: &Arc<FiniteGroup>) -> KFunction<S> {
        KFunction {
            group: group.clone(),
            values: vec![S::zero(); group.order()],
        }
    }

    pub fn from_values(group: &Arc<FiniteGroup>, values: Vec<S>) -> Result<KFunction<S>> {
        if values.len() != group.order() {
            return Err(Error::Structural(format!(
                "expected {} values, got {}",
                group.order(),
                values.len()
            )));
        }
        Ok(KFunction {
            group: group.clone(),
            values,
        })
    }

    pub fn point_mass(group: &Arc<FiniteGroup>, k: usize) -> KFunction<S> {
        let mut f = KFunction::zero(group);
        f.values[k] = S::one();
        f
    }

    /// The unit of `L¹(K)`: the point mass at the identity.
    pub fn unit(group: &Arc<FiniteGroup>) -> KFunction<S> {
        KFunction::point_mass(group, group.identity())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [S] {
        &mut self.values
    }

    pub fn get(&self, k: usize) -> &S {
        &self.values[k]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Scalar::is_zero)
    }

    pub fn check_same_group(&self, other: &KFunction<S>) -> Result<()> {
        if same_arc(&self.group, &other.group) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    pub fn add(&self, other: &KFunction<S>) -> Result<KFunction<S>> {
        self.check_same_group(other)?;
        Ok(KFunction {
            group: self.group.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &KFunction<S>) -> Result<KFunction<S>> {
        self.check_same_group(other)?;
        Ok(KFunction {
            group: self.group.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn scale(&self, c: &S) -> KFunction<S> {
        KFunction {
            group: self.group.clone(),
            values: self.values.iter().map(|v| c.mul(v)).collect(),
        }
    }

    pub fn close_to(&self, other: &KFunction<S>, tol: f64) -> bool {
        self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a.close_to(b, tol))
    }
}

impl<S: Scalar> PartialEq for KFunction<S> {
    fn eq(&self, other: &KFunction<S>) -> bool {
        same_arc(&self.group, &other.group) && self.values == other.values
    }
}
