//! Quadrature model of the affine group: `H = (0,∞)` acting on `K = ℝ` by
//! dilation `τ_h(k) = hk`.
//!
//! `K` is sampled on a uniform grid `x_j = x₀ + jΔx` with weight `Δx`, and
//! `H` on geometric nodes `q^m`, `|m| ≤ M`, with weight `ln q`. Only `δ`
//! is nontrivial, and it is estimated from the grid by comparing the mass
//! of a bump before and after dilation.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::Exponent;
use crate::spectral::SpectralPlan;

type C = Complex64;

/// Cells kept clear between a dilated bump and the window edge.
const EDGE_CELLS: f64 = 2.0;
/// Fewest cells a bump radius may span before and after dilation.
const MIN_RADIUS_CELLS: f64 = 8.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dx: f64,
    pub x0: f64,
    pub n: usize,
    pub q: f64,
    pub m: usize,
    /// `δ(q^m)` for `m = -M..=M`; estimated from the grid when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
}

impl GridSpec {
    /// A grid with `δ` estimated at every `H`-node.
    pub fn new(dx: f64, x0: f64, n: usize, q: f64, m: usize) -> Result<GridSpec> {
        let mut grid = GridSpec {
            dx,
            x0,
            n,
            q,
            m,
            delta: None,
        };
        grid.check_shape()?;
        let delta = grid
            .h_nodes()
            .iter()
            .map(|&h| delta_estimate(&grid, h))
            .collect::<Result<Vec<_>>>()?;
        grid.delta = Some(delta);
        Ok(grid)
    }

    /// The default study grid: window `[-8, 8)`, `q = 2`, `M = 4`.
    pub fn standard(n: usize) -> Result<GridSpec> {
        GridSpec::new(16.0 / n as f64, -8.0, n, 2.0, 4)
    }

    fn check_shape(&self) -> Result<()> {
        if !(self.dx > 0.0 && self.dx.is_finite()) {
            return Err(Error::Grid(format!("dx = {} must be positive", self.dx)));
        }
        if !(self.q > 1.0 && self.q.is_finite()) {
            return Err(Error::Grid(format!("q = {} must exceed 1", self.q)));
        }
        if self.n < 2 {
            return Err(Error::Grid("need at least two K-nodes".into()));
        }
        let c = self.origin_offset_f();
        if (c - c.round()).abs() > 1e-9 || c < 0.0 || c.round() as usize >= self.n {
            return Err(Error::Grid("x = 0 must be a grid node inside the window".into()));
        }
        Ok(())
    }

    /// Validates shape and supplied `δ`, estimating it when missing.
    pub fn validated(mut self) -> Result<GridSpec> {
        self.check_shape()?;
        match &self.delta {
            None => {
                let m = self.m;
                let est = GridSpec::new(self.dx, self.x0, self.n, self.q, m)?;
                self.delta = est.delta;
            }
            Some(d) => {
                if d.len() != 2 * self.m + 1 {
                    return Err(Error::Grid(format!("delta needs {} values", 2 * self.m + 1)));
                }
                if d.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                    return Err(Error::Grid("delta values must be positive".into()));
                }
                if d[self.m] != 1.0 {
                    return Err(Error::Grid("delta(1) must equal 1".into()));
                }
            }
        }
        Ok(self)
    }

    fn origin_offset_f(&self) -> f64 {
        -self.x0 / self.dx
    }

    /// Index of the node `x = 0`.
    pub fn origin(&self) -> usize {
        self.origin_offset_f().round() as usize
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn x_last(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn h_count(&self) -> usize {
        2 * self.m + 1
    }

    /// `q^m` for `m = -M..=M`.
    pub fn h_nodes(&self) -> Vec<f64> {
        (0..self.h_count())
            .map(|i| self.q.powi(i as i32 - self.m as i32))
            .collect()
    }

    pub fn h_weight(&self) -> f64 {
        self.q.ln()
    }

    pub fn delta(&self) -> &[f64] {
        self.delta.as_deref().expect("validated grid carries delta")
    }

    /// Same half-open window `[x₀, x₀ + NΔx)` with `Δx` halved.
    pub fn refined(&self) -> Result<GridSpec> {
        GridSpec::new(self.dx / 2.0, self.x0, 2 * self.n, self.q, self.m)
    }
}

/// `u ∘ τ_h⁻¹`, i.e. `x ↦ u(x/h)`, by linear interpolation; zero outside
/// the window.
pub fn resample_dilate(grid: &GridSpec, u: &[C], h: f64) -> Result<Vec<C>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Grid(format!("dilation factor {h} must be positive")));
    }
    if u.len() != grid.n {
        return Err(Error::Grid(format!("{} samples on a {}-node grid", u.len(), grid.n)));
    }
    if h == 1.0 {
        return Ok(u.to_vec());
    }
    Ok((0..grid.n)
        .map(|i| {
            let t = (grid.x(i) / h - grid.x0) / grid.dx;
            if t < 0.0 || t > (grid.n - 1) as f64 {
                return C::new(0.0, 0.0);
            }
            let j = (t.floor() as usize).min(grid.n - 2);
            let w = t - j as f64;
            u[j] * (1.0 - w) + u[j + 1] * w
        })
        .collect())
}

/// Smooth compactly supported bump `exp(-1 / (1 - (x/r)²))`.
fn bump(x: f64, r: f64) -> f64 {
    let s = x / r;
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Estimate of `δ(h)` as mass(bump) / mass(bump dilated by `h`).
pub fn delta_estimate(grid: &GridSpec, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Grid(format!("dilation factor {h} must be positive")));
    }
    if h == 1.0 {
        return Ok(1.0);
    }
    let half = (-grid.x0).min(grid.x_last()) - EDGE_CELLS * grid.dx;
    let r = half / h.max(1.0);
    let smallest = r * h.min(1.0);
    if half <= 0.0 || smallest < MIN_RADIUS_CELLS * grid.dx {
        return Err(Error::Grid(format!(
            "bump for h = {h} escapes the window or is unresolved"
        )));
    }
    let u: Vec<C> = (0..grid.n).map(|j| C::new(bump(grid.x(j), r), 0.0)).collect();
    let before: f64 = u.iter().map(|v| v.re).sum();
    let after: f64 = resample_dilate(grid, &u, h)?.iter().map(|v| v.re).sum();
    Ok(before / after)
}

/// A sampled function on the `H × K` grid, rows indexed by `m + M`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledGFunction {
    grid: Arc<GridSpec>,
    values: Vec<C>,
}

impl SampledGFunction {
    pub fn new(grid: &Arc<GridSpec>, values: Vec<C>) -> Result<SampledGFunction> {
        if values.len() != grid.h_count() * grid.n {
            return Err(Error::Grid(format!(
                "expected {} samples, got {}",
                grid.h_count() * grid.n,
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Grid("samples must be finite".into()));
        }
        Ok(SampledGFunction {
            grid: grid.clone(),
            values,
        })
    }

    /// Samples `f(q^m, x_j)`; the closure receives `(m, x)`.
    pub fn from_fn(grid: &Arc<GridSpec>, f: impl Fn(i32, f64) -> C) -> SampledGFunction {
        let values = (0..grid.h_count())
            .flat_map(|i| {
                let m = i as i32 - grid.m as i32;
                (0..grid.n).map(move |j| (m, j))
            })
            .map(|(m, j)| f(m, grid.x(j)))
            .collect();
        SampledGFunction {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn values(&self) -> &[C] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[C] {
        &self.values[i * self.grid.n..(i + 1) * self.grid.n]
    }

    fn check_grid(&self, other: &SampledGFunction) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::Grid("operands live on different grids".into()))
        }
    }

    fn from_rows(grid: &Arc<GridSpec>, rows: impl Iterator<Item = Vec<C>>) -> SampledGFunction {
        SampledGFunction {
            grid: grid.clone(),
            values: rows.flatten().collect(),
        }
    }
}

/// `f̃(x) = Σ_m f(q^m, x) δ(q^m) ln q`.
pub fn tilde_c(f: &SampledGFunction) -> Vec<C> {
    let grid = &f.grid;
    let w = grid.h_weight();
    let mut out = vec![C::new(0.0, 0.0); grid.n];
    for (i, d) in grid.delta().iter().enumerate() {
        for (acc, v) in out.iter_mut().zip(f.row(i)) {
            *acc += v * (d * w);
        }
    }
    out
}

/// `(a ∗ b)(x_i) = Σ_j a(x_j) b(x_i - x_j) Δx`, via a zero-padded FFT.
pub fn conv_c(grid: &GridSpec, a: &[C], b: &[C]) -> Vec<C> {
    let n = grid.n;
    let len = (2 * n).next_power_of_two();
    let plan = SpectralPlan::new(len);
    let pad = |v: &[C]| {
        let mut p = v.to_vec();
        p.resize(len, C::new(0.0, 0.0));
        p
    };
    let full = plan.convolve(&pad(a), &pad(b));
    let c = grid.origin();
    (0..n).map(|i| full[i + c] * grid.dx).collect()
}

pub fn rconv_c(f: &SampledGFunction, g: &SampledGFunction) -> Result<SampledGFunction> {
    f.check_grid(g)?;
    let gt = tilde_c(g);
    let grid = &f.grid;
    Ok(SampledGFunction::from_rows(
        grid,
        (0..grid.h_count()).map(|i| conv_c(grid, f.row(i), &gt)),
    ))
}

pub fn lconv_c(f: &SampledGFunction, g: &SampledGFunction) -> Result<SampledGFunction> {
    f.check_grid(g)?;
    let ft = tilde_c(f);
    let grid = &f.grid;
    Ok(SampledGFunction::from_rows(
        grid,
        (0..grid.h_count()).map(|i| conv_c(grid, &ft, g.row(i))),
    ))
}

pub fn tconv_c(f: &SampledGFunction, g: &SampledGFunction) -> Result<SampledGFunction> {
    let r = rconv_c(f, g)?;
    let l = lconv_c(f, g)?;
    let values = r.values.iter().zip(&l.values).map(|(a, b)| 0.5 * (a + b)).collect();
    SampledGFunction::new(&f.grid, values)
}

/// `f*(h, x) = conj(f(h, -x))`; `ℝ` is unimodular. Nodes whose mirror
/// falls outside the window get zero.
pub fn involution_c(f: &SampledGFunction) -> SampledGFunction {
    let grid = &f.grid;
    let c2 = 2 * grid.origin();
    SampledGFunction::from_rows(
        grid,
        (0..grid.h_count()).map(|i| {
            let row = f.row(i);
            (0..grid.n)
                .map(|j| match c2.checked_sub(j) {
                    Some(m) if m < grid.n => row[m].conj(),
                    _ => C::new(0.0, 0.0),
                })
                .collect()
        }),
    )
}

/// `L^p` norm with respect to `δ(h) dh dk`.
pub fn norm_c(f: &SampledGFunction, p: Exponent) -> f64 {
    let grid = &f.grid;
    let base = grid.h_weight() * grid.dx;
    match p {
        Exponent::Infinity => f.values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        Exponent::Finite(p) => {
            let mut sum = 0.0;
            for (i, d) in grid.delta().iter().enumerate() {
                let row: f64 = f.row(i).iter().map(|v| v.norm().powf(p)).sum();
                sum += row * d * base;
            }
            sum.powf(1.0 / p)
        }
    }
}

/// `∫ |φ| dk` on the grid.
pub fn norm_k_c(grid: &GridSpec, phi: &[C]) -> f64 {
    phi.iter().map(|v| v.norm()).sum::<f64>() * grid.dx
}

/// Residuals below this are indistinguishable from rounding.
pub const ROUNDOFF_FLOOR: f64 = 1e-11;
pub const CONTINUUM_TOL: f64 = 1e-3;

/// Gaussian test data `a_m exp(-(x - μ - s m)² / 2σ²)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GaussianFamily {
    pub sigma: f64,
    pub mu: f64,
    pub shift: f64,
    /// `a_m = 1 / (1 + decay m²)`.
    pub decay: f64,
}

impl GaussianFamily {
    pub fn amplitude(&self, m: i32) -> f64 {
        1.0 / (1.0 + self.decay * (m * m) as f64)
    }

    pub fn center(&self, m: i32) -> f64 {
        self.mu + self.shift * m as f64
    }

    pub fn eval(&self, m: i32, x: f64) -> f64 {
        let d = x - self.center(m);
        self.amplitude(m) * (-d * d / (2.0 * self.sigma * self.sigma)).exp()
    }

    pub fn sample(&self, grid: &Arc<GridSpec>) -> SampledGFunction {
        SampledGFunction::from_fn(grid, |m, x| C::new(self.eval(m, x), 0.0))
    }
}

/// The analytic `δ` of dilation, from `dk = δ(h) d(hk)`.
pub fn delta_exact(h: f64) -> f64 {
    1.0 / h
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelResult {
    pub n: usize,
    pub dx: f64,
    /// `|δ̂(2) - δ(2)|`.
    pub delta_error: f64,
    /// `max |δ̂(q^a) δ̂(q^b) - δ̂(q^(a+b))|`.
    pub delta_hom_residual: f64,
    /// Relative `L¹` distance of `tilde(rconv(f, g))` from the analytic `f̃ ∗ g̃`.
    pub projection_residual: f64,
    /// Relative gap between `tilde(rconv(f, g))` and `conv(f̃, g̃)` on the grid.
    pub projection_discrete: f64,
    /// `max(0, ‖f ⋆ g‖₁ - ‖f‖₁‖g‖₁)` on the grid.
    pub submult_violation: f64,
    /// Relative distance of `‖f ⋆ g‖₁` from its analytic value `‖f‖₁‖g‖₁`.
    pub submult_slack: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContinuumReport {
    pub delta_convention: String,
    pub f: GaussianFamily,
    pub g: GaussianFamily,
    pub levels: Vec<LevelResult>,
    pub tolerance: f64,
    pub roundoff_floor: f64,
    pub within_tolerance: bool,
    pub refinement_ok: bool,
    /// "consistent" or "inconsistent"; the model is ours, so never "verified".
    pub verdict: String,
}

pub const STUDY_F: GaussianFamily = GaussianFamily {
    sigma: 0.25,
    mu: 0.3,
    shift: 0.1,
    decay: 1.0,
};
pub const STUDY_G: GaussianFamily = GaussianFamily {
    sigma: 0.3,
    mu: -0.2,
    shift: -0.05,
    decay: 0.5,
};

/// Analytic `f̃ ∗ g̃` for two Gaussian families with exact `δ`.
fn analytic_projection(grid: &GridSpec, f: &GaussianFamily, g: &GaussianFamily) -> Vec<f64> {
    let s2 = f.sigma * f.sigma + g.sigma * g.sigma;
    let scale = (2.0 * std::f64::consts::PI).sqrt() * f.sigma * g.sigma / s2.sqrt();
    let w = grid.h_weight();
    let ms: Vec<i32> = (-(grid.m as i32)..=grid.m as i32).collect();
    let hs = grid.h_nodes();
    (0..grid.n)
        .map(|j| {
            let x = grid.x(j);
            let mut acc = 0.0;
            for (a, &ma) in ms.iter().enumerate() {
                let wa = delta_exact(hs[a]) * w * f.amplitude(ma);
                for (b, &mb) in ms.iter().enumerate() {
                    let wb = delta_exact(hs[b]) * w * g.amplitude(mb);
                    let d = x - f.center(ma) - g.center(mb);
                    acc += wa * wb * scale * (-d * d / (2.0 * s2)).exp();
                }
            }
            acc
        })
        .collect()
}

fn analytic_l1(grid: &GridSpec, f: &GaussianFamily) -> f64 {
    let mass = (2.0 * std::f64::consts::PI).sqrt() * f.sigma;
    let w = grid.h_weight();
    grid.h_nodes()
        .iter()
        .enumerate()
        .map(|(i, &h)| delta_exact(h) * w * f.amplitude(i as i32 - grid.m as i32) * mass)
        .sum()
}

pub fn evaluate_level(grid: GridSpec, f: &GaussianFamily, g: &GaussianFamily) -> Result<LevelResult> {
    let grid = Arc::new(grid.validated()?);
    let delta = grid.delta();
    let m = grid.m;
    let delta_error = (delta_estimate(&grid, 2.0)? - delta_exact(2.0)).abs();
    let mut delta_hom_residual: f64 = 0.0;
    for a in 0..grid.h_count() {
        for b in 0..grid.h_count() {
            if let Some(c) = (a + b).checked_sub(m).filter(|&c| c < grid.h_count()) {
                delta_hom_residual = delta_hom_residual.max((delta[a] * delta[b] - delta[c]).abs());
            }
        }
    }
    let fs = f.sample(&grid);
    let gs = g.sample(&grid);
    let r = rconv_c(&fs, &gs)?;
    let proj = tilde_c(&r);
    let reference = analytic_projection(&grid, f, g);
    let ref_norm: f64 = reference.iter().map(|v| v.abs()).sum::<f64>() * grid.dx;
    let diff: f64 = proj.iter().zip(&reference).map(|(a, b)| (a - b).norm()).sum::<f64>() * grid.dx;
    let discrete = conv_c(&grid, &tilde_c(&fs), &tilde_c(&gs));
    let ddiff: f64 = proj.iter().zip(&discrete).map(|(a, b)| (a - b).norm()).sum::<f64>() * grid.dx;

    let t = tconv_c(&fs, &gs)?;
    let lhs = norm_c(&t, Exponent::ONE);
    let rhs = norm_c(&fs, Exponent::ONE) * norm_c(&gs, Exponent::ONE);
    let analytic = analytic_l1(&grid, f) * analytic_l1(&grid, g);
    Ok(LevelResult {
        n: grid.n,
        dx: grid.dx,
        delta_error,
        delta_hom_residual,
        projection_residual: diff / ref_norm,
        projection_discrete: ddiff / ref_norm,
        submult_violation: (lhs - rhs).max(0.0),
        submult_slack: (lhs - analytic).abs() / analytic,
    })
}

/// `after` improves on `before` by at least 2×, or both sit at rounding level.
pub fn halves(before: f64, after: f64) -> bool {
    after <= before / 2.0 || after <= ROUNDOFF_FLOOR
}

/// Three refinement levels starting from `base`.
pub fn refinement_study(base: GridSpec) -> Result<ContinuumReport> {
    let base = base.validated()?;
    let mut grids = vec![base];
    for _ in 0..2 {
        let next = grids.last().expect("nonempty").refined()?;
        grids.push(next);
    }
    let levels = grids
        .into_iter()
        .map(|g| evaluate_level(g, &STUDY_F, &STUDY_G))
        .collect::<Result<Vec<_>>>()?;
    let within_tolerance = levels.iter().all(|l| {
        l.delta_error <= CONTINUUM_TOL
            && l.delta_hom_residual <= CONTINUUM_TOL
            && l.projection_residual <= CONTINUUM_TOL
            && l.submult_violation <= CONTINUUM_TOL
            && l.submult_slack <= CONTINUUM_TOL
    });
    let refinement_ok = levels.windows(2).all(|w| {
        halves(w[0].projection_residual, w[1].projection_residual)
            && halves(w[0].submult_violation, w[1].submult_violation)
            && halves(w[0].submult_slack, w[1].submult_slack)
    });
    let verdict = if within_tolerance && refinement_ok {
        "consistent"
    } else {
        "inconsistent"
    };
    Ok(ContinuumReport {
        delta_convention: "delta(h) = 1/h for tau_h(k) = h k".into(),
        f: STUDY_F,
        g: STUDY_G,
        levels,
        tolerance: CONTINUUM_TOL,
        roundoff_floor: ROUNDOFF_FLOOR,
        within_tolerance,
        refinement_ok,
        verdict: verdict.into(),
    })
}
