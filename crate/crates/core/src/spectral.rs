//! DFT fast path for the `K`-convolutions when `K = Z_n`.
//!
//! Forward kernel `exp(-2πi jk/n)`. Sizes up to 64 use the direct
//! transform, larger powers of two use iterative radix-2, and any other
//! size falls back to the naive convolution.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;

use crate::algebra::{lconv, rconv, standard_conv_g, tconv, tilde};
use crate::error::{Error, Result};
use crate::function::{GFunction, KFunction};
use crate::group::{semidirect, AutomorphismAction, FiniteGroup, SemidirectGroup};
use crate::norm::Exponent;
use crate::random;

type C = Complex64;

/// Largest size handled by the direct transform.
pub const DIRECT_LIMIT: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone, Debug)]
pub struct SpectralPlan {
    n: usize,
    /// `exp(-2πi j/n)` for `j < n`.
    roots: Vec<C>,
}

impl SpectralPlan {
    pub fn new(n: usize) -> SpectralPlan {
        let roots = (0..n)
            .map(|j| {
                let t = -2.0 * PI * j as f64 / n as f64;
                C::new(t.cos(), t.sin())
            })
            .collect();
        SpectralPlan { n, roots }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// True when convolution through this plan beats the naive loop.
    pub fn accelerates(&self) -> bool {
        self.n <= DIRECT_LIMIT || self.n.is_power_of_two()
    }

    fn root(&self, e: usize, dir: Direction) -> C {
        let r = self.roots[e % self.n];
        match dir {
            Direction::Forward => r,
            Direction::Inverse => r.conj(),
        }
    }

    /// Unnormalized transform; the inverse divides by `n`.
    pub fn transform(&self, data: &[C], dir: Direction) -> Vec<C> {
        assert_eq!(data.len(), self.n, "plan size mismatch");
        let mut out = if self.n > DIRECT_LIMIT && self.n.is_power_of_two() {
            self.radix2(data, dir)
        } else {
            self.direct(data, dir)
        };
        if dir == Direction::Inverse {
            let s = 1.0 / self.n as f64;
            out.iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    fn direct(&self, data: &[C], dir: Direction) -> Vec<C> {
        (0..self.n)
            .map(|k| {
                data.iter()
                    .enumerate()
                    .fold(C::new(0.0, 0.0), |acc, (j, v)| acc + v * self.root(j * k, dir))
            })
            .collect()
    }

    fn radix2(&self, data: &[C], dir: Direction) -> Vec<C> {
        let n = self.n;
        let bits = n.trailing_zeros();
        let mut a: Vec<C> = (0..n)
            .map(|i| data[i.reverse_bits() >> (usize::BITS - bits)])
            .collect();
        let mut len = 2;
        while len <= n {
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for j in 0..len / 2 {
                    let w = self.root(j * stride, dir);
                    let u = a[start + j];
                    let v = a[start + j + len / 2] * w;
                    a[start + j] = u + v;
                    a[start + j + len / 2] = u - v;
                }
            }
            len <<= 1;
        }
        a
    }

    /// Cyclic convolution `(a ∗ b)(x) = Σ_y a(y) b(x - y)`.
    pub fn convolve(&self, a: &[C], b: &[C]) -> Vec<C> {
        let fa = self.transform(a, Direction::Forward);
        let fb = self.transform(b, Direction::Forward);
        let prod: Vec<C> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
        self.transform(&prod, Direction::Inverse)
    }
}

fn require_cyclic(k: &FiniteGroup) -> Result<()> {
    if k.is_standard_cyclic() {
        Ok(())
    } else {
        Err(Error::NonCyclic)
    }
}

pub fn dft(phi: &KFunction<C>) -> Result<Vec<C>> {
    require_cyclic(phi.group())?;
    Ok(SpectralPlan::new(phi.group().order()).transform(phi.values(), Direction::Forward))
}

pub fn idft(k: &Arc<FiniteGroup>, spectrum: &[C]) -> Result<KFunction<C>> {
    require_cyclic(k)?;
    if spectrum.len() != k.order() {
        return Err(Error::Structural(format!(
            "spectrum has {} entries, |K| = {}",
            spectrum.len(),
            k.order()
        )));
    }
    let values = SpectralPlan::new(k.order()).transform(spectrum, Direction::Inverse);
    KFunction::from_values(k, values)
}

/// Every row of `f` convolved with `fixed`. `Z_n` is abelian, so the
/// same routine serves both sides.
fn rows_with(f: &GFunction<C>, fixed: &KFunction<C>) -> GFunction<C> {
    let group = f.group();
    let plan = SpectralPlan::new(group.k().order());
    let spec = plan.transform(fixed.values(), Direction::Forward);
    let mut values = Vec::with_capacity(group.order());
    for h in 0..group.h().order() {
        let row = plan.transform(f.row(h), Direction::Forward);
        let prod: Vec<C> = row.iter().zip(&spec).map(|(x, y)| x * y).collect();
        values.extend(plan.transform(&prod, Direction::Inverse));
    }
    GFunction::from_values(group, values).expect("shape")
}

fn fast_ok(f: &GFunction<C>, g: &GFunction<C>) -> Result<bool> {
    f.check_same_group(g)?;
    require_cyclic(f.group().k())?;
    let n = f.group().k().order();
    Ok(n <= DIRECT_LIMIT || n.is_power_of_two())
}

pub fn rconv_fft(f: &GFunction<C>, g: &GFunction<C>) -> Result<GFunction<C>> {
    if !fast_ok(f, g)? {
        return rconv(f, g);
    }
    Ok(rows_with(f, &tilde(g)))
}

pub fn lconv_fft(f: &GFunction<C>, g: &GFunction<C>) -> Result<GFunction<C>> {
    if !fast_ok(f, g)? {
        return lconv(f, g);
    }
    Ok(rows_with(g, &tilde(f)))
}

pub fn tconv_fft(f: &GFunction<C>, g: &GFunction<C>) -> Result<GFunction<C>> {
    if !fast_ok(f, g)? {
        return tconv(f, g);
    }
    let r = rows_with(f, &tilde(g));
    let l = rows_with(g, &tilde(f));
    let values = r.values().iter().zip(l.values()).map(|(a, b)| 0.5 * (a + b)).collect();
    GFunction::from_values(f.group(), values)
}

/// Per-entry agreement tolerance `1e-9 (1 + ‖f‖₁ ‖g‖₁)`.
pub fn agreement_tol(f: &GFunction<C>, g: &GFunction<C>) -> f64 {
    let nf = crate::algebra::norm(f, Exponent::ONE).value;
    let ng = crate::algebra::norm(g, Exponent::ONE).value;
    1e-9 * (1.0 + nf * ng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    NaiveTconv,
    FftTconv,
    StandardConvG,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::NaiveTconv, Kernel::FftTconv, Kernel::StandardConvG];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::NaiveTconv => "naive_tconv",
            Kernel::FftTconv => "fft_tconv",
            Kernel::StandardConvG => "standard_conv_G",
        }
    }

    fn run(self, f: &GFunction<C>, g: &GFunction<C>) -> Result<GFunction<C>> {
        match self {
            Kernel::NaiveTconv => tconv(f, g),
            Kernel::FftTconv => tconv_fft(f, g),
            Kernel::StandardConvG => standard_conv_g(f, g),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub h_order: usize,
    pub k_order: usize,
    pub kernel: Kernel,
    pub ns_median: u128,
}

pub const CSV_HEADER: &str = "h_order,k_order,kernel,ns_median";

#[derive(Clone, Copy, Debug)]
pub struct BenchConfig {
    pub reps: usize,
    pub warmup: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> BenchConfig {
        BenchConfig {
            reps: 11,
            warmup: 2,
            seed: 0,
        }
    }
}

/// `Z_a ⋉ Z_b`, with the inversion action when `a` is even.
pub fn bench_group(h_order: usize, k_order: usize) -> Result<Arc<SemidirectGroup>> {
    let h = FiniteGroup::cyclic(h_order)?;
    let k = FiniteGroup::cyclic(k_order)?;
    let action = if h_order.is_multiple_of(2) {
        AutomorphismAction::inversion(&h, &k)
    } else {
        AutomorphismAction::trivial(&h, &k)
    };
    Ok(Arc::new(semidirect(h, k, action)?))
}

/// Gather-form oracle for the ordinary convolution: `Σ_y f(y) g(y⁻¹x)`.
fn standard_oracle(f: &GFunction<C>, g: &GFunction<C>) -> Vec<C> {
    let group = f.group();
    let n = group.order();
    let inv: Vec<usize> = (0..n).map(|y| group.inv_flat(y)).collect();
    (0..n)
        .map(|x| {
            (0..n).fold(C::new(0.0, 0.0), |acc, y| {
                acc + f.values()[y] * g.values()[group.mul_flat(inv[y], x)]
            })
        })
        .collect()
}

fn cross_check(kernel: Kernel, f: &GFunction<C>, g: &GFunction<C>, out: &GFunction<C>) -> Result<()> {
    let tol = agreement_tol(f, g);
    let reference: Vec<C> = match kernel {
        Kernel::StandardConvG => standard_oracle(f, g),
        Kernel::NaiveTconv | Kernel::FftTconv => {
            let other = if kernel == Kernel::NaiveTconv {
                tconv_fft(f, g)?
            } else {
                tconv(f, g)?
            };
            other.into_values()
        }
    };
    let dev = out
        .values()
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if dev > tol {
        return Err(Error::Format(format!(
            "{} failed its cross-check: deviation {dev:e} > {tol:e}",
            kernel.name()
        )));
    }
    Ok(())
}

pub fn bench(sizes: &[(usize, usize)], config: BenchConfig) -> Result<Vec<BenchRow>> {
    let reps = config.reps.max(11);
    let mut rows = Vec::new();
    for &(nh, nk) in sizes {
        let group = bench_group(nh, nk)?;
        let mut rng = random::rng(config.seed);
        let f = random::gfunction::<C, _>(&group, &mut rng);
        let g = random::gfunction::<C, _>(&group, &mut rng);
        for kernel in Kernel::ALL {
            let out = kernel.run(&f, &g)?;
            cross_check(kernel, &f, &g, &out)?;
            for _ in 0..config.warmup {
                std::hint::black_box(kernel.run(&f, &g)?);
            }
            let mut times: Vec<u128> = (0..reps)
                .map(|_| {
                    let t = Instant::now();
                    let r = kernel.run(&f, &g);
                    let ns = t.elapsed().as_nanos();
                    std::hint::black_box(r).map(|_| ns)
                })
                .collect::<Result<_>>()?;
            times.sort_unstable();
            rows.push(BenchRow {
                h_order: nh,
                k_order: nk,
                kernel,
                ns_median: times[reps / 2],
            });
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.h_order, r.k_order, r.kernel.name(), r.ns_median));
    }
    s
}

/// Parses `"2x4096,8x256"`.
pub fn parse_sizes(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (a, b) = t
                .split_once(['x', 'X'])
                .ok_or_else(|| Error::Format(format!("size {t:?} is not of the form AxB")))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| Error::Format(format!("bad group order {v:?}")))
            };
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}
