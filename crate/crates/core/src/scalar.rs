//! Scalar backends.
//!
//! Every algebra operation is generic over [`Scalar`]. Two backends exist:
//! [`GaussQ`] (exact Gaussian rationals, the default for law verification)
//! and [`Complex64`] (double precision, used by benchmarks and the
//! quadrature model). All operations on function spaces use only ring
//! operations, conjugation and the constant 1/2, so the exact backend never
//! needs division.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Roots;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational with an `i128` fast path.
///
/// Values are kept canonical: `Big` is only used when the reduced fraction
/// does not fit into `i128`, so structural equality is value equality.
#[derive(Clone, Debug)]
pub enum Rational {
    Small(Ratio<i128>),
    Big(BigRational),
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Rational {
        assert!(den != 0, "zero denominator");
        Rational::Small(Ratio::new(num as i128, den as i128))
    }

    pub fn zero() -> Rational {
        Rational::Small(Ratio::zero())
    }

    pub fn one() -> Rational {
        Rational::Small(Ratio::one())
    }

    pub fn half() -> Rational {
        Rational::new(1, 2)
    }

    /// Exact conversion of a finite double (every finite double is dyadic).
    pub fn from_f64(x: f64) -> Option<Rational> {
        BigRational::from_float(x).map(Rational::from_big)
    }

    pub fn from_big(b: BigRational) -> Rational {
        match (b.numer().to_i128(), b.denom().to_i128()) {
            (Some(n), Some(d)) => Rational::Small(Ratio::new_raw(n, d)),
            _ => Rational::Big(b),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(r) => {
                BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
            }
            Rational::Big(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Rational::Small(r) => r.is_zero(),
            Rational::Big(b) => b.is_zero(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rational::Small(r) => r.numer().signum() as i32,
            Rational::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rational::Small(r) => r.to_f64().unwrap_or(f64::NAN),
            Rational::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn abs(&self) -> Rational {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Rational {
        assert!(!self.is_zero(), "reciprocal of zero");
        match self {
            Rational::Small(r) if *r.numer() != i128::MIN => Rational::Small(r.recip()),
            other => Rational::from_big(other.to_big().recip()),
        }
    }

    /// Exact square root, if the value is the square of a rational.
    pub fn sqrt_exact(&self) -> Option<Rational> {
        if self.signum() < 0 {
            return None;
        }
        match self {
            Rational::Small(r) => {
                let (n, d) = (*r.numer(), *r.denom());
                let (sn, sd) = (n.sqrt(), d.sqrt());
                (sn * sn == n && sd * sd == d).then(|| Rational::Small(Ratio::new_raw(sn, sd)))
            }
            Rational::Big(b) => {
                let (n, d) = (b.numer(), b.denom());
                let (sn, sd) = (n.sqrt(), d.sqrt());
                (&sn * &sn == *n && &sd * &sd == *d)
                    .then(|| Rational::from_big(BigRational::new_raw(sn, sd)))
            }
        }
    }

    fn combine(
        &self,
        other: &Rational,
        small: impl Fn(&Ratio<i128>, &Ratio<i128>) -> Option<Ratio<i128>>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Rational {
        if let (Rational::Small(a), Rational::Small(b)) = (self, other) {
            if let Some(r) = small(a, b) {
                return Rational::Small(r);
            }
        }
        Rational::from_big(big(self.to_big(), other.to_big()))
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Rational) -> bool {
        match (self, other) {
            (Rational::Small(a), Rational::Small(b)) => a == b,
            (Rational::Big(a), Rational::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Rational) -> Ordering {
        match (self, other) {
            (Rational::Small(a), Rational::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, o: &Rational) -> Rational {
        self.combine(o, |a, b| a.checked_add(b), |a, b| a + b)
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, o: &Rational) -> Rational {
        self.combine(o, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, o: &Rational) -> Rational {
        self.combine(o, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, o: Rational) -> Rational {
        &self + &o
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, o: Rational) -> Rational {
        &self - &o
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, o: Rational) -> Rational {
        &self * &o
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self {
            // i128::MIN numerators cannot be negated in place
            Rational::Small(r) if *r.numer() != i128::MIN => Rational::Small(-r),
            other => Rational::from_big(-other.to_big()),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Rational::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Rational, ParseRationalError> {
        let err = || ParseRationalError(s.to_string());
        let (n, d) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Rational::from_big(BigRational::new(n, d)))
    }
}

/// Complex scalar usable by the generic algebra.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    /// Whether equality on this backend is exact.
    const EXACT: bool;
    const BACKEND: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn half() -> Self;
    /// `re_num/re_den + i·im_num/im_den`.
    fn from_ratio(re: (i64, i64), im: (i64, i64)) -> Self;
    /// Exact for the rational backend (doubles are dyadic rationals).
    fn from_f64_parts(re: f64, im: f64) -> Self;

    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;

    /// `acc += a * b`
    fn mul_add_assign(acc: &mut Self, a: &Self, b: &Self) {
        *acc = acc.add(&a.mul(b));
    }

    fn is_zero(&self) -> bool;
    fn modulus(&self) -> f64;
    /// `|z|` as an exact rational, when it is one.
    fn modulus_exact(&self) -> Option<Rational>;
    fn is_nonneg_real(&self) -> bool;
    fn to_c64(&self) -> Complex64;

    /// Multiply by a positive real weight; weight 1 is a no-op.
    fn scale(&self, w: f64) -> Self {
        if w == 1.0 {
            self.clone()
        } else {
            self.mul(&Self::from_f64_parts(w, 0.0))
        }
    }

    /// Backend-aware closeness: exact equality, or absolute tolerance.
    fn close_to(&self, o: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == o
        } else {
            self.sub(o).modulus() <= tol
        }
    }
}

/// Exact Gaussian rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussQ {
    pub re: Rational,
    pub im: Rational,
}

impl GaussQ {
    pub fn new(re: Rational, im: Rational) -> GaussQ {
        GaussQ { re, im }
    }

    pub fn abs_sq(&self) -> Rational {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }
}

impl Add for GaussQ {
    type Output = GaussQ;
    fn add(self, o: GaussQ) -> GaussQ {
        Scalar::add(&self, &o)
    }
}

impl Sub for GaussQ {
    type Output = GaussQ;
    fn sub(self, o: GaussQ) -> GaussQ {
        Scalar::sub(&self, &o)
    }
}

impl Mul for GaussQ {
    type Output = GaussQ;
    fn mul(self, o: GaussQ) -> GaussQ {
        Scalar::mul(&self, &o)
    }
}

impl AddAssign<&GaussQ> for GaussQ {
    fn add_assign(&mut self, o: &GaussQ) {
        self.re = &self.re + &o.re;
        self.im = &self.im + &o.im;
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.re, self.im)
    }
}

impl Scalar for GaussQ {
    const EXACT: bool = true;
    const BACKEND: &'static str = "exact";

    fn zero() -> Self {
        GaussQ::new(Rational::zero(), Rational::zero())
    }

    fn one() -> Self {
        GaussQ::new(Rational::one(), Rational::zero())
    }

    fn half() -> Self {
        GaussQ::new(Rational::half(), Rational::zero())
    }

    fn from_ratio(re: (i64, i64), im: (i64, i64)) -> Self {
        GaussQ::new(Rational::new(re.0, re.1), Rational::new(im.0, im.1))
    }

    fn from_f64_parts(re: f64, im: f64) -> Self {
        GaussQ::new(
            Rational::from_f64(re).expect("finite real part"),
            Rational::from_f64(im).expect("finite imaginary part"),
        )
    }

    fn add(&self, o: &Self) -> Self {
        GaussQ::new(&self.re + &o.re, &self.im + &o.im)
    }

    fn sub(&self, o: &Self) -> Self {
        GaussQ::new(&self.re - &o.re, &self.im - &o.im)
    }

    fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussQ::new(&self.re * &o.re, Rational::zero());
        }
        GaussQ::new(
            &(&self.re * &o.re) - &(&self.im * &o.im),
            &(&self.re * &o.im) + &(&self.im * &o.re),
        )
    }

    fn neg(&self) -> Self {
        GaussQ::new(-self.re.clone(), -self.im.clone())
    }

    fn conj(&self) -> Self {
        GaussQ::new(self.re.clone(), -self.im.clone())
    }

    fn mul_add_assign(acc: &mut Self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let p = Scalar::mul(a, b);
        *acc += &p;
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn modulus(&self) -> f64 {
        match self.modulus_exact() {
            Some(m) => m.to_f64(),
            None => self.abs_sq().to_f64().sqrt(),
        }
    }

    fn modulus_exact(&self) -> Option<Rational> {
        if self.im.is_zero() {
            return Some(self.re.abs());
        }
        if self.re.is_zero() {
            return Some(self.im.abs());
        }
        self.abs_sq().sqrt_exact()
    }

    fn is_nonneg_real(&self) -> bool {
        self.im.is_zero() && self.re.signum() >= 0
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;
    const BACKEND: &'static str = "float";

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn half() -> Self {
        Complex64::new(0.5, 0.0)
    }

    fn from_ratio(re: (i64, i64), im: (i64, i64)) -> Self {
        Complex64::new(re.0 as f64 / re.1 as f64, im.0 as f64 / im.1 as f64)
    }

    fn from_f64_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }

    fn add(&self, o: &Self) -> Self {
        self + o
    }

    fn sub(&self, o: &Self) -> Self {
        self - o
    }

    fn mul(&self, o: &Self) -> Self {
        self * o
    }

    fn neg(&self) -> Self {
        -self
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn mul_add_assign(acc: &mut Self, a: &Self, b: &Self) {
        *acc += a * b;
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn modulus_exact(&self) -> Option<Rational> {
        None
    }

    fn is_nonneg_real(&self) -> bool {
        self.im == 0.0 && self.re >= 0.0
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }
}
