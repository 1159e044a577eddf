//! Scalars: exact Gaussian rationals and double-precision complex numbers.
//!
//! Both kinds implement [`Scalar`]. Generic code is written once against the
//! trait; the two modes never meet inside a single matrix. Where the mode is
//! only known at runtime (input files) use [`DynScalar`], whose arithmetic
//! rejects mixed operands.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::{DynMatrix, Matrix};

/// Default approximate-equality threshold.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Field operations shared by both arithmetic modes.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    /// True for error-free arithmetic.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    /// `p / q` with `q != 0`.
    fn from_ratio(p: i64, q: i64) -> Self;
    /// The imaginary unit.
    fn imag_unit() -> Self;
    /// Recovers an exact value from a floating estimate of a real number.
    /// Approximate mode returns the estimate itself; exact mode runs a
    /// bounded-denominator rational reconstruction and may give up.
    fn from_real_estimate(x: f64) -> Option<Self>;

    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn inv(&self) -> Option<Self>;

    /// `self += a * b`
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self = self.add(&a.mul(b));
    }

    /// Exact zero test. Approximate values compare against `0.0` exactly.
    fn is_exact_zero(&self) -> bool;

    /// Zero test used by comparisons: exact in exact mode, `|x| <= tol` otherwise.
    fn is_zero_tol(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_exact_zero()
        } else {
            self.magnitude() <= tol
        }
    }

    fn magnitude(&self) -> f64;
    fn to_c64(&self) -> Complex64;
    fn to_dyn(&self) -> DynScalar;
    fn wrap_matrix(m: Matrix<Self>) -> DynMatrix;

    /// Real and strictly positive (imaginary part within `tol` of zero).
    fn is_positive_real(&self, tol: f64) -> bool;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }
}

/// A Gaussian rational `re + im·i` with arbitrary-precision parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRational { re, im: BigRational::zero() }
    }

    pub fn i() -> Self {
        GaussRational { re: BigRational::zero(), im: BigRational::one() }
    }

    fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation with denominator at most `max_den` (continued fractions).
fn rational_reconstruct(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut frac = x;
    for _ in 0..64 {
        let a = frac.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let rem = frac - a;
        if rem.abs() < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    if k1 == 0 {
        return None;
    }
    let approx = h1 as f64 / k1 as f64;
    if (approx - x).abs() > 1e-7 * x.abs().max(1.0) {
        return None;
    }
    Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)))
}

impl Scalar for GaussRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        GaussRational { re: BigRational::zero(), im: BigRational::zero() }
    }
    fn one() -> Self {
        GaussRational { re: BigRational::one(), im: BigRational::zero() }
    }
    fn from_i64(n: i64) -> Self {
        GaussRational::real(BigRational::from_integer(BigInt::from(n)))
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        GaussRational::real(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }
    fn imag_unit() -> Self {
        GaussRational::i()
    }
    fn from_real_estimate(x: f64) -> Option<Self> {
        rational_reconstruct(x, 1_000_000).map(GaussRational::real)
    }

    fn add(&self, o: &Self) -> Self {
        GaussRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn sub(&self, o: &Self) -> Self {
        GaussRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn mul(&self, o: &Self) -> Self {
        match (self.is_real(), o.is_real()) {
            (true, true) => GaussRational::real(&self.re * &o.re),
            (true, false) => GaussRational { re: &self.re * &o.re, im: &self.re * &o.im },
            (false, true) => GaussRational { re: &self.re * &o.re, im: &self.im * &o.re },
            (false, false) => GaussRational {
                re: &self.re * &o.re - &self.im * &o.im,
                im: &self.re * &o.im + &self.im * &o.re,
            },
        }
    }
    fn neg(&self) -> Self {
        GaussRational { re: -&self.re, im: -&self.im }
    }
    fn conj(&self) -> Self {
        GaussRational { re: self.re.clone(), im: -&self.im }
    }
    fn inv(&self) -> Option<Self> {
        if self.is_exact_zero() {
            return None;
        }
        if self.is_real() {
            return Some(GaussRational::real(self.re.recip()));
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRational { re: &self.re / &norm, im: -&self.im / &norm })
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.is_exact_zero() || b.is_exact_zero() {
            return;
        }
        let p = a.mul(b);
        self.re += p.re;
        if !p.im.is_zero() {
            self.im += p.im;
        }
    }
    fn is_exact_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }
    fn to_dyn(&self) -> DynScalar {
        DynScalar::Exact(self.clone())
    }
    fn wrap_matrix(m: Matrix<Self>) -> DynMatrix {
        DynMatrix::Exact(m)
    }
    fn is_positive_real(&self, _tol: f64) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRational {
    /// Canonical `p/q+r/si` text form; parts that are zero are omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_ratio(&self.re));
        }
        let im = format!("{}i", fmt_ratio(&self.im.abs()));
        let sign = if self.im.is_negative() { "-" } else { "+" };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{im}")
            } else {
                write!(f, "{im}")
            }
        } else {
            write!(f, "{}{}{}", fmt_ratio(&self.re), sign, im)
        }
    }
}

fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl FromStr for GaussRational {
    type Err = Error;

    /// Accepts `"3"`, `"-1/2"`, `"i"`, `"-2/3i"`, `"1/2-3/4i"`, `"1+i"`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid exact scalar {text:?}"));
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad());
        }
        let Some(body) = s.strip_suffix('i') else {
            return parse_ratio(&s).map(GaussRational::real).ok_or_else(bad);
        };
        // split real and imaginary parts at the last sign that is not leading
        let split = body
            .char_indices()
            .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
            .map(|(k, _)| k)
            .next_back();
        let (re_txt, im_txt) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let re = if re_txt.is_empty() {
            BigRational::zero()
        } else {
            parse_ratio(re_txt).ok_or_else(bad)?
        };
        let im = match im_txt {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            t => parse_ratio(t.strip_prefix('+').unwrap_or(t)).ok_or_else(bad)?,
        };
        Ok(GaussRational { re, im })
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Complex64::new(p as f64 / q as f64, 0.0)
    }
    fn imag_unit() -> Self {
        Complex64::i()
    }
    fn from_real_estimate(x: f64) -> Option<Self> {
        x.is_finite().then(|| Complex64::new(x, 0.0))
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
    fn inv(&self) -> Option<Self> {
        (self.norm_sqr() > 0.0).then(|| Complex64::inv(self))
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn is_exact_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn to_dyn(&self) -> DynScalar {
        DynScalar::Approx(*self)
    }
    fn wrap_matrix(m: Matrix<Self>) -> DynMatrix {
        DynMatrix::Approx(m)
    }
    fn is_positive_real(&self, tol: f64) -> bool {
        self.im.abs() <= tol && self.re > 0.0
    }
}

/// Arithmetic mode of a value known only at runtime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Approx,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Approx => "approx",
        })
    }
}

/// Runtime-tagged scalar. Operations on mismatched modes fail.
#[derive(Clone, Debug, PartialEq)]
pub enum DynScalar {
    Exact(GaussRational),
    Approx(Complex64),
}

macro_rules! dyn_binop {
    ($name:ident) => {
        pub fn $name(&self, other: &DynScalar) -> Result<DynScalar> {
            match (self, other) {
                (DynScalar::Exact(a), DynScalar::Exact(b)) => Ok(DynScalar::Exact(Scalar::$name(a, b))),
                (DynScalar::Approx(a), DynScalar::Approx(b)) => Ok(DynScalar::Approx(Scalar::$name(a, b))),
                _ => Err(Error::ModeMismatch),
            }
        }
    };
}

impl DynScalar {
    pub fn mode(&self) -> Mode {
        match self {
            DynScalar::Exact(_) => Mode::Exact,
            DynScalar::Approx(_) => Mode::Approx,
        }
    }

    dyn_binop!(add);
    dyn_binop!(sub);
    dyn_binop!(mul);

    /// `|a - b| <= tol` in approximate mode, exact equality otherwise.
    pub fn approx_eq(&self, other: &DynScalar, tol: f64) -> Result<bool> {
        match (self, other) {
            (DynScalar::Exact(a), DynScalar::Exact(b)) => Ok(a == b),
            (DynScalar::Approx(a), DynScalar::Approx(b)) => Ok((a - b).norm() <= tol),
            _ => Err(Error::ModeMismatch),
        }
    }
}
