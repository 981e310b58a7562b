//! Fixed-point multiprecision arithmetic for series whose tails fall far
//! below double-precision rounding noise.
//!
//! A [`Fixed`] is an integer mantissa scaled by `2^-bits`. Only the handful
//! of operations needed by the series routines are provided.

use num_bigint::BigInt;
use num_traits::{Float, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::C64;

pub const DEFAULT_BITS: u32 = 512;
const MIN_BITS: u32 = 64;
const MAX_BITS: u32 = 2000;

pub fn check_bits(bits: u32) -> Result<()> {
    if !(MIN_BITS..=MAX_BITS).contains(&bits) {
        return Err(Error::InvalidParameter(format!(
            "precision {bits} bits outside [{MIN_BITS}, {MAX_BITS}]"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed {
    v: BigInt,
    bits: u32,
}

impl Fixed {
    pub fn zero(bits: u32) -> Self {
        Self {
            v: BigInt::zero(),
            bits,
        }
    }

    pub fn one(bits: u32) -> Self {
        Self {
            v: BigInt::from(1) << bits,
            bits,
        }
    }

    /// Exact conversion, truncating bits below the resolution.
    pub fn from_f64(x: f64, bits: u32) -> Self {
        let (mantissa, exp, sign) = x.integer_decode();
        let m = BigInt::from(mantissa) * BigInt::from(sign);
        let shift = exp as i64 + bits as i64;
        let v = if shift >= 0 {
            m << shift as usize
        } else {
            m >> (-shift) as usize
        };
        Self { v, bits }
    }

    pub fn to_f64(&self) -> f64 {
        // Two half-steps keep the scale factor out of the subnormal range.
        let half = -((self.bits / 2) as i32);
        let rest = -((self.bits - self.bits / 2) as i32);
        self.v.to_f64().unwrap_or(f64::NAN) * 2f64.powi(half) * 2f64.powi(rest)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            v: &self.v + &o.v,
            bits: self.bits,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            v: &self.v - &o.v,
            bits: self.bits,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            v: -&self.v,
            bits: self.bits,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.v.is_zero() || o.v.is_zero() {
            return Self::zero(self.bits);
        }
        Self {
            v: (&self.v * &o.v) >> self.bits as usize,
            bits: self.bits,
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.v.is_zero() {
            return Err(Error::Degenerate(
                "division by zero in fixed-point arithmetic".into(),
            ));
        }
        Ok(Self {
            v: (&self.v << self.bits as usize) / &o.v,
            bits: self.bits,
        })
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.v.is_negative() {
            return Err(Error::Degenerate("square root of a negative number".into()));
        }
        Ok(Self {
            v: (&self.v << self.bits as usize).sqrt(),
            bits: self.bits,
        })
    }
}

/// Complex number with [`Fixed`] parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpComplex {
    pub re: Fixed,
    pub im: Fixed,
}

impl HpComplex {
    pub fn zero(bits: u32) -> Self {
        Self {
            re: Fixed::zero(bits),
            im: Fixed::zero(bits),
        }
    }

    pub fn one(bits: u32) -> Self {
        Self {
            re: Fixed::one(bits),
            im: Fixed::zero(bits),
        }
    }

    pub fn from_c64(z: C64, bits: u32) -> Self {
        Self {
            re: Fixed::from_f64(z.re, bits),
            im: Fixed::from_f64(z.im, bits),
        }
    }

    pub fn from_real(x: Fixed) -> Self {
        let bits = x.bits;
        Self {
            re: x,
            im: Fixed::zero(bits),
        }
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return Self::from_real(self.re.mul(&o.re));
        }
        Self {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, s: &Fixed) -> Self {
        Self {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    pub fn norm_sqr(&self) -> Fixed {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        let d = o.norm_sqr();
        let n = self.mul(&o.conj());
        Ok(Self {
            re: n.re.div(&d)?,
            im: n.im.div(&d)?,
        })
    }
}

pub fn to_hp(v: &[C64], bits: u32) -> Vec<HpComplex> {
    v.iter().map(|&z| HpComplex::from_c64(z, bits)).collect()
}

pub fn to_c64(v: &[HpComplex]) -> Vec<C64> {
    v.iter().map(HpComplex::to_c64).collect()
}

/// Coefficients of the monic reversed polynomial `Φ_n^*` after running the
/// Szegő recursion through every entry of `alphas`.
pub fn monic_phi_star(alphas: &[HpComplex], bits: u32) -> Vec<HpComplex> {
    let mut star = vec![HpComplex::one(bits)];
    for (k, a) in alphas.iter().enumerate() {
        // Φ*_{k+1} = Φ*_k - α_k z Φ_k, with Φ_k[i] = conj(Φ*_k[k - i]).
        let mut next = star.clone();
        next.push(HpComplex::zero(bits));
        if !a.is_zero() {
            for (j, slot) in next.iter_mut().enumerate().skip(1) {
                let src = &star[k + 1 - j];
                if !src.is_zero() {
                    *slot = slot.sub(&a.mul(&src.conj()));
                }
            }
        }
        star = next;
    }
    star
}

/// `κ = Π (1 - |α_j|^2)^{-1/2}`.
pub fn kappa(alphas: &[HpComplex], bits: u32) -> Result<Fixed> {
    let one = Fixed::one(bits);
    let mut rho = Fixed::one(bits);
    for a in alphas {
        rho = rho.mul(&one.sub(&a.norm_sqr()).sqrt()?);
    }
    one.div(&rho)
}

/// First `len` coefficients of `1 / p`.
pub fn series_inverse(p: &[HpComplex], len: usize, bits: u32) -> Result<Vec<HpComplex>> {
    let p0 = p
        .first()
        .filter(|c| !c.is_zero())
        .ok_or_else(|| Error::Degenerate("series has zero constant term".into()))?;
    let inv0 = HpComplex::one(bits).div(p0)?;
    let mut q = Vec::with_capacity(len);
    for n in 0..len {
        if n == 0 {
            q.push(inv0.clone());
            continue;
        }
        let mut acc = HpComplex::zero(bits);
        for k in 1..=n.min(p.len() - 1) {
            if !p[k].is_zero() {
                acc = acc.add(&p[k].mul(&q[n - k]));
            }
        }
        q.push(acc.neg().mul(&inv0));
    }
    Ok(q)
}

/// Laurent coefficients `r_m` for `m` in `-n..=n` (index `m + n`) of
/// `p(z) · conj(q)(1/z)` where `q = 1/p`; on the circle this is `p / conj(p)`.
pub fn unimodular_ratio(p: &[HpComplex], n: usize, bits: u32) -> Result<Vec<HpComplex>> {
    let q = series_inverse(p, p.len() + n, bits)?;
    let qc: Vec<HpComplex> = q.iter().map(HpComplex::conj).collect();
    let mut out = Vec::with_capacity(2 * n + 1);
    for m in -(n as i64)..=(n as i64) {
        let mut acc = HpComplex::zero(bits);
        let j0 = if m < 0 { (-m) as usize } else { 0 };
        for (j, qj) in qc.iter().enumerate().skip(j0) {
            let idx = (m + j as i64) as usize;
            if idx >= p.len() {
                break;
            }
            if !p[idx].is_zero() && !qj.is_zero() {
                acc = acc.add(&p[idx].mul(qj));
            }
        }
        out.push(acc);
    }
    Ok(out)
}
