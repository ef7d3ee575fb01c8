//! Exact field arithmetic over ℚ (arbitrary precision) and prime fields 𝔽_p,
//! plus seeded random sampling.
//!
//! Every scalar is canonical immediately after construction: rationals are in
//! lowest terms with positive denominator, residues are reduced mod p.
//! Equality of scalars is representation equality.

use crate::error::{Error, Result};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use std::fmt;

/// Verification primes, in retry order, for reducing ℚ-computations mod p.
pub const FALLBACK_PRIMES: [u64; 3] = [101, 32003, 65537];

/// Default height bound for random rational sampling.
pub const DEFAULT_HEIGHT: u64 = 10;

/// The coefficient field: ℚ or 𝔽_p with p prime, p < 2^31.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldId {
    Rationals,
    PrimeField(u64),
}

impl FieldId {
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldId::Rationals => 0,
            FieldId::PrimeField(p) => *p,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FieldId::PrimeField(_))
    }

    pub fn parse(s: &str) -> Result<FieldId> {
        if s == "Q" {
            return Ok(FieldId::Rationals);
        }
        if let Some(ps) = s.strip_prefix("F:") {
            let p: u64 = ps
                .parse()
                .map_err(|_| Error::Msg(format!("bad field spec {s:?}")))?;
            if !is_prime(p) || p >= (1 << 31) {
                return Err(Error::Msg(format!("modulus {p} must be prime and < 2^31")));
            }
            return Ok(FieldId::PrimeField(p));
        }
        Err(Error::Msg(format!("bad field spec {s:?}, expected \"Q\" or \"F:p\"")))
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldId::Rationals => write!(f, "Q"),
            FieldId::PrimeField(p) => write!(f, "F:{p}"),
        }
    }
}

/// An exact field element of ℚ or 𝔽_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod { p: u64, r: u64 },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_inv(a: u64, p: u64) -> Option<u64> {
    // extended Euclid on (a, p)
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(p as i128) as u64)
}

impl Scalar {
    pub fn field(&self) -> FieldId {
        match self {
            Scalar::Rat(_) => FieldId::Rationals,
            Scalar::Mod { p, .. } => FieldId::PrimeField(*p),
        }
    }

    pub fn zero(field: FieldId) -> Scalar {
        match field {
            FieldId::Rationals => Scalar::Rat(BigRational::zero()),
            FieldId::PrimeField(p) => Scalar::Mod { p, r: 0 },
        }
    }

    pub fn one(field: FieldId) -> Scalar {
        match field {
            FieldId::Rationals => Scalar::Rat(BigRational::one()),
            FieldId::PrimeField(p) => Scalar::Mod { p, r: 1 },
        }
    }

    pub fn from_int(field: FieldId, n: i64) -> Scalar {
        match field {
            FieldId::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            FieldId::PrimeField(p) => Scalar::Mod {
                p,
                r: (n as i128).rem_euclid(p as i128) as u64,
            },
        }
    }

    /// Canonical scalar num/den in the given field.
    pub fn make(field: FieldId, num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        match field {
            FieldId::Rationals => Ok(Scalar::Rat(BigRational::new(
                BigInt::from(num),
                BigInt::from(den),
            ))),
            FieldId::PrimeField(p) => {
                let d = (den as i128).rem_euclid(p as i128) as u64;
                let inv = mod_inv(d, p).ok_or(Error::NonInvertibleDenominator(p))?;
                let n = (num as i128).rem_euclid(p as i128) as u64;
                Ok(Scalar::Mod { p, r: n * inv % p })
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(q) => q.is_zero(),
            Scalar::Mod { r, .. } => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(q) => q.is_one(),
            Scalar::Mod { r, .. } => *r == 1,
        }
    }

    fn check(&self, other: &Scalar) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(
                self.field().to_string(),
                other.field().to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.check(other).expect("scalar field mismatch");
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Mod { p, r: a }, Scalar::Mod { r: b, .. }) => {
                Scalar::Mod { p: *p, r: (a + b) % p }
            }
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Mod { p, r } => Scalar::Mod { p: *p, r: (p - r) % p },
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.check(other).expect("scalar field mismatch");
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Mod { p, r: a }, Scalar::Mod { r: b, .. }) => {
                Scalar::Mod { p: *p, r: a * b % p }
            }
            _ => unreachable!(),
        }
    }

    pub fn invert(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            Scalar::Rat(a) => Ok(Scalar::Rat(a.recip())),
            Scalar::Mod { p, r } => Ok(Scalar::Mod {
                p: *p,
                r: mod_inv(*r, *p).ok_or(Error::DivisionByZero)?,
            }),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&other.invert()?))
    }

    /// Reduce a rational mod p. Fails on a p-divisible denominator.
    pub fn reduce_mod(&self, p: u64) -> Result<Scalar> {
        match self {
            Scalar::Mod { .. } => Ok(self.clone()),
            Scalar::Rat(q) => {
                let pb = BigInt::from(p);
                let den = q.denom() % &pb;
                if den.is_zero() {
                    return Err(Error::NonInvertibleDenominator(p));
                }
                let d = bigint_mod(&den, p);
                let n = bigint_mod(q.numer(), p);
                let inv = mod_inv(d, p).ok_or(Error::NonInvertibleDenominator(p))?;
                Ok(Scalar::Mod { p, r: n * inv % p })
            }
        }
    }

    /// Decimal-string serialization: "a/b" over ℚ (plain "a" when b = 1),
    /// "r mod p" over 𝔽_p.
    pub fn to_string_exact(&self) -> String {
        match self {
            Scalar::Rat(q) => {
                if q.denom().is_one() {
                    q.numer().to_string()
                } else {
                    format!("{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Mod { p, r } => format!("{r} mod {p}"),
        }
    }

    pub fn parse(field: FieldId, s: &str) -> Result<Scalar> {
        let s = s.trim();
        match field {
            FieldId::Rationals => {
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let num: BigInt = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::Msg(format!("bad rational {s:?}")))?;
                let den: BigInt = d
                    .trim()
                    .parse()
                    .map_err(|_| Error::Msg(format!("bad rational {s:?}")))?;
                if den.is_zero() {
                    return Err(Error::ZeroDenominator);
                }
                Ok(Scalar::Rat(BigRational::new(num, den)))
            }
            FieldId::PrimeField(p) => {
                let body = s.split(" mod ").next().unwrap_or(s).trim();
                let r: i64 = body
                    .parse()
                    .map_err(|_| Error::Msg(format!("bad residue {s:?}")))?;
                Ok(Scalar::from_int(FieldId::PrimeField(p), r))
            }
        }
    }
}

fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    let r = x % BigInt::from(p);
    let r = if r.sign() == Sign::Minus { r + BigInt::from(p) } else { r };
    let (_, digits) = r.to_u64_digits();
    digits.first().copied().unwrap_or(0)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_exact())
    }
}

/// Seeded, reproducible RNG. All randomness in the workbench flows through
/// explicit `Rng` handles derived from one root seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive a child stream for parallel jobs; deterministic in (seed, stream).
pub fn split_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(stream))
}

/// Uniform sample: over ℚ, numerator in [-height, height], denominator in
/// [1, height]; over 𝔽_p, a uniform residue.
pub fn sample_scalar<R: Rng>(field: FieldId, height_bound: u64, rng: &mut R) -> Scalar {
    assert!(height_bound >= 1);
    match field {
        FieldId::Rationals => {
            let h = height_bound as i64;
            let num = rng.gen_range(-h..=h);
            let den = rng.gen_range(1..=h);
            Scalar::make(field, num, den).unwrap()
        }
        FieldId::PrimeField(p) => Scalar::Mod { p, r: rng.gen_range(0..p) },
    }
}

/// Integer-valued sample (denominator 1 over ℚ); used where denominator
/// growth matters more than uniformity.
pub fn sample_int_scalar<R: Rng>(field: FieldId, height_bound: u64, rng: &mut R) -> Scalar {
    assert!(height_bound >= 1);
    match field {
        FieldId::Rationals => {
            let h = height_bound as i64;
            Scalar::from_int(field, rng.gen_range(-h..=h))
        }
        FieldId::PrimeField(p) => Scalar::Mod { p, r: rng.gen_range(0..p) },
    }
}
