//! Wigner 3j symbols by the Racah single-sum formula in exact big-integer
//! arithmetic. The value is returned as sign × √(p/q) with p/q an exact
//! non-negative rational, so repeated products in the angular coefficient
//! sums never accumulate rounding from the symbols themselves.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::SpecFunError;

/// Half-integer stored as its doubled value, so 3/2 is `HalfInt(3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub fn from_doubled(two_x: i32) -> Self {
        HalfInt(two_x)
    }

    pub fn from_int(x: i32) -> Self {
        HalfInt(2 * x)
    }

    pub fn doubled(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl From<i32> for HalfInt {
    fn from(x: i32) -> Self {
        HalfInt::from_int(x)
    }
}

/// Arguments of a 3j symbol. Triangle-rule or m-sum violations are valid
/// zero-valued inputs, not errors.
#[derive(Debug, Clone, Copy)]
pub struct Wigner3jArgs {
    pub j1: HalfInt,
    pub j2: HalfInt,
    pub j3: HalfInt,
    pub m1: HalfInt,
    pub m2: HalfInt,
    pub m3: HalfInt,
}

impl Wigner3jArgs {
    pub fn from_ints(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> Self {
        Wigner3jArgs {
            j1: HalfInt::from_int(j1),
            j2: HalfInt::from_int(j2),
            j3: HalfInt::from_int(j3),
            m1: HalfInt::from_int(m1),
            m2: HalfInt::from_int(m2),
            m3: HalfInt::from_int(m3),
        }
    }
}

/// Exact value of the form sign × √(radicand).
#[derive(Debug, Clone)]
pub struct SignedSqrtRational {
    sign: i8,
    radicand: BigRational,
}

impl SignedSqrtRational {
    fn zero() -> Self {
        SignedSqrtRational {
            sign: 0,
            radicand: BigRational::zero(),
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Numerator and denominator of the exact radicand p/q.
    pub fn radicand(&self) -> &BigRational {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let r = self.radicand.to_f64().unwrap_or(f64::NAN);
        self.sign as f64 * r.sqrt()
    }
}

fn factorial(n: i32) -> BigInt {
    debug_assert!(n >= 0);
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Wigner 3j symbol, exact.
///
/// Errors only on inconsistent integrality (m half-integer where j is an
/// integer, or j's that do not couple); every other degenerate input is a
/// structural zero.
pub fn wigner3j(args: &Wigner3jArgs) -> Result<SignedSqrtRational, SpecFunError> {
    let (tj1, tj2, tj3) = (args.j1.doubled(), args.j2.doubled(), args.j3.doubled());
    let (tm1, tm2, tm3) = (args.m1.doubled(), args.m2.doubled(), args.m3.doubled());

    for (tj, tm) in [(tj1, tm1), (tj2, tm2), (tj3, tm3)] {
        if tj < 0 {
            return Err(SpecFunError::NegativeJ(tj));
        }
        if (tj - tm).rem_euclid(2) != 0 {
            return Err(SpecFunError::MismatchedIntegrality {
                j: tj as f64 / 2.0,
                m: tm as f64 / 2.0,
                two_j: tj,
                two_m: tm,
            });
        }
    }
    if (tj1 + tj2 + tj3) % 2 != 0 {
        return Err(SpecFunError::NonIntegerCoupling(tj1, tj2, tj3));
    }

    // structural zeros
    if tm1 + tm2 + tm3 != 0
        || tm1.abs() > tj1
        || tm2.abs() > tj2
        || tm3.abs() > tj3
        || tj3 > tj1 + tj2
        || tj3 < (tj1 - tj2).abs()
    {
        return Ok(SignedSqrtRational::zero());
    }

    // All of the following are integers once the checks above pass.
    let j1pj2mj3 = (tj1 + tj2 - tj3) / 2;
    let j1mj2pj3 = (tj1 - tj2 + tj3) / 2;
    let mj1pj2pj3 = (-tj1 + tj2 + tj3) / 2;
    let jtot_p1 = (tj1 + tj2 + tj3) / 2 + 1;

    let delta = BigRational::new(
        factorial(j1pj2mj3) * factorial(j1mj2pj3) * factorial(mj1pj2pj3),
        factorial(jtot_p1),
    );

    let j1pm1 = (tj1 + tm1) / 2;
    let j1mm1 = (tj1 - tm1) / 2;
    let j2pm2 = (tj2 + tm2) / 2;
    let j2mm2 = (tj2 - tm2) / 2;
    let j3pm3 = (tj3 + tm3) / 2;
    let j3mm3 = (tj3 - tm3) / 2;

    let prod = factorial(j1pm1)
        * factorial(j1mm1)
        * factorial(j2pm2)
        * factorial(j2mm2)
        * factorial(j3pm3)
        * factorial(j3mm3);

    // Racah sum over t with all six factorial arguments non-negative
    let t_min = 0
        .max((tj2 - tj3 - tm1) / 2) // t - (j3 - j2 + m1) >= 0
        .max((tj1 - tj3 + tm2) / 2); // t - (j3 - j1 - m2) >= 0
    let t_max = j1pj2mj3.min(j1mm1).min(j2pm2);

    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let denom = factorial(t)
            * factorial(t - (tj2 - tj3 - tm1) / 2)
            * factorial(t - (tj1 - tj3 + tm2) / 2)
            * factorial(j1pj2mj3 - t)
            * factorial(j1mm1 - t)
            * factorial(j2pm2 - t);
        let term = BigRational::new(BigInt::one(), denom);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }

    if sum.is_zero() {
        return Ok(SignedSqrtRational::zero());
    }

    // prefactor phase (-1)^(j1 - j2 - m3), an integer power here
    let phase_exp = (tj1 - tj2 - tm3) / 2;
    let mut sign = if phase_exp.rem_euclid(2) == 0 { 1i8 } else { -1 };
    if sum.is_negative() {
        sign = -sign;
    }

    let radicand = &sum * &sum * delta * BigRational::from_integer(prod);
    Ok(SignedSqrtRational { sign, radicand })
}

/// 3j symbol of integer angular momenta as f64; out-of-range magnetic
/// numbers are structural zeros. This is the form the angular coefficient
/// sums consume.
pub fn wigner3j_int(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    if m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    wigner3j(&Wigner3jArgs::from_ints(j1, j2, j3, m1, m2, m3))
        .expect("integer arguments are always consistent")
        .to_f64()
}
