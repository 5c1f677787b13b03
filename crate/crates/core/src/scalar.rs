//! Exact scalars `a + b√q` with rational `a`, `b`.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element `a + b√q` of `Q(√q)` for a fixed prime power `q`. When `q` is a
/// perfect square the `√q` part is folded into `a`, so equal values compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SqrtQ {
    a: BigRational,
    b: BigRational,
}

fn isqrt_exact(q: u32) -> Option<u32> {
    let r = (q as f64).sqrt().round() as u32;
    (r * r == q).then_some(r)
}

impl SqrtQ {
    pub fn zero() -> Self {
        SqrtQ {
            a: BigRational::zero(),
            b: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        SqrtQ::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        SqrtQ {
            a: BigRational::from_integer(BigInt::from(n)),
            b: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        SqrtQ {
            a: BigRational::new(BigInt::from(num), BigInt::from(den)),
            b: BigRational::zero(),
        }
    }

    /// `a + b√q`, normalized for `q`.
    pub fn new(a: BigRational, b: BigRational, q: u32) -> Self {
        match isqrt_exact(q) {
            Some(r) if !b.is_zero() => SqrtQ {
                a: a + b * BigRational::from_integer(BigInt::from(r)),
                b: BigRational::zero(),
            },
            _ => SqrtQ { a, b },
        }
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// `(q^{1/2})^n` for any integer `n`.
    pub fn q_half_pow(n: i64, q: u32) -> Self {
        let qr = BigRational::from_integer(BigInt::from(q));
        let pow = |k: i64| -> BigRational {
            if k >= 0 {
                num::pow(qr.clone(), k as usize)
            } else {
                num::pow(qr.recip(), (-k) as usize)
            }
        };
        if n.rem_euclid(2) == 0 {
            SqrtQ {
                a: pow(n / 2),
                b: BigRational::zero(),
            }
        } else {
            SqrtQ::new(BigRational::zero(), pow((n - 1).div_euclid(2)), q)
        }
    }

    pub fn add(&self, o: &SqrtQ) -> SqrtQ {
        SqrtQ {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }

    pub fn sub(&self, o: &SqrtQ) -> SqrtQ {
        SqrtQ {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }

    pub fn neg(&self) -> SqrtQ {
        SqrtQ {
            a: -&self.a,
            b: -&self.b,
        }
    }

    pub fn mul(&self, o: &SqrtQ, q: u32) -> SqrtQ {
        let qr = BigRational::from_integer(BigInt::from(q));
        SqrtQ {
            a: &self.a * &o.a + &self.b * &o.b * qr,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    pub fn scale_int(&self, n: i64) -> SqrtQ {
        let k = BigRational::from_integer(BigInt::from(n));
        SqrtQ {
            a: &self.a * &k,
            b: &self.b * &k,
        }
    }

    pub fn scale_ratio(&self, num: &BigInt, den: &BigInt) -> SqrtQ {
        let k = BigRational::new(num.clone(), den.clone());
        SqrtQ {
            a: &self.a * &k,
            b: &self.b * &k,
        }
    }

    /// Inverse via the conjugate `a - b√q`.
    pub fn inv(&self, q: u32) -> Result<SqrtQ> {
        let qr = BigRational::from_integer(BigInt::from(q));
        let norm = &self.a * &self.a - &self.b * &self.b * qr;
        if norm.is_zero() {
            return Err(Error::Singular);
        }
        Ok(SqrtQ {
            a: &self.a / &norm,
            b: -&self.b / &norm,
        })
    }

    /// The exponent `k` with `self = (q^{1/2})^k · other`, searched in `-max_abs..=max_abs`.
    pub fn half_power_ratio(&self, other: &SqrtQ, q: u32, max_abs: i64) -> Option<i64> {
        (-max_abs..=max_abs).find(|&k| other.mul(&SqrtQ::q_half_pow(k, q), q) == *self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"a": self.a.to_string(), "b": self.b.to_string()})
    }

    pub fn from_json(v: &serde_json::Value, q: u32) -> Result<SqrtQ> {
        let raw: CoeffJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let parse = |s: &str| -> Result<BigRational> {
            s.parse::<BigRational>()
                .map_err(|e| Error::Parse(format!("bad rational `{s}`: {e}")))
        };
        Ok(SqrtQ::new(parse(&raw.a)?, parse(&raw.b)?, q))
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    a: String,
    #[serde(default = "zero_string")]
    b: String,
}

fn zero_string() -> String {
    "0".into()
}

impl fmt::Display for SqrtQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}√q", self.b),
            (false, false) => {
                let sign = if self.b.is_negative() { "-" } else { "+" };
                write!(f, "{} {sign} {}√q", self.a, self.b.abs())
            }
        }
    }
}

impl Default for SqrtQ {
    fn default() -> Self {
        SqrtQ::zero()
    }
}
