//! Exact scalar arithmetic over the session field.
//!
//! Every number in the engine is either an arbitrary-precision rational or a
//! residue modulo a prime.  There is no floating point anywhere: all linear
//! algebra downstream is exact, so a zero is a zero and a rank is a rank.
//!
//! The field is fixed once per diagram session.  Mixing scalars from
//! different fields is a programming error and panics; the document layer
//! rejects mixed-field input before any arithmetic happens.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Default prime modulus: large enough that desk-scale tests do not trip over
/// accidental characteristic collisions, small enough that products fit u128.
pub const DEFAULT_PRIME: u64 = 32003;

/// The ground field of a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    /// The rationals.
    Rational,
    /// The prime field F_p.
    Prime(u64),
}

impl Field {
    pub fn default_prime() -> Field {
        Field::Prime(DEFAULT_PRIME)
    }

    /// Parse a field spec: `q` or `fp:P`.
    pub fn parse(text: &str) -> Result<Field, String> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(Field::Rational);
        }
        if let Some(p) = t.strip_prefix("fp:").or_else(|| t.strip_prefix("Fp:")) {
            let p: u64 = p
                .parse()
                .map_err(|_| format!("invalid prime in field spec `{t}`"))?;
            if p < 2 || !is_prime(p) {
                return Err(format!("{p} is not a prime"));
            }
            return Ok(Field::Prime(p));
        }
        Err(format!("unknown field spec `{t}` (expected `q` or `fp:P`)"))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
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

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Repr {
    Q(BigRational),
    Fp(u64),
}

/// An exact field element tagged with its field.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar {
    field: Field,
    repr: Repr,
}

impl Scalar {
    pub fn zero(field: Field) -> Scalar {
        match field {
            Field::Rational => Scalar {
                field,
                repr: Repr::Q(BigRational::zero()),
            },
            Field::Prime(_) => Scalar {
                field,
                repr: Repr::Fp(0),
            },
        }
    }

    pub fn one(field: Field) -> Scalar {
        match field {
            Field::Rational => Scalar {
                field,
                repr: Repr::Q(BigRational::one()),
            },
            Field::Prime(_) => Scalar {
                field,
                repr: Repr::Fp(1),
            },
        }
    }

    /// Image of the integer `n` in the field.
    pub fn from_int(field: Field, n: i64) -> Scalar {
        match field {
            Field::Rational => Scalar {
                field,
                repr: Repr::Q(BigRational::from_integer(BigInt::from(n))),
            },
            Field::Prime(p) => {
                let m = n.rem_euclid(p as i64) as u64;
                Scalar {
                    field,
                    repr: Repr::Fp(m % p),
                }
            }
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Q(q) => q.is_zero(),
            Repr::Fp(v) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Q(q) => q.is_one(),
            Repr::Fp(v) => *v == 1,
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match (&self.repr, self.field) {
            (Repr::Q(q), _) => Scalar {
                field: self.field,
                repr: Repr::Q(q.recip()),
            },
            (Repr::Fp(v), Field::Prime(p)) => Scalar {
                field: self.field,
                repr: Repr::Fp(mod_inv(*v, p)),
            },
            _ => unreachable!("repr/field mismatch"),
        })
    }

    fn check(&self, other: &Scalar) {
        assert_eq!(
            self.field, other.field,
            "scalar field mismatch: {} vs {}",
            self.field, other.field
        );
    }

    /// Parse `3/7`, `-2`, `5 mod 32003`, or `5` in the given field.
    pub fn parse(text: &str, field: Field) -> Result<Scalar, String> {
        let t = text.trim();
        let t = match t.split_once("mod") {
            Some((lhs, rhs)) => {
                let p: u64 = rhs
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad modulus in `{text}`"))?;
                if field != Field::Prime(p) {
                    return Err(format!(
                        "scalar `{text}` names modulus {p} but the session field is {field}"
                    ));
                }
                lhs.trim()
            }
            None => t,
        };
        match field {
            Field::Rational => {
                let q: BigRational = if let Some((n, d)) = t.split_once('/') {
                    let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in `{text}`"))?;
                    let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in `{text}`"))?;
                    if d.is_zero() {
                        return Err(format!("zero denominator in `{text}`"));
                    }
                    BigRational::new(n, d)
                } else {
                    let n: BigInt = t.parse().map_err(|_| format!("bad rational `{text}`"))?;
                    BigRational::from_integer(n)
                };
                Ok(Scalar {
                    field,
                    repr: Repr::Q(q),
                })
            }
            Field::Prime(p) => {
                if t.contains('/') {
                    let (n, d) = t.split_once('/').unwrap();
                    let n = Scalar::parse(n, field)?;
                    let d = Scalar::parse(d, field)?;
                    return d
                        .inv()
                        .map(|di| n * di)
                        .ok_or_else(|| format!("division by zero in `{text}`"));
                }
                let n: i128 = t.parse().map_err(|_| format!("bad residue `{text}`"))?;
                let m = n.rem_euclid(p as i128) as u64;
                Ok(Scalar {
                    field,
                    repr: Repr::Fp(m),
                })
            }
        }
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // extended Euclid on i128
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "not invertible mod p");
    t.rem_euclid(p as i128) as u64
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl<'a> Add<&'a Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (&self.repr, &rhs.repr, self.field) {
            (Repr::Q(a), Repr::Q(b), _) => Scalar {
                field: self.field,
                repr: Repr::Q(a + b),
            },
            (Repr::Fp(a), Repr::Fp(b), Field::Prime(p)) => Scalar {
                field: self.field,
                repr: Repr::Fp((a + b) % p),
            },
            _ => unreachable!(),
        }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl<'a> Sub<&'a Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (&self.repr, &rhs.repr, self.field) {
            (Repr::Q(a), Repr::Q(b), _) => Scalar {
                field: self.field,
                repr: Repr::Q(a - b),
            },
            (Repr::Fp(a), Repr::Fp(b), Field::Prime(p)) => Scalar {
                field: self.field,
                repr: Repr::Fp((a + p - b) % p),
            },
            _ => unreachable!(),
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl<'a> Mul<&'a Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (&self.repr, &rhs.repr, self.field) {
            (Repr::Q(a), Repr::Q(b), _) => Scalar {
                field: self.field,
                repr: Repr::Q(a * b),
            },
            (Repr::Fp(a), Repr::Fp(b), Field::Prime(p)) => Scalar {
                field: self.field,
                repr: Repr::Fp(((*a as u128 * *b as u128) % p as u128) as u64),
            },
            _ => unreachable!(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match (&self.repr, self.field) {
            (Repr::Q(a), _) => Scalar {
                field: self.field,
                repr: Repr::Q(-a),
            },
            (Repr::Fp(a), Field::Prime(p)) => Scalar {
                field: self.field,
                repr: Repr::Fp(if *a == 0 { 0 } else { p - a }),
            },
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Q(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else if q.is_negative() && false {
                    unreachable!()
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Repr::Fp(v) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_hold_on_samples() {
        for field in [Field::Rational, Field::Prime(7), Field::default_prime()] {
            let vals: Vec<Scalar> = (-4..5).map(|n| Scalar::from_int(field, n)).collect();
            for a in &vals {
                for b in &vals {
                    assert_eq!(a + b, b + a);
                    for c in &vals {
                        assert_eq!(&(a + b) + c, a + &(b + c));
                        assert_eq!(&(a * b) * c, a * &(b * c));
                        assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                    }
                }
                assert_eq!(a + &Scalar::zero(field), a.clone());
                assert_eq!(a * &Scalar::one(field), a.clone());
                assert!((a + &-a).is_zero());
                if !a.is_zero() {
                    assert!((a * &a.inv().unwrap()).is_one());
                }
            }
        }
    }

    #[test]
    fn parse_forms() {
        let q = Field::Rational;
        assert_eq!(
            Scalar::parse("3/7", q).unwrap(),
            Scalar::parse("6/14", q).unwrap()
        );
        assert_eq!(Scalar::parse("-2", q).unwrap(), -Scalar::from_int(q, 2));
        let p = Field::Prime(32003);
        assert_eq!(
            Scalar::parse("5 mod 32003", p).unwrap(),
            Scalar::from_int(p, 5)
        );
        assert_eq!(Scalar::parse("-1", p).unwrap(), Scalar::from_int(p, 32002));
        assert!(Scalar::parse("5 mod 7", p).is_err());
    }

    #[test]
    #[should_panic]
    fn mixing_fields_panics() {
        let a = Scalar::one(Field::Rational);
        let b = Scalar::one(Field::Prime(7));
        let _ = a + b;
    }

    #[test]
    fn fp_inverse_via_euclid() {
        let p = 32003;
        for v in [1u64, 2, 5, 100, 32002] {
            assert_eq!((v as u128 * mod_inv(v, p) as u128) % p as u128, 1);
        }
    }
}
