//! Exact arithmetic over `Z/nZ` and over `Z[A^±1, B^±1]`.
//!
//! Both rings share one element type, [`Elem`]. Mixing elements of different
//! rings is an [`AlgebraError::RingMismatch`] in the `checked_*` methods and a
//! panic in the operator impls.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("{0} is not a unit")]
    NotAUnit(Elem),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
}

/// Which coefficient ring an element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Mod(u64),
    /// Laurent polynomials in the variables `A` and `B`.
    Laurent,
}

impl Ring {
    pub fn modular(n: u64) -> Result<Ring, AlgebraError> {
        if n < 2 {
            return Err(AlgebraError::BadModulus(n));
        }
        Ok(Ring::Mod(n))
    }

    pub fn zero(self) -> Elem {
        self.int(0)
    }

    pub fn one(self) -> Elem {
        self.int(1)
    }

    pub fn int(self, k: i64) -> Elem {
        match self {
            Ring::Mod(n) => Elem::Mod {
                modulus: n,
                residue: k.rem_euclid(n as i64) as u64,
            },
            Ring::Laurent => Elem::Laurent(Laurent::constant(k)),
        }
    }

    /// All elements of a finite ring in residue order. `None` for the Laurent ring.
    pub fn elements(self) -> Option<Vec<Elem>> {
        match self {
            Ring::Mod(n) => Some((0..n).map(|r| self.int(r as i64)).collect()),
            Ring::Laurent => None,
        }
    }

    /// Units of a finite ring in residue order.
    pub fn units(self) -> Option<Vec<Elem>> {
        self.elements()
            .map(|all| all.into_iter().filter(Elem::is_unit).collect())
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Mod(n) => write!(f, "mod {n}"),
            Ring::Laurent => f.write_str("laurent"),
        }
    }
}

/// A sparse Laurent polynomial: `(i, j) -> c` stands for `c * A^i * B^j`.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Laurent {
    terms: BTreeMap<(i32, i32), i64>,
}

impl Laurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: i64, i: i32, j: i32) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert((i, j), c);
        }
        Self { terms }
    }

    pub fn a() -> Self {
        Self::monomial(1, 1, 0)
    }

    pub fn b() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i32, i32), i64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    fn add_term(&mut self, key: (i32, i32), c: i64) {
        let entry = self.terms.entry(key).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, &c) in &other.terms {
            out.add_term(k, c);
        }
        out
    }

    fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&k, &c)| (k, -c)).collect(),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &other.terms {
                out.add_term((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }

    /// The single term of a `±` monomial, if this is one.
    fn as_unit(&self) -> Option<((i32, i32), i64)> {
        match self.terms.iter().next() {
            Some((&k, &c)) if self.terms.len() == 1 && c.abs() == 1 => Some((k, c)),
            _ => None,
        }
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (&(i, j), &c)) in self.terms.iter().rev().enumerate() {
            match (n, c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors = Vec::new();
            if c.abs() != 1 || (i == 0 && j == 0) {
                factors.push(c.abs().to_string());
            }
            for (name, e) in [("A", i), ("B", j)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse Laurent polynomial {text:?}: {reason}")]
pub struct LaurentParseError {
    pub text: String,
    pub reason: String,
}

impl FromStr for Laurent {
    type Err = LaurentParseError;

    /// Accepts sums of terms such as `-A^-1*B + 3*A^2 - 1`. Whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| LaurentParseError {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(fail("empty expression"));
        }
        let mut pieces = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for (k, &ch) in bytes.iter().enumerate() {
            if (ch == b'+' || ch == b'-') && k > start && bytes[k - 1] != b'^' {
                pieces.push(&compact[start..k]);
                start = k;
            }
        }
        pieces.push(&compact[start..]);

        let mut out = Laurent::zero();
        for piece in pieces {
            let (sign, body) = match piece.as_bytes().first() {
                Some(b'-') => (-1, &piece[1..]),
                Some(b'+') => (1, &piece[1..]),
                _ => (1, piece),
            };
            if body.is_empty() {
                return Err(fail("dangling sign"));
            }
            let (mut coeff, mut i, mut j) = (sign, 0i32, 0i32);
            for factor in body.split('*') {
                let (base, exp) = match factor.split_once('^') {
                    Some((b, e)) => (b, e.parse::<i32>().map_err(|_| fail("bad exponent"))?),
                    None => (factor, 1),
                };
                match base {
                    "A" => i += exp,
                    "B" => j += exp,
                    num => {
                        let v: i64 = num.parse().map_err(|_| fail("unknown factor"))?;
                        if exp < 0 {
                            return Err(fail("negative power of an integer"));
                        }
                        coeff *= v.pow(exp as u32);
                    }
                }
            }
            out.add_term((i, j), coeff);
        }
        Ok(out)
    }
}

/// An element of `Z/nZ` or of the Laurent ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Mod { modulus: u64, residue: u64 },
    Laurent(Laurent),
}

impl Elem {
    pub fn ring(&self) -> Ring {
        match self {
            Elem::Mod { modulus, .. } => Ring::Mod(*modulus),
            Elem::Laurent(_) => Ring::Laurent,
        }
    }

    /// Residue of a modular element.
    pub fn residue(&self) -> Option<u64> {
        match self {
            Elem::Mod { residue, .. } => Some(*residue),
            Elem::Laurent(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Elem::Mod { residue, .. } => *residue == 0,
            Elem::Laurent(p) => p.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.ring().one()
    }

    pub fn is_unit(&self) -> bool {
        match self {
            Elem::Mod { modulus, residue } => residue.gcd(modulus) == 1,
            Elem::Laurent(p) => p.as_unit().is_some(),
        }
    }

    fn same_ring(&self, other: &Elem) -> Result<(), AlgebraError> {
        if self.ring() == other.ring() {
            Ok(())
        } else {
            Err(AlgebraError::RingMismatch(self.ring(), other.ring()))
        }
    }

    pub fn checked_add(&self, other: &Elem) -> Result<Elem, AlgebraError> {
        self.same_ring(other)?;
        Ok(match (self, other) {
            (Elem::Mod { modulus, residue: a }, Elem::Mod { residue: b, .. }) => Elem::Mod {
                modulus: *modulus,
                residue: ((*a as u128 + *b as u128) % *modulus as u128) as u64,
            },
            (Elem::Laurent(a), Elem::Laurent(b)) => Elem::Laurent(a.add(b)),
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, other: &Elem) -> Result<Elem, AlgebraError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Elem) -> Result<Elem, AlgebraError> {
        self.same_ring(other)?;
        Ok(match (self, other) {
            (Elem::Mod { modulus, residue: a }, Elem::Mod { residue: b, .. }) => Elem::Mod {
                modulus: *modulus,
                residue: ((*a as u128 * *b as u128) % *modulus as u128) as u64,
            },
            (Elem::Laurent(a), Elem::Laurent(b)) => Elem::Laurent(a.mul(b)),
            _ => unreachable!(),
        })
    }

    /// Nonnegative integer power.
    pub fn pow(&self, k: u32) -> Elem {
        let mut result = self.ring().one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        result
    }

    pub fn inverse(&self) -> Result<Elem, AlgebraError> {
        match self {
            Elem::Mod { modulus, residue } => {
                let eg = (*residue as i128).extended_gcd(&(*modulus as i128));
                if eg.gcd != 1 {
                    return Err(AlgebraError::NotAUnit(self.clone()));
                }
                Ok(Elem::Mod {
                    modulus: *modulus,
                    residue: eg.x.rem_euclid(*modulus as i128) as u64,
                })
            }
            Elem::Laurent(p) => match p.as_unit() {
                Some(((i, j), c)) => Ok(Elem::Laurent(Laurent::monomial(c, -i, -j))),
                None => Err(AlgebraError::NotAUnit(self.clone())),
            },
        }
    }

    /// Integer power; negative exponents require a unit.
    pub fn powi(&self, k: i64) -> Result<Elem, AlgebraError> {
        let magnitude = u32::try_from(k.unsigned_abs()).expect("exponent out of range");
        if k >= 0 {
            Ok(self.pow(magnitude))
        } else {
            Ok(self.inverse()?.pow(magnitude))
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Mod { residue, .. } => write!(f, "{residue}"),
            Elem::Laurent(p) => write!(f, "{p}"),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Elem> for &Elem {
            type Output = Elem;
            fn $method(self, rhs: &Elem) -> Elem {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<Elem> for Elem {
            type Output = Elem;
            fn $method(self, rhs: Elem) -> Elem {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Elem> for Elem {
            type Output = Elem;
            fn $method(self, rhs: &Elem) -> Elem {
                (&self).$method(rhs)
            }
        }
        impl $tr<Elem> for &Elem {
            type Output = Elem;
            fn $method(self, rhs: Elem) -> Elem {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        match self {
            Elem::Mod { modulus, residue } => Elem::Mod {
                modulus: *modulus,
                residue: (*modulus - *residue) % *modulus,
            },
            Elem::Laurent(p) => Elem::Laurent(p.neg()),
        }
    }
}

impl Neg for Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        -&self
    }
}

/// Sum of an iterator of elements of `ring`.
pub fn sum<'a>(ring: Ring, items: impl IntoIterator<Item = &'a Elem>) -> Elem {
    items.into_iter().fold(ring.zero(), |acc, e| acc + e)
}

/// Product of an iterator of elements of `ring`.
pub fn product<'a>(ring: Ring, items: impl IntoIterator<Item = &'a Elem>) -> Elem {
    items.into_iter().fold(ring.one(), |acc, e| acc * e)
}
