//! Exact arithmetic in a prime field F_p.
//!
//! Every message symbol, query coefficient and response symbol in this crate
//! lives in one of these fields. Moduli are capped below 2^31 so that all
//! products fit in 64-bit intermediates and no big-integer dependency is
//! needed.

// Element arithmetic returns Result (mixing fields is an error), so the
// std operator traits cannot carry these names.
#![allow(clippy::should_implement_trait)]

use thiserror::Error;

/// Largest admissible modulus (exclusive). Keeps `a * b` within `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is too large (must be below 2^31)")]
    ModulusTooLarge(u64),
    #[error("elements belong to different fields (mod {left} vs mod {right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// A prime field, identified by its modulus.
///
/// `FieldSpec` is a plain value: cheap to copy, compare and share between
/// threads. Two specs describe the same field iff their moduli are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    modulus: u32,
}

impl FieldSpec {
    /// Validates `p` and returns the field F_p.
    ///
    /// Primality is decided by trial division, which is plenty at this
    /// modulus scale.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= MAX_MODULUS {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if p < 2 || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(FieldSpec { modulus: p as u32 })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// The residue of `v` as a typed element of this field.
    pub fn element(&self, v: u64) -> FieldElement {
        FieldElement {
            value: (v % u64::from(self.modulus)) as u32,
            field: *self,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// All `p` elements of the field in ascending residue order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..u64::from(self.modulus)).map(move |v| self.element(v))
    }

    // Raw operations on residues already reduced into [0, p). These back the
    // typed `FieldElement` API and the matrix kernels.

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = u64::from(a) + u64::from(b);
        let p = u64::from(self.modulus);
        (if s >= p { s - p } else { s }) as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            self.modulus - (b - a)
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        self.sub(0, a)
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((u64::from(a) * u64::from(b)) % u64::from(self.modulus)) as u32
    }

    /// Square-and-multiply exponentiation; `pow(0, 0) = 1`.
    pub fn pow(&self, a: u32, mut exp: u64) -> u32 {
        let mut base = a % self.modulus;
        let mut acc = 1 % self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat: a^(p-2).
    pub fn inv(&self, a: u32) -> Result<u32, FieldError> {
        if a.is_multiple_of(self.modulus) {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(a, u64::from(self.modulus) - 2))
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A residue paired with the field it belongs to.
///
/// Mixing elements of different fields is an error, not a silent coercion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    field: FieldSpec,
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(self, rhs: FieldElement) -> Result<FieldSpec, FieldError> {
        if self.field == rhs.field {
            Ok(self.field)
        } else {
            Err(FieldError::FieldMismatch {
                left: self.field.modulus,
                right: rhs.field.modulus,
            })
        }
    }

    pub fn add(self, rhs: FieldElement) -> Result<FieldElement, FieldError> {
        let field = self.same_field(rhs)?;
        Ok(FieldElement {
            value: field.add(self.value, rhs.value),
            field,
        })
    }

    pub fn sub(self, rhs: FieldElement) -> Result<FieldElement, FieldError> {
        let field = self.same_field(rhs)?;
        Ok(FieldElement {
            value: field.sub(self.value, rhs.value),
            field,
        })
    }

    pub fn mul(self, rhs: FieldElement) -> Result<FieldElement, FieldError> {
        let field = self.same_field(rhs)?;
        Ok(FieldElement {
            value: field.mul(self.value, rhs.value),
            field,
        })
    }

    pub fn pow(self, exp: u64) -> FieldElement {
        FieldElement {
            value: self.field.pow(self.value, exp),
            field: self.field,
        }
    }

    pub fn inv(self) -> Result<FieldElement, FieldError> {
        Ok(FieldElement {
            value: self.field.inv(self.value)?,
            field: self.field,
        })
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL_PRIMES: [u64; 26] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
        97, 101,
    ];

    #[test]
    fn accepts_primes_rejects_composites() {
        assert_eq!(FieldSpec::new(2).unwrap().modulus(), 2);
        assert_eq!(FieldSpec::new(5).unwrap().modulus(), 5);
        assert_eq!(FieldSpec::new(4), Err(FieldError::NotPrime(4)));
        assert_eq!(FieldSpec::new(1), Err(FieldError::NotPrime(1)));
        assert_eq!(FieldSpec::new(0), Err(FieldError::NotPrime(0)));
        assert_eq!(
            FieldSpec::new(1 << 31),
            Err(FieldError::ModulusTooLarge(1 << 31))
        );
    }

    #[test]
    fn arithmetic_examples() {
        let f5 = FieldSpec::new(5).unwrap();
        assert_eq!(f5.element(3).mul(f5.element(4)).unwrap(), f5.element(2));

        let f3 = FieldSpec::new(3).unwrap();
        assert_eq!(f3.element(2).pow(2), f3.element(1));

        let f7 = FieldSpec::new(7).unwrap();
        for x in f7.elements() {
            assert_eq!(x.add(f7.zero()).unwrap(), x);
        }
    }

    #[test]
    fn mixed_fields_error() {
        let f3 = FieldSpec::new(3).unwrap();
        let f5 = FieldSpec::new(5).unwrap();
        assert_eq!(
            f3.element(1).add(f5.element(1)),
            Err(FieldError::FieldMismatch { left: 3, right: 5 })
        );
    }

    #[test]
    fn inverse_examples() {
        let f5 = FieldSpec::new(5).unwrap();
        assert_eq!(f5.element(2).inv().unwrap(), f5.element(3));
        let f3 = FieldSpec::new(3).unwrap();
        assert_eq!(f3.element(0).inv(), Err(FieldError::ZeroInverse));
        for p in SMALL_PRIMES {
            let field = FieldSpec::new(p).unwrap();
            assert_eq!(field.one().inv().unwrap(), field.one());
        }
    }

    #[test]
    fn inverse_exhaustive_small_fields() {
        for p in SMALL_PRIMES {
            let field = FieldSpec::new(p).unwrap();
            for a in field.elements().skip(1) {
                assert_eq!(a.mul(a.inv().unwrap()).unwrap(), field.one());
            }
        }
    }

    #[test]
    fn fermat_exhaustive_small_fields() {
        for p in SMALL_PRIMES {
            let field = FieldSpec::new(p).unwrap();
            for a in field.elements().skip(1) {
                assert_eq!(a.pow(p - 1), field.one());
            }
        }
    }

    #[test]
    fn ring_axioms_randomized_at_max_modulus() {
        // 2^31 - 1 is prime, the largest field we accept; this doubles as an
        // overflow check on the 64-bit intermediates.
        let field = FieldSpec::new((1 << 31) - 1).unwrap();
        let mut state = 0x1234_5678_u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state >> 33
        };
        for _ in 0..200 {
            let a = field.element(next());
            let b = field.element(next());
            let c = field.element(next());
            assert_eq!(a.add(b).unwrap(), b.add(a).unwrap());
            assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
            assert_eq!(
                a.add(b).unwrap().add(c).unwrap(),
                a.add(b.add(c).unwrap()).unwrap()
            );
            assert_eq!(
                a.mul(b).unwrap().mul(c).unwrap(),
                a.mul(b.mul(c).unwrap()).unwrap()
            );
            assert_eq!(
                a.mul(b.add(c).unwrap()).unwrap(),
                a.mul(b).unwrap().add(a.mul(c).unwrap()).unwrap()
            );
            if !a.is_zero() {
                assert_eq!(a.mul(a.inv().unwrap()).unwrap(), field.one());
            }
        }
    }

    #[test]
    fn ring_axioms_exhaustive_tiny_fields() {
        for p in [2, 3, 5, 7] {
            let field = FieldSpec::new(p).unwrap();
            for a in field.elements() {
                for b in field.elements() {
                    assert_eq!(a.add(b).unwrap(), b.add(a).unwrap());
                    assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
                    for c in field.elements() {
                        assert_eq!(
                            a.add(b).unwrap().add(c).unwrap(),
                            a.add(b.add(c).unwrap()).unwrap()
                        );
                        assert_eq!(
                            a.mul(b).unwrap().mul(c).unwrap(),
                            a.mul(b.mul(c).unwrap()).unwrap()
                        );
                        assert_eq!(
                            a.mul(b.add(c).unwrap()).unwrap(),
                            a.mul(b).unwrap().add(a.mul(c).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }
}
