//! Sparse Laurent polynomials in v over ℤ, with q = v².
//!
//! These are the scalars of the Hecke algebra and of every graded rank or
//! character in the bimodule layer. Arithmetic is exact; coefficients live in
//! i128 and overflow panics rather than wrapping (an overflow would mean an
//! identity check had silently left the intended desk scale).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Laurent polynomial Σ c_k·v^k with integer coefficients.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct LaurentScalar(BTreeMap<i32, i128>);

fn checked_add(a: i128, b: i128) -> i128 {
    a.checked_add(b).expect("laurent coefficient overflow")
}

fn checked_mul(a: i128, b: i128) -> i128 {
    a.checked_mul(b).expect("laurent coefficient overflow")
}

impl LaurentScalar {
    pub fn zero() -> Self {
        LaurentScalar(BTreeMap::new())
    }

    pub fn one() -> Self {
        LaurentScalar::from_term(1, 0)
    }

    /// The single term c·v^k; dropped when c = 0.
    pub fn from_term(c: i128, k: i32) -> Self {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert(k, c);
        }
        LaurentScalar(m)
    }

    pub fn from_int(c: i128) -> Self {
        LaurentScalar::from_term(c, 0)
    }

    pub fn v_power(k: i32) -> Self {
        LaurentScalar::from_term(1, k)
    }

    /// q^k = v^{2k}.
    pub fn q_power(k: i32) -> Self {
        LaurentScalar::from_term(1, 2 * k)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0.get(&0) == Some(&1)
    }

    pub fn coeff(&self, k: i32) -> i128 {
        self.0.get(&k).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i128)> + '_ {
        self.0.iter().map(|(&k, &c)| (k, c))
    }

    pub fn scale(&self, c: i128) -> Self {
        if c == 0 {
            return LaurentScalar::zero();
        }
        LaurentScalar(self.0.iter().map(|(&k, &a)| (k, checked_mul(a, c))).collect())
    }

    pub fn shift(&self, k: i32) -> Self {
        LaurentScalar(self.0.iter().map(|(&e, &a)| (e + k, a)).collect())
    }

    pub fn add_term(&mut self, c: i128, k: i32) {
        if c == 0 {
            return;
        }
        let entry = self.0.entry(k).or_insert(0);
        *entry = checked_add(*entry, c);
        if *entry == 0 {
            self.0.remove(&k);
        }
    }

    /// `Some((c, k))` when the scalar is the single term c·v^k with c = ±1;
    /// these are exactly the invertible entries Gaussian elimination may
    /// cancel against.
    pub fn unit_term(&self) -> Option<(i128, i32)> {
        if self.0.len() != 1 {
            return None;
        }
        let (&k, &c) = self.0.iter().next().unwrap();
        (c == 1 || c == -1).then_some((c, k))
    }

    /// Multiplicative inverse, defined only for ±v^k.
    pub fn unit_inverse(&self) -> Option<LaurentScalar> {
        self.unit_term().map(|(c, k)| LaurentScalar::from_term(c, -k))
    }

    /// Evaluation at v = 1 (so also q = 1).
    pub fn eval_at_one(&self) -> i128 {
        self.0.values().fold(0, |acc, &c| checked_add(acc, c))
    }

    /// The involution v ↦ v⁻¹.
    pub fn bar(&self) -> Self {
        LaurentScalar(self.0.iter().map(|(&k, &c)| (-k, c)).collect())
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.0.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.0.keys().next_back().copied()
    }
}

impl Add for &LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(c, k);
        }
        out
    }
}

impl Sub for &LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(-c, k);
        }
        out
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        LaurentScalar(self.0.iter().map(|(&k, &c)| (k, -c)).collect())
    }
}

impl Mul for &LaurentScalar {
    type Output = LaurentScalar;
    // Exponents add under multiplication of Laurent terms.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = LaurentScalar::zero();
        for (ka, ca) in self.terms() {
            for (kb, cb) in rhs.terms() {
                out.add_term(checked_mul(ca, cb), ka + kb);
            }
        }
        out
    }
}

/// Canonical text: terms by ascending v-degree, even degrees rendered as
/// q-powers and odd ones as v-powers, so `1 - q` and `v^-1 + v` both print
/// the way they are usually written.
impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms() {
            let mag = c.unsigned_abs();
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let var = match (k, k % 2 == 0) {
                (0, _) => String::new(),
                (2, _) => "q".into(),
                (1, _) => "v".into(),
                (_, true) => format!("q^{}", k / 2),
                (_, false) => format!("v^{k}"),
            };
            if var.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{var}")?;
            } else {
                write!(f, "{mag}*{var}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> LaurentScalar {
        LaurentScalar::q_power(1)
    }

    #[test]
    fn ring_identities() {
        let a = &(&LaurentScalar::v_power(-1) + &q()) - &LaurentScalar::from_int(3);
        let b = &LaurentScalar::v_power(3) + &LaurentScalar::one();
        let c = &q() - &LaurentScalar::v_power(1);
        // Commutativity, associativity, distributivity on a sample.
        assert_eq!(&a * &b, &b * &a);
        assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        assert_eq!(&a + &(-&a), LaurentScalar::zero());
        assert_eq!(&a * &LaurentScalar::one(), a);
        assert_eq!((&a * &LaurentScalar::zero()), LaurentScalar::zero());
    }

    #[test]
    fn quadratic_relation_factors() {
        // (x + 1)(x − q) with x = q is zero: the Hecke quadratic in scalars.
        let x = q();
        let lhs = &(&x + &LaurentScalar::one()) * &(&x - &q());
        assert!(lhs.is_zero());
    }

    #[test]
    fn unit_detection() {
        assert_eq!(LaurentScalar::v_power(5).unit_term(), Some((1, 5)));
        assert_eq!(
            (-&LaurentScalar::v_power(-2)).unit_term(),
            Some((-1, -2))
        );
        assert_eq!(LaurentScalar::from_int(2).unit_term(), None);
        assert_eq!((&q() + &LaurentScalar::one()).unit_term(), None);
        assert_eq!(LaurentScalar::zero().unit_term(), None);
        let u = -&LaurentScalar::v_power(3);
        assert!((&u * &u.unit_inverse().unwrap()).is_one());
    }

    #[test]
    fn display_is_readable_and_deterministic() {
        let s = &(&LaurentScalar::one() - &q()) + &LaurentScalar::from_term(2, 3);
        assert_eq!(s.to_string(), "1 - q + 2*v^3");
        assert_eq!(LaurentScalar::zero().to_string(), "0");
        assert_eq!(LaurentScalar::v_power(-1).to_string(), "v^-1");
        assert_eq!(LaurentScalar::q_power(-1).to_string(), "q^-1");
        assert_eq!((-&LaurentScalar::one()).to_string(), "-1");
        assert_eq!(LaurentScalar::from_term(-1, 2).to_string(), "-q");
    }

    #[test]
    fn bar_and_evaluation() {
        let s = &LaurentScalar::v_power(2) + &LaurentScalar::from_term(3, -1);
        assert_eq!(s.bar(), &LaurentScalar::v_power(-2) + &LaurentScalar::from_term(3, 1));
        assert_eq!(s.eval_at_one(), 4);
        assert_eq!(s.min_degree(), Some(-1));
        assert_eq!(s.max_degree(), Some(2));
    }

    #[test]
    #[should_panic(expected = "laurent coefficient overflow")]
    fn overflow_panics_instead_of_wrapping() {
        let big = LaurentScalar::from_int(i128::MAX);
        let _ = &big + &big;
    }
}
