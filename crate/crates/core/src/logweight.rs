//! Exact integer combinations of logarithms.
//!
//! Every score the search algorithms compare is of the form `Σ k_i · ln(n_i)`
//! with integer `k_i` and positive integer `n_i`. Storing the combination as a
//! vector of prime exponents makes equality exact (the logs of distinct primes
//! are linearly independent over the rationals), so ties are detected exactly
//! and broken by node id instead of by floating-point noise.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use smallvec::SmallVec;

/// `Σ coeff · ln(prime)` over a sorted list of primes with non-zero coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LogWeight {
    terms: SmallVec<[(u64, i64); 4]>,
}

impl LogWeight {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `ln(n)`; `n` must be positive.
    pub fn ln(n: u64) -> Self {
        Self::ln_scaled(n, 1)
    }

    /// `k · ln(n)`.
    pub fn ln_scaled(n: u64, k: i64) -> Self {
        let mut w = Self::zero();
        w.add_ln(n, k);
        w
    }

    /// Adds `k · ln(n)` in place.
    pub fn add_ln(&mut self, n: u64, k: i64) {
        assert!(n > 0, "logarithm of zero");
        if k == 0 {
            return;
        }
        for (p, e) in factorize(n) {
            self.add_prime(p, k * e as i64);
        }
    }

    fn add_prime(&mut self, p: u64, k: i64) {
        match self.terms.binary_search_by_key(&p, |&(q, _)| q) {
            Ok(i) => {
                self.terms[i].1 += k;
                if self.terms[i].1 == 0 {
                    self.terms.remove(i);
                }
            }
            Err(i) => self.terms.insert(i, (p, k)),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|&(p, c)| (p, c * k)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Floating-point value. Identical combinations always produce the
    /// identical bit pattern because the sum runs in prime order.
    pub fn value(&self) -> f64 {
        self.terms
            .iter()
            .map(|&(p, c)| c as f64 * (p as f64).ln())
            .sum()
    }

    /// Sign of the represented real number.
    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        match self.value().partial_cmp(&0.0) {
            Some(Ordering::Equal) | None => self.terms[0].1.cmp(&0),
            Some(o) => o,
        }
    }
}

impl Ord for LogWeight {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.value()
            .total_cmp(&other.value())
            .then_with(|| self.terms.cmp(&other.terms))
    }
}

impl PartialOrd for LogWeight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl AddAssign<&LogWeight> for LogWeight {
    fn add_assign(&mut self, rhs: &LogWeight) {
        for &(p, c) in &rhs.terms {
            self.add_prime(p, c);
        }
    }
}

impl SubAssign<&LogWeight> for LogWeight {
    fn sub_assign(&mut self, rhs: &LogWeight) {
        for &(p, c) in &rhs.terms {
            self.add_prime(p, -c);
        }
    }
}

impl Add<&LogWeight> for LogWeight {
    type Output = LogWeight;
    fn add(mut self, rhs: &LogWeight) -> LogWeight {
        self += rhs;
        self
    }
}

impl Sub<&LogWeight> for LogWeight {
    type Output = LogWeight;
    fn sub(mut self, rhs: &LogWeight) -> LogWeight {
        self -= rhs;
        self
    }
}

impl Neg for LogWeight {
    type Output = LogWeight;
    fn neg(self) -> LogWeight {
        self.scale(-1)
    }
}

impl fmt::Debug for LogWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, c)| format!("{c}·ln{p}"))
            .collect();
        write!(f, "{} (≈{:.6})", parts.join(" + "), self.value())
    }
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> SmallVec<[(u64, u32); 8]> {
    let mut out = SmallVec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization() {
        assert_eq!(factorize(1).as_slice(), &[]);
        assert_eq!(factorize(12).as_slice(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(97).as_slice(), &[(97, 1)]);
        assert_eq!(factorize(1 << 20).as_slice(), &[(2, 20)]);
    }

    #[test]
    fn exact_ties() {
        // 3 ln 2 == ln 8, ln 6 == ln 2 + ln 3
        assert_eq!(LogWeight::ln_scaled(2, 3), LogWeight::ln(8));
        assert_eq!(LogWeight::ln(6), LogWeight::ln(2) + &LogWeight::ln(3));
        assert!((LogWeight::ln(6) - &LogWeight::ln(2) - &LogWeight::ln(3)).is_zero());
        assert_eq!(LogWeight::ln(1), LogWeight::zero());
    }

    #[test]
    fn ordering_matches_values() {
        // 2^10 = 1024 > 10^3 = 1000
        let a = LogWeight::ln_scaled(2, 10);
        let b = LogWeight::ln_scaled(10, 3);
        assert!(a > b);
        assert_eq!((a.clone() - &b).signum(), Ordering::Greater);
        assert_eq!((b - &a).signum(), Ordering::Less);
        assert!((LogWeight::ln(5).value() - 5f64.ln()).abs() < 1e-15);
    }
}
