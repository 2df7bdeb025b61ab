//! Exact sums of square roots of rationals.
//!
//! `Σ c_f √f` with rational `c_f` and distinct square-free integers `f` is
//! a canonical form: square roots of distinct square-free integers are
//! linearly independent over the rationals, so two sums are equal exactly
//! when their coefficient maps agree.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;

use super::Prob;

/// Operands above this bound are not factored; callers fall back to
/// floating point.
pub const EXACT_LIMIT: i64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SqrtSum {
    terms: BTreeMap<u64, Ratio<i128>>,
}

impl SqrtSum {
    pub fn zero() -> Self {
        SqrtSum::default()
    }

    /// Adds `√(a · b)`. Returns `false`, leaving the sum unchanged, when an
    /// operand is too large to factor.
    pub fn add_sqrt_product(&mut self, a: Prob, b: Prob) -> bool {
        let parts = [*a.numer(), *a.denom(), *b.numer(), *b.denom()];
        if parts.iter().any(|&x| !(0..=EXACT_LIMIT).contains(&x)) {
            return false;
        }
        if parts[0] == 0 || parts[2] == 0 {
            return true;
        }
        // √(n1 n2 / (d1 d2)) = √(n1 n2 d1 d2) / (d1 d2)
        let mut exponents: BTreeMap<u64, u32> = BTreeMap::new();
        for x in parts {
            for (p, e) in factor(x as u64) {
                *exponents.entry(p).or_insert(0) += e;
            }
        }
        let mut square = 1i128;
        let mut free = 1u64;
        for (p, e) in exponents {
            square *= (p as i128).pow(e / 2);
            if e % 2 == 1 {
                free *= p;
            }
        }
        let coeff = Ratio::new(square, parts[1] as i128 * parts[3] as i128);
        let slot = self.terms.entry(free).or_insert_with(Ratio::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&free);
        }
        true
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(f, c)| *c.numer() as f64 / *c.denom() as f64 * (*f as f64).sqrt())
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for SqrtSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (root, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match (*root, c.is_integer()) {
                (1, true) => write!(f, "{}", c.numer())?,
                (1, false) => write!(f, "{}/{}", c.numer(), c.denom())?,
                (r, true) => write!(f, "{}*sqrt({r})", c.numer())?,
                (r, false) => write!(f, "{}/{}*sqrt({r})", c.numer(), c.denom())?,
            }
        }
        Ok(())
    }
}

/// Prime factorization by trial division.
fn factor(mut x: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= x {
        let mut e = 0;
        while x.is_multiple_of(d) {
            x /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if x > 1 {
        out.push((x, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Prob {
        Prob::new(n, d)
    }

    #[test]
    fn canonical_forms() {
        let mut s = SqrtSum::zero();
        assert!(s.add_sqrt_product(r(1, 2), r(1, 2)));
        assert_eq!(s.to_string(), "1/2");
        s.add_sqrt_product(r(1, 3), r(1, 1));
        assert_eq!(s.to_string(), "1/2 + 1/3*sqrt(3)");
        // √(1/8 · 1/2) = 1/4 and √(2/9 · 1) = (1/3)√2
        let mut t = SqrtSum::zero();
        t.add_sqrt_product(r(1, 8), r(1, 2));
        t.add_sqrt_product(r(2, 9), r(1, 1));
        assert_eq!(t.to_string(), "1/4 + 1/3*sqrt(2)");
    }

    #[test]
    fn equal_values_have_equal_forms() {
        // √(1/4 · 1/4) + √(1/4 · 1/4) = 1/2 = √(1/2 · 1/2)
        let mut a = SqrtSum::zero();
        a.add_sqrt_product(r(1, 4), r(1, 4));
        a.add_sqrt_product(r(1, 4), r(1, 4));
        let mut b = SqrtSum::zero();
        b.add_sqrt_product(r(1, 2), r(1, 2));
        assert_eq!(a, b);
        // √(1/2 · 1/4) vs 1/4 differ
        let mut c = SqrtSum::zero();
        c.add_sqrt_product(r(1, 2), r(1, 4));
        assert_ne!(c, b);
    }

    #[test]
    fn oversized_operands_are_refused() {
        let mut s = SqrtSum::zero();
        assert!(!s.add_sqrt_product(Prob::new(1, EXACT_LIMIT + 1), r(1, 1)));
        assert!(s.is_zero());
    }

    proptest! {
        #[test]
        fn exact_value_matches_float(pairs in prop::collection::vec(((0i64..40, 1i64..40), (0i64..40, 1i64..40)), 0..6)) {
            let mut s = SqrtSum::zero();
            let mut float = 0.0;
            for ((n1, d1), (n2, d2)) in pairs {
                let (a, b) = (r(n1, d1), r(n2, d2));
                prop_assert!(s.add_sqrt_product(a, b));
                float += ((n1 * n2) as f64 / (d1 * d2) as f64).sqrt();
            }
            prop_assert!((s.to_f64() - float).abs() < 1e-9);
        }

        #[test]
        fn factorization_multiplies_back(x in 1u64..1_000_000) {
            let prod: u64 = factor(x).iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(prod, x);
        }
    }
}
