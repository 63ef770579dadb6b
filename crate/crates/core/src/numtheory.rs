//! Exact 2-adic arithmetic modulo `2^n`.
//!
//! Residues are canonical representatives in `[0, 2^n)`. Quotients such as
//! `(1 - 5^{-kj}) / (1 - 5^{-j})` are never formed by modular division (the
//! denominator is divisible by 4); they are evaluated as explicit geometric
//! or alternating sums instead.

use serde::Serialize;
use thiserror::Error;

/// Largest supported exponent. Products of two residues must fit in a `u128`.
pub const MAX_EXPONENT: u32 = 63;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    #[error("the 2-adic split of 0 is undefined")]
    UndefinedSplit,
    #[error("exponent {0} outside supported range 1..={MAX_EXPONENT}")]
    ExponentOutOfRange(u32),
    #[error("contract violation: {0}")]
    ContractViolation(&'static str),
}

/// `value = two_part * odd_part` with `odd_part` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TwoAdicSplit {
    pub value: u128,
    pub two_part: u128,
    pub odd_part: u128,
}

impl TwoAdicSplit {
    /// Exponent `v` with `two_part = 2^v`.
    pub fn valuation(&self) -> u32 {
        self.two_part.trailing_zeros()
    }
}

/// Splits `m >= 1` into its 2-part and odd part.
pub fn val2(m: u128) -> Result<TwoAdicSplit, NumError> {
    if m == 0 {
        return Err(NumError::UndefinedSplit);
    }
    let v = m.trailing_zeros();
    Ok(TwoAdicSplit {
        value: m,
        two_part: 1u128 << v,
        odd_part: m >> v,
    })
}

/// The 2-part of `m`, with the convention that `two_part(0)` is `None`.
pub fn two_part(m: u128) -> Option<u128> {
    val2(m).ok().map(|s| s.two_part)
}

/// The ring `Z / 2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Modulus2n {
    n: u32,
    modulus: u64,
}

impl Modulus2n {
    pub fn new(n: u32) -> Result<Self, NumError> {
        if n == 0 || n > MAX_EXPONENT {
            return Err(NumError::ExponentOutOfRange(n));
        }
        Ok(Self {
            n,
            modulus: 1u64 << n,
        })
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn reduce(&self, v: u128) -> u64 {
        (v & (self.modulus as u128 - 1)) as u64
    }

    #[inline]
    pub fn reduce_signed(&self, v: i128) -> u64 {
        v.rem_euclid(self.modulus as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 + b as u128)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 + self.modulus as u128 - (b & (self.modulus - 1)) as u128)
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    /// `base^e` by square-and-multiply; `e` is taken as an unsigned count.
    pub fn pow(&self, base: u64, mut e: u128) -> u64 {
        let mut acc = self.reduce(1);
        let mut b = self.reduce(base as u128);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// Inverse of an odd residue (Newton iteration on the 2-adic inverse).
    pub fn inverse_odd(&self, u: u64) -> Result<u64, NumError> {
        if u & 1 == 0 {
            return Err(NumError::ContractViolation("only odd residues are units mod 2^n"));
        }
        // u * u == 1 mod 8 for odd u, so u is its own inverse to 3 bits.
        let mut x = u as u128;
        let two = 2u128;
        for _ in 0..7 {
            x = x.wrapping_mul(two.wrapping_sub((u as u128).wrapping_mul(x)));
        }
        Ok(self.reduce(x))
    }

    /// `sum_{s=0}^{count-1} ratio^s` in `O(log count)` multiplications.
    pub fn geometric_series(&self, ratio: u64, count: u128) -> u64 {
        // Walk the bits of `count` from the top, maintaining
        // (sum of the first c terms, ratio^c).
        let mut sum = 0u64;
        let mut power = self.reduce(1);
        if count == 0 {
            return 0;
        }
        let top = 127 - count.leading_zeros();
        for bit in (0..=top).rev() {
            // c -> 2c
            sum = self.add(sum, self.mul(sum, power));
            power = self.mul(power, power);
            if (count >> bit) & 1 == 1 {
                // c -> c + 1
                sum = self.add(self.mul(sum, ratio), 1);
                power = self.mul(power, ratio);
            }
        }
        sum
    }

    /// `sum_{s=0}^{count-1} (-1)^s ratio^s`.
    pub fn alternating_series(&self, ratio: u64, count: u128) -> u64 {
        self.geometric_series(self.neg(ratio), count)
    }
}

/// `5^k mod 2^n`; negative `k` uses the inverse of 5 in the unit group.
pub fn pow5(k: i64, n: u32) -> Result<u64, NumError> {
    let m = Modulus2n::new(n)?;
    let base = if k < 0 { m.inverse_odd(m.reduce(5))? } else { m.reduce(5) };
    Ok(m.pow(base, k.unsigned_abs() as u128))
}

/// Whether the congruence pair `5^{2^t} = 1 (mod 2^{t+2})` and
/// `5^{2^t} != 1 (mod 2^{t+3})` holds, evaluated inside `Z / 2^n`.
///
/// Requires `t + 3 <= n` so that both moduli divide `2^n`.
pub fn five_power_congruences(t: u32, n: u32) -> Result<(bool, bool), NumError> {
    if t + 3 > n {
        return Err(NumError::ContractViolation("need t + 3 <= n"));
    }
    let m = Modulus2n::new(n)?;
    let v = m.pow(5, 1u128 << t);
    let low = (v - 1) & ((1u64 << (t + 2)) - 1) == 0;
    let high = (v - 1) & ((1u64 << (t + 3)) - 1) != 0;
    Ok((low, high))
}

/// Outcome of comparing a predicted 2-part with a residue mod `2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TwoPartCheck {
    Match,
    Mismatch,
    /// The prediction is at least `2^n`, so the residue cannot confirm it.
    Truncated,
}

/// A residue mod `2^n` together with its observable 2-adic split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModSum {
    pub n: u32,
    pub residue: u64,
    /// `None` when the residue is 0: the true 2-part is then only known to
    /// be at least `2^n`.
    pub split: Option<TwoAdicSplit>,
    pub truncated: bool,
}

impl ModSum {
    fn new(n: u32, residue: u64) -> Self {
        let split = val2(residue as u128).ok();
        Self {
            n,
            residue,
            split,
            truncated: split.is_none(),
        }
    }

    /// Compares the predicted 2-part of the exact integer with the residue.
    pub fn check_two_part(&self, predicted: u128) -> TwoPartCheck {
        let modulus = 1u128 << self.n;
        match self.split {
            Some(s) if predicted < modulus => {
                if s.two_part == predicted {
                    TwoPartCheck::Match
                } else {
                    TwoPartCheck::Mismatch
                }
            }
            // true 2-part is < 2^n, prediction says otherwise
            Some(_) => TwoPartCheck::Mismatch,
            None if predicted >= modulus => TwoPartCheck::Truncated,
            None => TwoPartCheck::Mismatch,
        }
    }
}

/// `sum_{s=0}^{k-1} 5^{-sj} mod 2^n`, the numerator/denominator quotient
/// `(1 - 5^{-kj}) / (1 - 5^{-j})` in summation form. Its 2-part is `k_2`.
pub fn geom_sum_m(k: u64, j: u64, n: u32) -> Result<ModSum, NumError> {
    if k == 0 || j == 0 {
        return Err(NumError::ContractViolation("geometric sum needs k >= 1 and j >= 1"));
    }
    let m = Modulus2n::new(n)?;
    let ratio = m.pow(m.inverse_odd(m.reduce(5))?, j as u128);
    Ok(ModSum::new(n, m.geometric_series(ratio, k as u128)))
}

/// `sum_{s=0}^{k-1} (-1)^s 5^{-sj} mod 2^n` for even `k`, i.e. the quotient
/// `(1 - 5^{-kj}) / (1 + 5^{-j})`. Its 2-part is `2 k_2 j_2`.
pub fn alt_sum_l(k: u64, j: u64, n: u32) -> Result<ModSum, NumError> {
    if k % 2 == 1 || k == 0 {
        return Err(NumError::ContractViolation("alternating sum needs an even k >= 2"));
    }
    if j == 0 {
        return Err(NumError::ContractViolation("alternating sum needs j >= 1"));
    }
    let m = Modulus2n::new(n)?;
    let ratio = m.pow(m.inverse_odd(m.reduce(5))?, j as u128);
    Ok(ModSum::new(n, m.alternating_series(ratio, k as u128)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits() {
        let s = val2(12).unwrap();
        assert_eq!((s.two_part, s.odd_part), (4, 3));
        let s = val2(1).unwrap();
        assert_eq!((s.two_part, s.odd_part), (1, 1));
        let s = val2(1 << 9).unwrap();
        assert_eq!((s.two_part, s.odd_part, s.valuation()), (1 << 9, 1, 9));
        assert_eq!(val2(0), Err(NumError::UndefinedSplit));
    }

    #[test]
    fn pow5_examples() {
        assert_eq!(pow5(2, 3).unwrap(), 1);
        assert_eq!(pow5(2, 4).unwrap(), 9);
        // 5 * z == 1 mod 16 by exhaustive search
        let z = (0..16u64).find(|z| (5 * z) % 16 == 1).unwrap();
        assert_eq!(pow5(-1, 4).unwrap(), z);
        assert_eq!(z, 13);
    }

    #[test]
    fn inverse_is_inverse() {
        let m = Modulus2n::new(63).unwrap();
        for u in [1u64, 3, 5, 7, 12345, (1 << 63) - 1] {
            let inv = m.inverse_odd(u).unwrap();
            assert_eq!(m.mul(u, inv), 1);
        }
        assert!(m.inverse_odd(4).is_err());
    }

    #[test]
    fn geometric_examples() {
        let s = geom_sum_m(1, 17, 6).unwrap();
        assert_eq!(s.residue, 1);
        assert_eq!(s.split.unwrap().two_part, 1);
        // 1 + 13 + 41 + 21 = 76 = 12 mod 64
        let s = geom_sum_m(4, 1, 6).unwrap();
        assert_eq!(s.residue, 12);
        assert_eq!(s.split.unwrap().two_part, 4);
        assert!(geom_sum_m(0, 1, 6).is_err());
    }

    #[test]
    fn alternating_examples() {
        let s = alt_sum_l(2, 1, 5).unwrap();
        assert_eq!(s.residue, 20);
        assert_eq!(s.check_two_part(4), TwoPartCheck::Match);
        let s = alt_sum_l(2, 2, 6).unwrap();
        assert_eq!(s.split.unwrap().two_part, 8);
        let s = alt_sum_l(2, 1, 2).unwrap();
        assert!(s.truncated);
        assert_eq!(s.check_two_part(4), TwoPartCheck::Truncated);
        assert!(matches!(alt_sum_l(3, 1, 6), Err(NumError::ContractViolation(_))));
    }

    #[test]
    fn series_match_naive_summation() {
        let m = Modulus2n::new(10).unwrap();
        for ratio in [1u64, 3, 5, 13, 1023] {
            for count in 0..70u128 {
                let mut naive = 0u64;
                let mut p = 1u64;
                for _ in 0..count {
                    naive = m.add(naive, p);
                    p = m.mul(p, ratio);
                }
                assert_eq!(m.geometric_series(ratio, count), naive);
            }
        }
    }

    #[test]
    fn congruence_pair_small() {
        for n in 3..=20 {
            for t in 0..=n - 3 {
                assert_eq!(five_power_congruences(t, n).unwrap(), (true, true));
            }
        }
    }
}
