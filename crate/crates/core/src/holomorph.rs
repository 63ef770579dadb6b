//! Element arithmetic in holomorphs of cyclic groups.
//!
//! Points of `Z_n` are residues and the holomorph acts by "translate, then
//! apply an automorphism": the element `a^t x^b y^c` of `Hol(Z_{2^n})` sends
//! `g` to `(g + t) * (-1)^b * 5^c`. Products are read left to right, so
//! `h1 * h2` means "apply `h1`, then `h2`".

use std::fmt;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::numtheory::{Modulus2n, NumError};
use crate::permgroup::Perm;

/// Largest exponent for which [`HolElem2`] is supported.
pub const MAX_HOL_EXPONENT: u32 = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HolError {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("exponent {0} unsupported (need 3 <= n <= {MAX_HOL_EXPONENT})")]
    ExponentOutOfRange(u32),
    #[error("modulus {0} unsupported")]
    BadModulus(u64),
    #[error("{multiplier} is not a unit mod {modulus}")]
    NotAUnit { multiplier: u64, modulus: u64 },
    #[error("point {point} outside Z_{modulus}")]
    PointOutOfRange { point: u64, modulus: u64 },
    #[error("subgroup exponents out of range: {0}")]
    ExponentsOutOfRange(String),
    #[error("cannot parse element {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Num(#[from] NumError),
}

/// A generic element `g -> (g + translation) * multiplier` of `Hol(Z_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AffineMap {
    pub modulus: u64,
    pub translation: u64,
    pub multiplier: u64,
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse of `u` modulo `m`, if it exists.
pub fn unit_inverse(u: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (u as i128 % m as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// The units of `Z_n`, ascending.
pub fn units(modulus: u64) -> Vec<u64> {
    if modulus == 1 {
        return vec![0];
    }
    (1..modulus).filter(|u| u.gcd(&modulus) == 1).collect()
}

/// Multiplicative order of a unit `u` modulo `m`.
pub fn unit_order(u: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let mut k = 1;
    let mut p = u % m;
    while p != 1 {
        p = mul_mod(p, u, m);
        k += 1;
    }
    k
}

impl AffineMap {
    pub fn new(modulus: u64, translation: u64, multiplier: u64) -> Result<Self, HolError> {
        if modulus < 1 {
            return Err(HolError::BadModulus(modulus));
        }
        let multiplier = multiplier % modulus;
        if modulus > 1 && multiplier.gcd(&modulus) != 1 {
            return Err(HolError::NotAUnit {
                multiplier,
                modulus,
            });
        }
        Ok(Self {
            modulus,
            translation: translation % modulus,
            multiplier: if modulus == 1 { 0 } else { multiplier },
        })
    }

    pub fn identity(modulus: u64) -> Self {
        Self::new(modulus, 0, 1).expect("1 is a unit")
    }

    pub fn translation(modulus: u64, t: u64) -> Self {
        Self::new(modulus, t, 1).expect("1 is a unit")
    }

    pub fn is_identity(&self) -> bool {
        self.translation == 0 && self.multiplier == 1 % self.modulus
    }

    pub fn is_translation(&self) -> bool {
        self.multiplier == 1 % self.modulus
    }

    pub fn act(&self, g: u64) -> u64 {
        mul_mod((g % self.modulus + self.translation) % self.modulus, self.multiplier, self.modulus)
    }

    /// Apply `self`, then `other`: `(t1, m1)(t2, m2) = (t1 + t2 m1^{-1}, m1 m2)`.
    pub fn compose(&self, other: &Self) -> Result<Self, HolError> {
        if self.modulus != other.modulus {
            return Err(HolError::ModulusMismatch(self.modulus, other.modulus));
        }
        let n = self.modulus;
        let inv = unit_inverse(self.multiplier, n).expect("multiplier is a unit");
        Ok(Self {
            modulus: n,
            translation: (self.translation + mul_mod(other.translation, inv, n)) % n,
            multiplier: mul_mod(self.multiplier, other.multiplier, n),
        })
    }

    pub fn inverse(&self) -> Self {
        let n = self.modulus;
        let inv = unit_inverse(self.multiplier, n).expect("multiplier is a unit");
        Self {
            modulus: n,
            translation: (n - mul_mod(self.translation, self.multiplier, n)) % n,
            multiplier: inv,
        }
    }

    /// Conjugate `w^{-1} self w`.
    pub fn conjugate_by(&self, w: &Self) -> Result<Self, HolError> {
        w.inverse().compose(self)?.compose(w)
    }

    pub fn power(&self, r: i64) -> Self {
        let mut base = if r < 0 { self.inverse() } else { *self };
        let mut e = r.unsigned_abs();
        let mut acc = Self::identity(self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base).expect("same modulus");
            }
            base = base.compose(&base).expect("same modulus");
            e >>= 1;
        }
        acc
    }

    /// Smallest `r > 0` with `self^r = 1`, by iterated composition.
    pub fn order(&self) -> u64 {
        let mut k = 1;
        let mut p = *self;
        while !p.is_identity() {
            p = p.compose(self).expect("same modulus");
            k += 1;
        }
        k
    }

    pub fn to_perm(&self) -> Perm {
        Perm::from_images((0..self.modulus).map(|g| self.act(g) as usize).collect())
            .expect("affine maps are bijections")
    }

    /// Recovers an affine map from its permutation, if it is one.
    pub fn from_perm(p: &Perm) -> Option<Self> {
        let n = p.degree() as u64;
        if n == 0 {
            return None;
        }
        if n == 1 {
            return Some(Self::identity(1));
        }
        // p(g) = (g + t) m = g m + t m
        let c = p.image(0) as u64;
        let m = (p.image(1) as u64 + n - c) % n;
        let minv = unit_inverse(m, n)?;
        let t = mul_mod(c, minv, n);
        let f = Self::new(n, t, m).ok()?;
        (0..n).all(|g| f.act(g) == p.image(g as usize) as u64).then_some(f)
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(g+{})*{} mod {}", self.translation, self.multiplier, self.modulus)
    }
}

/// Splits a unit `u` of `Z_{2^n}` (n >= 3) as `(-1)^negate * 5^five_power`.
///
/// The exponent of 5 is recovered bit by bit: `5^{2^i} = 1 + 2^{i+2}` modulo
/// `2^{i+3}`, so each step fixes one more bit of `u * 5^{-c}`.
pub fn split_unit(u: u64, n: u32) -> Result<(bool, u64), HolError> {
    let m = Modulus2n::new(n)?;
    if u & 1 == 0 {
        return Err(HolError::NotAUnit {
            multiplier: u,
            modulus: m.modulus(),
        });
    }
    let u = m.reduce(u as u128);
    let negate = u % 4 == 3;
    let v = if negate { m.neg(u) } else { u };
    let inv5 = m.inverse_odd(5 % m.modulus())?;
    let mut cur = v;
    let mut c = 0u64;
    for i in 0..n.saturating_sub(2) {
        if cur & ((1u64 << (i + 3).min(n)) - 1) != 1 % (1u64 << (i + 3).min(n)) {
            c |= 1 << i;
            cur = m.mul(cur, m.pow(inv5, 1u128 << i));
        }
    }
    debug_assert_eq!(cur, 1 % m.modulus());
    Ok((negate, c))
}

/// Normal-form element `a^translation x^negate y^five_power` of `Hol(Z_{2^n})`.
///
/// Serialises as its printed form, e.g. `"a^3*x*y^2"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "String")]
pub struct HolElem2 {
    pub n: u32,
    /// Exponent of `a`, in `[0, 2^n)`.
    pub translation: u64,
    /// Exponent of `x` (inversion).
    pub negate: bool,
    /// Exponent of `y` (multiplication by 5), in `[0, 2^{n-2})`.
    pub five_power: u64,
}

fn check_exponent(n: u32) -> Result<(), HolError> {
    if !(3..=MAX_HOL_EXPONENT).contains(&n) {
        return Err(HolError::ExponentOutOfRange(n));
    }
    Ok(())
}

impl HolElem2 {
    pub fn new(n: u32, translation: u64, negate: bool, five_power: u64) -> Result<Self, HolError> {
        check_exponent(n)?;
        Ok(Self {
            n,
            translation: translation & ((1u64 << n) - 1),
            negate,
            five_power: five_power & ((1u64 << (n - 2)) - 1),
        })
    }

    /// Like [`HolElem2::new`] with signed exponents reduced into range.
    pub fn from_signed(n: u32, translation: i128, negate: bool, five_power: i128) -> Result<Self, HolError> {
        check_exponent(n)?;
        Self::new(
            n,
            translation.rem_euclid(1i128 << n) as u64,
            negate,
            five_power.rem_euclid(1i128 << (n - 2)) as u64,
        )
    }

    pub fn identity(n: u32) -> Result<Self, HolError> {
        Self::new(n, 0, false, 0)
    }

    /// The generator `a` of the translation group.
    pub fn a(n: u32) -> Result<Self, HolError> {
        Self::new(n, 1, false, 0)
    }

    /// Inversion `x: g -> -g`.
    pub fn x(n: u32) -> Result<Self, HolError> {
        Self::new(n, 0, true, 0)
    }

    /// `y: g -> 5g`.
    pub fn y(n: u32) -> Result<Self, HolError> {
        Self::new(n, 0, false, 1)
    }

    pub fn ring(&self) -> Modulus2n {
        Modulus2n::new(self.n).expect("n validated at construction")
    }

    pub fn modulus(&self) -> u64 {
        1u64 << self.n
    }

    /// Order of the subgroup generated by `y`.
    pub fn y_order(&self) -> u64 {
        1u64 << (self.n - 2)
    }

    pub fn is_identity(&self) -> bool {
        self.translation == 0 && !self.negate && self.five_power == 0
    }

    pub fn is_translation(&self) -> bool {
        !self.negate && self.five_power == 0
    }

    /// `(-1)^negate * 5^five_power mod 2^n`.
    pub fn multiplier(&self) -> u64 {
        let m = self.ring();
        let p = m.pow(5, self.five_power as u128);
        if self.negate {
            m.neg(p)
        } else {
            p
        }
    }

    fn inverse_multiplier(&self) -> u64 {
        let m = self.ring();
        let inv5 = m.inverse_odd(5).expect("5 is odd");
        let p = m.pow(inv5, self.five_power as u128);
        if self.negate {
            m.neg(p)
        } else {
            p
        }
    }

    pub fn act(&self, g: u64) -> u64 {
        let m = self.ring();
        m.mul(m.add(m.reduce(g as u128), self.translation), self.multiplier())
    }

    /// Apply `self`, then `other`.
    pub fn compose(&self, other: &Self) -> Result<Self, HolError> {
        if self.n != other.n {
            return Err(HolError::ModulusMismatch(self.modulus(), other.modulus()));
        }
        let m = self.ring();
        Ok(Self {
            n: self.n,
            translation: m.add(self.translation, m.mul(other.translation, self.inverse_multiplier())),
            negate: self.negate ^ other.negate,
            five_power: (self.five_power + other.five_power) & (self.y_order() - 1),
        })
    }

    pub fn inverse(&self) -> Self {
        let m = self.ring();
        Self {
            n: self.n,
            translation: m.neg(m.mul(self.translation, self.multiplier())),
            negate: self.negate,
            five_power: (self.y_order() - self.five_power) & (self.y_order() - 1),
        }
    }

    /// Conjugate `w^{-1} self w`.
    pub fn conjugate_by(&self, w: &Self) -> Result<Self, HolError> {
        w.inverse().compose(self)?.compose(w)
    }

    /// `self^r` in closed form.
    ///
    /// Without inversion, `(a^t y^c)^r = a^{t * sum_{s<r} 5^{-sc}} y^{rc}`.
    /// With inversion the sum alternates in sign and the `x` survives
    /// exactly when `r` is odd.
    pub fn power(&self, r: i64) -> Self {
        if r < 0 {
            return self.inverse().power_unsigned(r.unsigned_abs() as u128);
        }
        self.power_unsigned(r as u128)
    }

    pub fn power_unsigned(&self, r: u128) -> Self {
        let m = self.ring();
        let inv5 = m.inverse_odd(5).expect("5 is odd");
        let ratio = m.pow(inv5, self.five_power as u128);
        let sum = if self.negate {
            m.alternating_series(ratio, r)
        } else {
            m.geometric_series(ratio, r)
        };
        let y_mask = self.y_order() as u128 - 1;
        Self {
            n: self.n,
            translation: m.mul(self.translation, sum),
            negate: self.negate && r % 2 == 1,
            five_power: (((r & y_mask) * self.five_power as u128) & y_mask) as u64,
        }
    }

    /// Element order in closed form.
    ///
    /// For `a^t y^c` it is `max(2^{n-2}/c_2, 2^n/t_2)`; for `a^t x y^c` with
    /// `c != 0` it is `2^{n-1}/(c_2 gcd(t, 2))`; `a^t x` is an involution.
    pub fn order(&self) -> u64 {
        let n = self.n;
        let full = 1u64 << n;
        let two_part = |v: u64, cap: u64| if v == 0 { cap } else { 1u64 << v.trailing_zeros() };
        let c2 = two_part(self.five_power, self.y_order());
        if !self.negate {
            let t2 = two_part(self.translation, full);
            (self.y_order() / c2).max(full / t2)
        } else if self.five_power == 0 {
            2
        } else {
            let g = if self.translation % 2 == 1 { 1 } else { 2 };
            (1u64 << (n - 1)) / (c2 * g)
        }
    }

    /// Conjugates `self` to `a^{t_2} x^b y^c` where `t_2` is the 2-part of the
    /// translation. Returns the normal form and an automorphism `rho` (zero
    /// translation) with `rho * self * rho^{-1}` equal to it.
    pub fn conj_normal_form(&self) -> (Self, Self) {
        if self.translation == 0 {
            return (*self, Self::identity(self.n).expect("valid n"));
        }
        let v = self.translation.trailing_zeros();
        let odd = self.translation >> v;
        let (negate, five_power) = split_unit(odd, self.n).expect("odd part is a unit");
        let rho = Self {
            n: self.n,
            translation: 0,
            negate,
            five_power,
        };
        let nf = Self {
            translation: 1u64 << v,
            ..*self
        };
        (nf, rho)
    }

    /// Recovers the normal form of an affine map of `Z_{2^n}`.
    pub fn from_affine(f: &AffineMap) -> Result<Self, HolError> {
        if !f.modulus.is_power_of_two() {
            return Err(HolError::BadModulus(f.modulus));
        }
        let n = f.modulus.trailing_zeros();
        check_exponent(n)?;
        let (negate, five_power) = split_unit(f.multiplier, n)?;
        Self::new(n, f.translation, negate, five_power)
    }

    pub fn to_affine(&self) -> AffineMap {
        AffineMap {
            modulus: self.modulus(),
            translation: self.translation,
            multiplier: self.multiplier(),
        }
    }

    pub fn to_perm(&self) -> Perm {
        Perm::from_images((0..self.modulus()).map(|g| self.act(g) as usize).collect())
            .expect("holomorph elements are bijections")
    }

    /// Dense index in `[0, 2^{2n-1})`.
    pub fn index(&self) -> usize {
        ((self.translation as usize) << (self.n - 1))
            | ((self.negate as usize) << (self.n - 2))
            | self.five_power as usize
    }

    pub fn from_index(n: u32, idx: usize) -> Self {
        Self {
            n,
            translation: (idx >> (n - 1)) as u64,
            negate: (idx >> (n - 2)) & 1 == 1,
            five_power: (idx & ((1usize << (n - 2)) - 1)) as u64,
        }
    }

    /// `|Hol(Z_{2^n})| = 2^{2n-1}`.
    pub fn group_order(n: u32) -> u64 {
        1u64 << (2 * n - 1)
    }

    /// Every element, in index order.
    pub fn all(n: u32) -> Result<impl Iterator<Item = Self>, HolError> {
        check_exponent(n)?;
        Ok((0..Self::group_order(n) as usize).map(move |i| Self::from_index(n, i)))
    }

    /// Parses `a^t*x^b*y^c`-style products, e.g. `"a^3*x*y^2"`, `"y^-1*a"`
    /// or `"1"`. Factors are multiplied left to right.
    pub fn parse(input: &str, n: u32) -> Result<Self, HolError> {
        check_exponent(n)?;
        let err = |reason: &str| HolError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        let mut acc = Self::identity(n)?;
        for factor in compact.split('*') {
            if factor == "1" || factor == "e" {
                continue;
            }
            let mut chars = factor.chars();
            let letter = chars.next().ok_or_else(|| err("empty factor"))?;
            let rest: String = chars.collect();
            let exp: i128 = if rest.is_empty() {
                1
            } else {
                let digits = rest.strip_prefix('^').ok_or_else(|| err("expected '^' after generator"))?;
                let digits = digits.trim_start_matches('(').trim_end_matches(')');
                digits.parse().map_err(|_| err("bad exponent"))?
            };
            let f = match letter {
                'a' => Self::from_signed(n, exp, false, 0)?,
                'x' => Self::new(n, 0, exp.rem_euclid(2) == 1, 0)?,
                'y' => Self::from_signed(n, 0, false, exp)?,
                _ => return Err(err("unknown generator (expected a, x or y)")),
            };
            acc = acc.compose(&f)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for HolElem2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.translation {
            0 => {}
            1 => parts.push("a".to_string()),
            t => parts.push(format!("a^{t}")),
        }
        if self.negate {
            parts.push("x".to_string());
        }
        match self.five_power {
            0 => {}
            1 => parts.push("y".to_string()),
            c => parts.push(format!("y^{c}")),
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl From<HolElem2> for String {
    fn from(h: HolElem2) -> Self {
        h.to_string()
    }
}

/// Generators of the stabiliser of the point `g` in `Hol(Z_{2^n})`.
///
/// The stabiliser of 0 is `<x, y>`; for `g != 0` it is the conjugate
/// `<a^{-2g} x, a^{g(5^{-1}-1)} y>`.
pub fn point_stabilizer(g: u64, n: u32) -> Result<[HolElem2; 2], HolError> {
    check_exponent(n)?;
    let m = Modulus2n::new(n)?;
    if g >= m.modulus() {
        return Err(HolError::PointOutOfRange {
            point: g,
            modulus: m.modulus(),
        });
    }
    if g == 0 {
        return Ok([HolElem2::x(n)?, HolElem2::y(n)?]);
    }
    let inv5 = m.inverse_odd(5)?;
    Ok([
        HolElem2::new(n, m.neg(m.mul(2, g)), true, 0)?,
        HolElem2::new(n, m.mul(g, m.sub(inv5, 1)), false, 1)?,
    ])
}

/// A prime-power factorisation `n = prod p_i^{k_i}`, primes ascending (so
/// the 2-part comes first for even `n`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrtFrame {
    pub modulus: u64,
    /// `(p_i, k_i)`.
    pub factors: Vec<(u64, u32)>,
}

impl CrtFrame {
    pub fn prime_powers(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, k)| p.pow(k)).collect()
    }

    /// Reduces a residue to its coordinates.
    pub fn split(&self, g: u64) -> Vec<u64> {
        self.prime_powers().iter().map(|q| g % q).collect()
    }

    /// Chinese remainder reconstruction from coordinates.
    pub fn combine(&self, coords: &[u64]) -> u64 {
        let n = self.modulus;
        let mut acc = 0u64;
        for (q, &c) in self.prime_powers().iter().zip(coords) {
            let rest = n / q;
            let inv = unit_inverse(rest % q, *q).unwrap_or(0);
            acc = (acc + mul_mod(mul_mod(c % q, inv, n), rest, n)) % n;
        }
        acc
    }

    /// Coordinatewise affine maps of `Hol(Z_{p_1^{k_1}}) x ... x Hol(Z_{p_t^{k_t}})`.
    pub fn map(&self, f: &AffineMap) -> Result<Vec<AffineMap>, HolError> {
        if f.modulus != self.modulus {
            return Err(HolError::ModulusMismatch(f.modulus, self.modulus));
        }
        self.prime_powers()
            .into_iter()
            .map(|q| AffineMap::new(q, f.translation % q, f.multiplier % q))
            .collect()
    }

    /// Inverse of [`CrtFrame::map`].
    pub fn unmap(&self, coords: &[AffineMap]) -> Result<AffineMap, HolError> {
        let ts: Vec<u64> = coords.iter().map(|c| c.translation).collect();
        let ms: Vec<u64> = coords.iter().map(|c| c.multiplier).collect();
        AffineMap::new(self.modulus, self.combine(&ts), self.combine(&ms))
    }
}

pub fn crt_decompose(n: u64) -> Result<CrtFrame, HolError> {
    if n < 2 {
        return Err(HolError::BadModulus(n));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            let mut k = 0;
            while rest % p == 0 {
                rest /= p;
                k += 1;
            }
            factors.push((p, k));
        }
        p += 1;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(CrtFrame { modulus: n, factors })
}

pub fn crt_map(frame: &CrtFrame, f: &AffineMap) -> Result<Vec<AffineMap>, HolError> {
    frame.map(f)
}

/// One prime coordinate of a centraliser `C_{Aut(Z_{p^k})}(Z_{p^m})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentralizerFactor {
    pub prime: u64,
    pub k: u32,
    pub m: u32,
    /// Predicted order: `p^{k-m}`, or `2^{k-1}` when `p = 2`, `m = 1`.
    pub order: u64,
    /// Predicted cyclicity: cyclic except for the whole of `Aut(Z_{2^k})`, `k >= 3`.
    pub cyclic: bool,
}

/// `C_{Aut(Z_n)}(N)` for `N = prod Z_{p_i^{m_i}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentralizerInAut {
    pub modulus: u64,
    /// Multipliers fixing `N` pointwise, ascending.
    pub multipliers: Vec<u64>,
    pub factors: Vec<CentralizerFactor>,
}

impl CentralizerInAut {
    pub fn predicted_order(&self) -> u64 {
        self.factors.iter().map(|f| f.order).product()
    }
}

/// Centraliser in `Aut(Z_n)` of the subgroup of order `prod p_i^{m_i}`.
///
/// A multiplier fixes that subgroup pointwise iff it is `1` modulo its order.
pub fn centralizer_in_aut(exponents: &[u32], frame: &CrtFrame) -> Result<CentralizerInAut, HolError> {
    if exponents.len() != frame.factors.len() {
        return Err(HolError::ExponentsOutOfRange(format!(
            "expected {} exponents, got {}",
            frame.factors.len(),
            exponents.len()
        )));
    }
    let mut factors = Vec::new();
    let mut sub_order = 1u64;
    for (&(p, k), &m) in frame.factors.iter().zip(exponents) {
        if m < 1 || m > k {
            return Err(HolError::ExponentsOutOfRange(format!("need 1 <= m <= {k} for p = {p}, got {m}")));
        }
        sub_order *= p.pow(m);
        let (order, cyclic) = if p == 2 && m == 1 {
            (1u64 << (k - 1), k < 3)
        } else {
            (p.pow(k - m), true)
        };
        factors.push(CentralizerFactor {
            prime: p,
            k,
            m,
            order,
            cyclic,
        });
    }
    let multipliers = units(frame.modulus)
        .into_iter()
        .filter(|u| u % sub_order == 1 % sub_order)
        .collect();
    Ok(CentralizerInAut {
        modulus: frame.modulus,
        multipliers,
        factors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str, n: u32) -> HolElem2 {
        HolElem2::parse(s, n).unwrap()
    }

    /// Pointwise "apply p then q".
    fn then(p: &[u64], q: &[u64]) -> Vec<u64> {
        p.iter().map(|&i| q[i as usize]).collect()
    }

    fn images(e: &HolElem2) -> Vec<u64> {
        (0..e.modulus()).map(|g| e.act(g)).collect()
    }

    #[test]
    fn compose_matches_pointwise_composition() {
        let n = 4;
        let ay = h("a*y", n);
        // a*y then a*y, computed on points
        let direct = then(&images(&ay), &images(&ay));
        let prod = ay.compose(&ay).unwrap();
        assert_eq!(images(&prod), direct);
        assert_eq!(prod, HolElem2::new(n, 14, false, 2).unwrap());
        assert_eq!(prod.to_string(), "a^14*y^2");
    }

    #[test]
    fn identity_and_involution() {
        let n = 5;
        let e = HolElem2::identity(n).unwrap();
        for g in HolElem2::all(n).unwrap().step_by(7) {
            assert_eq!(g.compose(&e).unwrap(), g);
            assert_eq!(e.compose(&g).unwrap(), g);
        }
        let ax = h("a*x", n);
        assert!(ax.compose(&ax).unwrap().is_identity());
        assert!(ax.power(2).is_identity());
    }

    #[test]
    fn modulus_mismatch_is_reported() {
        let p = HolElem2::a(3).unwrap();
        let q = HolElem2::a(4).unwrap();
        assert!(matches!(p.compose(&q), Err(HolError::ModulusMismatch(8, 16))));
        let f = AffineMap::translation(6, 1);
        let g = AffineMap::translation(8, 1);
        assert!(f.compose(&g).is_err());
    }

    #[test]
    fn power_examples() {
        assert_eq!(h("a*y", 4).power(2), HolElem2::new(4, 14, false, 2).unwrap());
        let n = 4;
        let q = h(&format!("a*x*y^{}", 1 << (n - 3)), n);
        assert_eq!(q.power(2), HolElem2::new(n, 1 << (n - 1), false, 0).unwrap());
        let g = h("a^3*x*y", 5);
        assert_eq!(g.power(-1), g.inverse());
        assert_eq!(g.power(-3), g.inverse().power(3));
        assert!(g.power(g.order() as i64).is_identity());
    }

    #[test]
    fn order_examples() {
        assert_eq!(HolElem2::a(4).unwrap().order(), 16);
        assert_eq!(h("a^2*y^2", 4).order(), 8);
        assert_eq!(h("a*x*y", 4).order(), 8);
        assert_eq!(HolElem2::identity(4).unwrap().order(), 1);
    }

    #[test]
    fn normal_form_examples() {
        let g = h("a^6*x*y", 4);
        let (nf, rho) = g.conj_normal_form();
        assert_eq!(nf, h("a^2*x*y", 4));
        assert_eq!(rho.translation, 0);
        assert_eq!(rho.compose(&g).unwrap().compose(&rho.inverse()).unwrap(), nf);
        let (nf, _) = h("a^3", 4).conj_normal_form();
        assert_eq!(nf, HolElem2::a(4).unwrap());
        let (nf, rho) = h("x*y", 4).conj_normal_form();
        assert_eq!(nf, h("x*y", 4));
        assert!(rho.is_identity());
    }

    #[test]
    fn action_examples() {
        for n in 3..=12 {
            let e = HolElem2::new(n, 1 << (n - 1), false, 1 << (n - 3)).unwrap();
            assert_eq!(e.act(1), 1);
            assert_eq!(h("a*x", n).act(0), (1 << n) - 1);
            assert_eq!(HolElem2::identity(n).unwrap().act(5), 5);
        }
    }

    #[test]
    fn unit_split_round_trips() {
        for n in 3..=9 {
            let m = Modulus2n::new(n).unwrap();
            for u in (1..m.modulus()).step_by(2) {
                let (neg, c) = split_unit(u, n).unwrap();
                let back = HolElem2::new(n, 0, neg, c).unwrap().multiplier();
                assert_eq!(back, u);
            }
        }
        assert!(split_unit(4, 5).is_err());
    }

    #[test]
    fn stabilizer_generators_fix_the_point() {
        for n in 3..=8 {
            for g in 0..(1u64 << n) {
                let [s1, s2] = point_stabilizer(g, n).unwrap();
                assert_eq!(s1.act(g), g);
                assert_eq!(s2.act(g), g);
            }
        }
        let [s1, s2] = point_stabilizer(0, 5).unwrap();
        assert_eq!((s1, s2), (HolElem2::x(5).unwrap(), HolElem2::y(5).unwrap()));
        assert!(point_stabilizer(32, 5).is_err());
    }

    #[test]
    fn parse_and_print() {
        let g = h("a^3*x*y^2", 5);
        assert_eq!((g.translation, g.negate, g.five_power), (3, true, 2));
        assert_eq!(g.to_string(), "a^3*x*y^2");
        assert_eq!(h("1", 4).to_string(), "1");
        assert_eq!(h("a^-1", 4).translation, 15);
        // x*a = a^{-1}*x
        assert_eq!(h("x*a", 4), h("a^-1*x", 4));
        assert!(HolElem2::parse("b", 4).is_err());
        assert!(HolElem2::parse("a^", 4).is_err());
        assert!(HolElem2::parse("a", 2).is_err());
    }

    #[test]
    fn crt_examples() {
        let f = crt_decompose(12).unwrap();
        assert_eq!(f.prime_powers(), vec![4, 3]);
        let coords = f.map(&AffineMap::translation(12, 1)).unwrap();
        assert_eq!(coords, vec![AffineMap::translation(4, 1), AffineMap::translation(3, 1)]);
        let f = crt_decompose(24).unwrap();
        let c = f.map(&AffineMap::new(24, 0, 5).unwrap()).unwrap();
        assert_eq!((c[0].multiplier, c[1].multiplier), (5, 2));
        assert_eq!(f.unmap(&c).unwrap(), AffineMap::new(24, 0, 5).unwrap());
    }

    #[test]
    fn crt_map_is_a_homomorphism() {
        let frame = crt_decompose(360).unwrap();
        let us = units(360);
        for (i, &u) in us.iter().enumerate().step_by(5) {
            let f = AffineMap::new(360, (i * 37) as u64, u).unwrap();
            let g = AffineMap::new(360, (i * 11 + 3) as u64, us[(i * 7) % us.len()]).unwrap();
            let lhs = frame.map(&f.compose(&g).unwrap()).unwrap();
            let rhs: Vec<_> = frame
                .map(&f)
                .unwrap()
                .iter()
                .zip(frame.map(&g).unwrap())
                .map(|(x, y)| x.compose(&y).unwrap())
                .collect();
            assert_eq!(lhs, rhs);
            for pt in [0u64, 1, 77, 359] {
                let split: Vec<u64> = frame.map(&f).unwrap().iter().zip(frame.split(pt)).map(|(c, p)| c.act(p)).collect();
                assert_eq!(frame.combine(&split), f.act(pt));
            }
        }
    }

    #[test]
    fn centralizer_examples() {
        let c = centralizer_in_aut(&[1], &crt_decompose(9).unwrap()).unwrap();
        assert_eq!(c.multipliers.len(), 3);
        assert_eq!(c.predicted_order(), 3);
        let c = centralizer_in_aut(&[1], &crt_decompose(16).unwrap()).unwrap();
        assert_eq!(c.multipliers, units(16));
        assert!(!c.factors[0].cyclic);
        let c = centralizer_in_aut(&[2], &crt_decompose(16).unwrap()).unwrap();
        assert_eq!(c.multipliers, vec![1, 5, 9, 13]);
        assert!(c.factors[0].cyclic);
        assert_eq!(unit_order(5, 16), 4);
        assert!(centralizer_in_aut(&[5], &crt_decompose(16).unwrap()).is_err());
        assert!(centralizer_in_aut(&[0], &crt_decompose(16).unwrap()).is_err());
        assert!(centralizer_in_aut(&[1, 1], &crt_decompose(16).unwrap()).is_err());
    }

    #[test]
    fn affine_from_perm_round_trip() {
        for u in units(12) {
            let f = AffineMap::new(12, 5, u).unwrap();
            assert_eq!(AffineMap::from_perm(&f.to_perm()), Some(f));
        }
        let swap = Perm::from_images(vec![1, 0, 2, 3]).unwrap();
        assert_eq!(AffineMap::from_perm(&swap), None);
    }
}
