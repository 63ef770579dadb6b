//! Circulant graphs `Cay(Z_n, S)`: automorphism groups, normality, regular
//! cyclic subgroups of the automorphism group, W-subgroups and explicit
//! non-normality witnesses.

use std::collections::{BTreeMap, HashSet};

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::holomorph::{crt_decompose, units, AffineMap, HolElem2, HolError};
use crate::permgroup::{regular_subgroups, Perm};
use crate::regular_classify::{distinct_representatives, HolSubgroup, RegularType};

/// Default largest number of vertices for automorphism computations.
pub const DEFAULT_MAX_DEGREE: usize = 32;
/// Adjacency rows are single machine words.
pub const HARD_MAX_DEGREE: usize = 64;
/// Environment variable overriding [`DEFAULT_MAX_DEGREE`].
pub const MAX_DEGREE_ENV: &str = "HOLOCIRC_MAX_DEGREE";

#[derive(Debug, Error)]
pub enum CirculantError {
    #[error("modulus {0} unsupported (need 2 <= n <= {HARD_MAX_DEGREE})")]
    BadModulus(usize),
    #[error("0 may not be in the connection set")]
    ContainsZero,
    #[error("residue {0} outside Z_{1}")]
    OutOfRange(u64, usize),
    #[error("connection set not inverse-closed: {0} present but {1} missing")]
    NotInverseClosed(u64, u64),
    #[error("cannot parse connection set {0:?}")]
    Parse(String),
    #[error("{n} vertices exceeds the configured bound {bound}")]
    TooLarge { n: usize, bound: usize },
    #[error("automorphism group order overflows 128 bits")]
    OrderOverflow,
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{p}^2 does not divide {n}")]
    PrimeSquareMissing { p: u64, n: usize },
    #[error("2-part 2^{0} of the modulus is too small (need 2^4)")]
    TwoPartTooSmall(u32),
    #[error("mask {0:#x} has bits beyond the {1} pair orbits")]
    BadMask(u64, usize),
    #[error("bad shard {0:?} (expected A/B with A < B)")]
    BadShard(String),
    #[error(transparent)]
    Hol(#[from] HolError),
}

/// The configured bound: `HOLOCIRC_MAX_DEGREE` if set, else the default.
pub fn max_degree() -> usize {
    std::env::var(MAX_DEGREE_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_DEGREE)
        .min(HARD_MAX_DEGREE)
}

/// `Cay(Z_n, S)` with `g ~ g + s` for `s` in `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circulant {
    n: usize,
    set: Vec<u64>,
    rows: Vec<u64>,
}

impl Circulant {
    pub fn new(n: usize, set: impl IntoIterator<Item = u64>) -> Result<Self, CirculantError> {
        if !(2..=HARD_MAX_DEGREE).contains(&n) {
            return Err(CirculantError::BadModulus(n));
        }
        let mut set: Vec<u64> = set.into_iter().collect();
        set.sort_unstable();
        set.dedup();
        let mut mask = 0u64;
        for &s in &set {
            if s as usize >= n {
                return Err(CirculantError::OutOfRange(s, n));
            }
            if s == 0 {
                return Err(CirculantError::ContainsZero);
            }
            mask |= 1 << s;
        }
        for &s in &set {
            let inv = (n as u64 - s) % n as u64;
            if mask >> inv & 1 == 0 {
                return Err(CirculantError::NotInverseClosed(s, inv));
            }
        }
        let rows = (0..n)
            .map(|g| set.iter().fold(0u64, |r, &s| r | 1 << ((g + s as usize) % n)))
            .collect();
        Ok(Self { n, set, rows })
    }

    /// Representatives `1..=n/2` of the orbits `{s, n - s}`.
    pub fn pair_orbits(n: usize) -> Vec<u64> {
        (1..=(n / 2) as u64).collect()
    }

    /// The circulant whose connection set is the union of the pair orbits
    /// selected by `mask` (bit `i` selects `{i + 1, n - i - 1}`).
    pub fn from_pair_mask(n: usize, mask: u64) -> Result<Self, CirculantError> {
        let orbits = Self::pair_orbits(n);
        if orbits.len() < 64 && mask >> orbits.len() != 0 {
            return Err(CirculantError::BadMask(mask, orbits.len()));
        }
        let set = orbits
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .flat_map(|(_, &s)| [s, n as u64 - s]);
        Self::new(n, set)
    }

    /// Parses `"1,3,13,15"`; an empty string is the empty set.
    pub fn parse_set(input: &str) -> Result<Vec<u64>, CirculantError> {
        let input = input.trim().trim_start_matches('{').trim_end_matches('}');
        if input.trim().is_empty() {
            return Ok(Vec::new());
        }
        input
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| CirculantError::Parse(input.to_string())))
            .collect()
    }

    pub fn modulus(&self) -> usize {
        self.n
    }

    pub fn connection_set(&self) -> &[u64] {
        &self.set
    }

    pub fn pair_mask(&self) -> u64 {
        self.set
            .iter()
            .filter(|&&s| s as usize <= self.n / 2)
            .fold(0, |m, &s| m | 1 << (s - 1))
    }

    /// Neighbourhood of `v` as a bitset.
    pub fn row(&self, v: usize) -> u64 {
        self.rows[v]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    pub fn valency(&self) -> usize {
        self.set.len()
    }

    /// `<S> = Z_n`.
    pub fn is_connected(&self) -> bool {
        self.set.iter().fold(self.n as u64, |g, &s| g.gcd(&s)) == 1
    }

    /// `S` empty or `{n/2}`.
    pub fn is_degenerate(&self) -> bool {
        self.set.is_empty() || (self.set.len() == 1 && 2 * self.set[0] == self.n as u64)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| ((u + 1)..self.n).filter(move |&v| self.adjacent(u, v)).map(move |v| (u, v)))
            .collect()
    }

    /// One `"u v"` line per edge.
    pub fn edge_list(&self) -> String {
        self.edges().iter().map(|(u, v)| format!("{u} {v}\n")).collect()
    }

    pub fn is_automorphism(&self, images: &[usize]) -> bool {
        (0..self.n).all(|v| map_bits(self.rows[v], images) == self.rows[images[v]])
    }

    /// Multipliers `m` with `mS = S`, ascending.
    pub fn aut_g_s(&self) -> Vec<u64> {
        let n = self.n as u64;
        let set: HashSet<u64> = self.set.iter().copied().collect();
        units(n)
            .into_iter()
            .filter(|&m| self.set.iter().all(|&s| set.contains(&(s * m % n))))
            .collect()
    }

    pub fn automorphism_group(&self) -> Result<AutResult, CirculantError> {
        self.automorphism_group_bounded(max_degree())
    }

    /// Automorphism group by individualisation and refinement. The base
    /// starts at vertex 0 and the rotation seeds the generating set.
    pub fn automorphism_group_bounded(&self, bound: usize) -> Result<AutResult, CirculantError> {
        if self.n > bound.min(HARD_MAX_DEGREE) {
            return Err(CirculantError::TooLarge { n: self.n, bound });
        }
        let n = self.n;
        let (root, _) = refine(&self.rows, vec![(0..n).collect()]);
        let mut parts = vec![root];
        let mut traces = Vec::new();
        let mut base = Vec::new();
        loop {
            let cur = parts.last().expect("non-empty");
            let Some(cell) = cur.iter().find(|c| c.len() > 1) else {
                break;
            };
            let b = if base.is_empty() { 0 } else { cell[0] };
            let (next, trace) = individualize(&self.rows, cur, b);
            base.push(b);
            traces.push(trace);
            parts.push(next);
        }
        let mut gens = vec![Perm::rotation(n)];
        let mut orbit_sizes = vec![0u128; base.len()];
        for i in (0..base.len()).rev() {
            let cell = parts[i].iter().find(|c| c.contains(&base[i])).expect("partition").clone();
            let mut orbit = stabiliser_orbit(&gens, &base[..i], base[i], n);
            for &c in &cell {
                if orbit[c] {
                    continue;
                }
                let (target, trace) = individualize(&self.rows, &parts[i], c);
                if trace != traces[i] {
                    continue;
                }
                if let Some(images) = self.search(parts[i + 1].clone(), target) {
                    gens.push(Perm::from_images(images).expect("bijection"));
                    orbit = stabiliser_orbit(&gens, &base[..i], base[i], n);
                }
            }
            orbit_sizes[i] = orbit.iter().filter(|&&b| b).count() as u128;
        }
        let order = orbit_sizes
            .iter()
            .try_fold(1u128, |acc, &s| acc.checked_mul(s))
            .ok_or(CirculantError::OrderOverflow)?;
        let aut_g_s = self.aut_g_s();
        let affine = gens.iter().all(|g| AffineMap::from_perm(g).is_some());
        let within_holomorph = affine && order == (n * aut_g_s.len()) as u128;
        Ok(AutResult {
            order,
            generators: gens,
            base,
            within_holomorph,
        })
    }

    fn search(&self, source: Vec<Vec<usize>>, target: Vec<Vec<usize>>) -> Option<Vec<usize>> {
        let Some(k) = source.iter().position(|c| c.len() > 1) else {
            let mut images = vec![0; self.n];
            for (s, t) in source.iter().zip(&target) {
                images[s[0]] = t[0];
            }
            return self.is_automorphism(&images).then_some(images);
        };
        let v = source[k][0];
        let (next_source, trace) = individualize(&self.rows, &source, v);
        for &w in &target[k] {
            let (next_target, t) = individualize(&self.rows, &target, w);
            if t == trace {
                if let Some(found) = self.search(next_source.clone(), next_target) {
                    return Some(found);
                }
            }
        }
        None
    }

    /// Normality of the translations: every automorphism generator
    /// conjugates the rotation to a rotation.
    pub fn is_normal_cayley(&self) -> Result<bool, CirculantError> {
        Ok(self.automorphism_group()?.normalises_translations(self.n))
    }

    /// Subgroups `<d>`, `1 < d < n`, `d | n`, such that `S \ <d>` is a union
    /// of `<d>`-cosets.
    pub fn w_subgroups(&self) -> WSubgroups {
        let n = self.n as u64;
        let set: HashSet<u64> = self.set.iter().copied().collect();
        let divisors = (2..n)
            .filter(|d| n % d == 0)
            .filter(|&d| self.set.iter().filter(|&&s| s % d != 0).all(|&s| set.contains(&((s + d) % n))))
            .collect();
        WSubgroups {
            divisors,
            degenerate: self.set.is_empty(),
        }
    }

    /// The affine maps `g -> (g + t) m`, `m` in `Aut(G, S)`.
    pub fn normal_automorphisms(&self) -> Vec<AffineMap> {
        let n = self.n as u64;
        self.aut_g_s()
            .into_iter()
            .flat_map(|m| (0..n).map(move |t| AffineMap::new(n, t, m).expect("unit")))
            .collect()
    }

    /// NNN decision: normal for the translations and some regular cyclic
    /// subgroup of the automorphism group is not normal.
    pub fn nnn_verdict(&self) -> Result<NnnVerdict, CirculantError> {
        let aut = self.automorphism_group()?;
        let normal = aut.normalises_translations(self.n);
        if !normal {
            return Ok(NnnVerdict {
                is_normal_for_translations: false,
                regular_cyclic_subgroups: Vec::new(),
                nnn: false,
                distinct_copy: false,
                nonconjugate_copy: false,
                witness: None,
            });
        }
        let n = self.n as u64;
        let ambient = self.normal_automorphisms();
        let multipliers = self.aut_g_s();
        let mut seen = HashSet::new();
        let mut copies = Vec::new();
        for f in &ambient {
            if f.order() != n || f.to_perm().cycle_lengths().len() != 1 {
                continue;
            }
            // the element sending 0 to 1 determines the subgroup
            let key = (1..=n)
                .map(|k| f.power(k as i64))
                .find(|g| g.act(0) == 1 % n)
                .expect("regular");
            if !seen.insert(key) {
                continue;
            }
            copies.push(self.cyclic_copy(key, &ambient, &multipliers)?);
        }
        copies.sort_by_key(|c| (c.generator.multiplier, c.generator.translation));
        let rotation = AffineMap::translation(n, 1);
        let normal_copy = copies.iter().find(|c| c.normal).map(|c| c.generator);
        let abnormal = copies.iter().find(|c| !c.normal).map(|c| c.generator);
        Ok(NnnVerdict {
            is_normal_for_translations: true,
            nnn: abnormal.is_some(),
            distinct_copy: copies.iter().any(|c| c.generator != rotation),
            nonconjugate_copy: copies.iter().any(|c| !c.conjugate_to_translations),
            witness: normal_copy.zip(abnormal),
            regular_cyclic_subgroups: copies,
        })
    }

    fn cyclic_copy(&self, generator: AffineMap, ambient: &[AffineMap], multipliers: &[u64]) -> Result<CyclicCopy, CirculantError> {
        let n = self.n as u64;
        let member = |h: &AffineMap| {
            // the unique element of <generator> sending 0 to h(0)
            (0..n)
                .map(|k| generator.power(k as i64))
                .any(|g| g == *h)
        };
        let intersection = (1..=n)
            .find(|&d| n % d == 0 && member(&AffineMap::translation(n, d)))
            .expect("identity is a member");
        let conj_gens: Vec<AffineMap> = std::iter::once(AffineMap::translation(n, 1))
            .chain(multipliers.iter().map(|&m| AffineMap::new(n, 0, m).expect("unit")))
            .collect();
        let normal = conj_gens
            .iter()
            .all(|w| member(&generator.conjugate_by(w).expect("same modulus")));
        let rotation = AffineMap::translation(n, 1);
        let conjugate_to_translations = ambient
            .iter()
            .any(|w| member(&rotation.conjugate_by(w).expect("same modulus")));
        let rtype = if n.is_power_of_two() && (8..=256).contains(&n) {
            hol_cyclic_type(generator)?
        } else {
            None
        };
        Ok(CyclicCopy {
            generator,
            intersection,
            normal,
            conjugate_to_translations,
            rtype,
        })
    }

    /// Regular abelian subgroups of `Z_n : Aut(G, S)`.
    pub fn abelian_regular_subgroups(&self) -> Vec<Vec<Perm>> {
        let ambient: Vec<Perm> = self.normal_automorphisms().iter().map(|f| f.to_perm()).collect();
        regular_subgroups(self.n, &ambient, true)
    }

    /// The θ map for an odd prime `p` with `p^2 | n`.
    ///
    /// Precondition: the multiplier `u` with `u = 1 + p^{k-1}` mod `p^k` and
    /// `u = 1` on the complementary factor preserves `S`. Then θ adds
    /// `(n/p^k) p^{k-1}` to every `g = 2` mod `p` and fixes the rest.
    pub fn theta_witness_p_odd(&self, p: u64) -> Result<Option<ThetaWitness>, CirculantError> {
        let n = self.n as u64;
        if p < 3 || p % 2 == 0 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(CirculantError::NotOddPrime(p));
        }
        if n % (p * p) != 0 {
            return Err(CirculantError::PrimeSquareMissing { p, n: self.n });
        }
        let frame = crt_decompose(n)?;
        let (_, k) = *frame.factors.iter().find(|(q, _)| *q == p).expect("p divides n");
        let q = p.pow(k);
        let rest = n / q;
        let coords: Vec<u64> = frame
            .factors
            .iter()
            .map(|&(r, _)| if r == p { 1 + p.pow(k - 1) } else { 1 })
            .collect();
        let multiplier = frame.combine(&coords);
        let shift = rest * p.pow(k - 1);
        let images: Vec<usize> = (0..n)
            .map(|g| if g % p == 2 { ((g + shift) % n) as usize } else { g as usize })
            .collect();
        Ok(self.certify(ThetaKind::OddPrime { p }, multiplier, images))
    }

    /// The θ map for the 2-part `2^k` of `n`, `k >= 4`.
    ///
    /// Precondition: the multiplier equal to `5^{2^{k-4}}` mod `2^k` and to 1
    /// on the odd part preserves `S`. Then θ adds `n/2` to every `g = 2`
    /// mod 4 and fixes the rest.
    pub fn theta_witness_2part(&self) -> Result<Option<ThetaWitness>, CirculantError> {
        let n = self.n as u64;
        let k = n.trailing_zeros();
        if k < 4 {
            return Err(CirculantError::TwoPartTooSmall(k));
        }
        let frame = crt_decompose(n)?;
        let two_k = 1u64 << k;
        let five_power = crate::numtheory::pow5(1 << (k - 4), k).map_err(HolError::from)?;
        let coords: Vec<u64> = frame
            .factors
            .iter()
            .map(|&(r, _)| if r == 2 { five_power % two_k } else { 1 })
            .collect();
        let multiplier = frame.combine(&coords);
        let images: Vec<usize> = (0..n)
            .map(|g| if g % 4 == 2 { ((g + n / 2) % n) as usize } else { g as usize })
            .collect();
        Ok(self.certify(ThetaKind::TwoPart { k }, multiplier, images))
    }

    fn certify(&self, kind: ThetaKind, multiplier: u64, images: Vec<usize>) -> Option<ThetaWitness> {
        let n = self.n as u64;
        let set: HashSet<u64> = self.set.iter().copied().collect();
        if !self.set.iter().all(|&s| set.contains(&(s * multiplier % n))) {
            return None;
        }
        let aut_g_s = self.aut_g_s();
        let as_multiplier = AffineMap::from_perm(&Perm::from_images(images.clone()).expect("bijection"))
            .filter(|f| f.translation == 0)
            .map(|f| f.multiplier);
        Some(ThetaWitness {
            kind,
            multiplier,
            edge_preserving: self.is_automorphism(&images),
            fixes_zero: images[0] == 0,
            fixes_one: images[1 % self.n] == 1 % self.n,
            outside_aut_g_s: as_multiplier.is_none_or(|m| !aut_g_s.contains(&m)),
            images,
        })
    }

    /// All θ witnesses whose constructions apply to `n`.
    pub fn theta_witnesses(&self) -> Vec<ThetaWitness> {
        let n = self.n as u64;
        let mut out = Vec::new();
        if let Ok(frame) = crt_decompose(n) {
            for &(p, k) in &frame.factors {
                if p > 2 && k >= 2 {
                    if let Ok(Some(w)) = self.theta_witness_p_odd(p) {
                        out.push(w);
                    }
                }
            }
        }
        if n.trailing_zeros() >= 4 {
            if let Ok(Some(w)) = self.theta_witness_2part() {
                out.push(w);
            }
        }
        out
    }
}

fn map_bits(bits: u64, images: &[usize]) -> u64 {
    let mut out = 0u64;
    let mut b = bits;
    while b != 0 {
        let v = b.trailing_zeros() as usize;
        out |= 1 << images[v];
        b &= b - 1;
    }
    out
}

/// Orbit of `point` under the generators fixing `prefix` pointwise.
fn stabiliser_orbit(gens: &[Perm], prefix: &[usize], point: usize, n: usize) -> Vec<bool> {
    let fixing: Vec<&Perm> = gens.iter().filter(|g| prefix.iter().all(|&b| g.image(b) == b)).collect();
    let mut seen = vec![false; n];
    seen[point] = true;
    let mut stack = vec![point];
    while let Some(p) = stack.pop() {
        for g in &fixing {
            let q = g.image(p);
            if !seen[q] {
                seen[q] = true;
                stack.push(q);
            }
        }
    }
    seen
}

/// Equitable refinement. Cells are split by the number of neighbours in a
/// splitter cell, groups ordered by that count; the trace records every
/// split so that two refinements can be compared.
fn refine(rows: &[u64], mut cells: Vec<Vec<usize>>) -> (Vec<Vec<usize>>, Vec<u32>) {
    let mut trace = Vec::new();
    let mut si = 0;
    while si < cells.len() {
        let splitter = cells[si].iter().fold(0u64, |m, &v| m | 1 << v);
        let mut next = Vec::with_capacity(cells.len() + 1);
        for (ci, cell) in cells.iter().enumerate() {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(u32, usize)> = cell.iter().map(|&v| ((rows[v] & splitter).count_ones(), v)).collect();
            keyed.sort_unstable();
            let mut start = 0;
            let before = next.len();
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|&(_, v)| v).collect());
                    if next.len() - before > 1 || i < keyed.len() {
                        trace.extend([si as u32, ci as u32, keyed[start].0, (i - start) as u32]);
                    }
                    start = i;
                }
            }
        }
        if next.len() != cells.len() {
            cells = next;
            si = 0;
        } else {
            si += 1;
        }
    }
    trace.push(u32::MAX);
    (cells, trace)
}

fn individualize(rows: &[u64], cells: &[Vec<usize>], v: usize) -> (Vec<Vec<usize>>, Vec<u32>) {
    let mut out = Vec::with_capacity(cells.len() + 1);
    let mut at = 0;
    for (i, c) in cells.iter().enumerate() {
        if c.contains(&v) {
            at = i;
            out.push(vec![v]);
            let rest: Vec<usize> = c.iter().copied().filter(|&w| w != v).collect();
            if !rest.is_empty() {
                out.push(rest);
            }
        } else {
            out.push(c.clone());
        }
    }
    let (refined, mut trace) = refine(rows, out);
    trace.insert(0, at as u32);
    (refined, trace)
}

fn hol_cyclic_type(generator: AffineMap) -> Result<Option<RegularType>, CirculantError> {
    let n = generator.modulus.trailing_zeros();
    let h = HolElem2::from_affine(&generator)?;
    let sub = HolSubgroup::generate(n, vec![h]).map_err(|e| match e {
        crate::regular_classify::ClassifyError::Hol(h) => CirculantError::Hol(h),
        other => CirculantError::Parse(other.to_string()),
    })?;
    let reps = distinct_representatives(n).map_err(|e| CirculantError::Parse(e.to_string()))?;
    let hol: Vec<HolElem2> = HolElem2::all(n)?.collect();
    Ok(reps
        .iter()
        .filter(|(t, _)| t.is_cyclic())
        .find(|(_, rep)| hol.iter().any(|w| sub.conjugates_into(w, rep)))
        .map(|(t, _)| *t))
}

#[derive(Debug, Clone, Serialize)]
pub struct AutResult {
    pub order: u128,
    pub generators: Vec<Perm>,
    pub base: Vec<usize>,
    /// Every generator is affine and `order = n |Aut(G, S)|`.
    pub within_holomorph: bool,
}

impl AutResult {
    pub fn normalises_translations(&self, n: usize) -> bool {
        let rotation = Perm::rotation(n);
        self.generators.iter().all(|w| {
            let c = rotation.conjugate_by(w);
            let shift = c.image(0);
            (0..n).all(|g| c.image(g) == (g + shift) % n)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WSubgroups {
    /// Generators `d` of the proper non-trivial W-subgroups `<d>`.
    pub divisors: Vec<u64>,
    /// `S` is empty, so every subgroup qualifies vacuously.
    pub degenerate: bool,
}

/// A regular cyclic subgroup of `Z_n : Aut(G, S)`.
#[derive(Debug, Clone, Serialize)]
pub struct CyclicCopy {
    /// The element sending 0 to 1.
    pub generator: AffineMap,
    /// The `d` with the subgroup meeting the translations in `<d>`.
    pub intersection: u64,
    pub normal: bool,
    pub conjugate_to_translations: bool,
    /// Conjugacy type in `Hol(Z_{2^k})`, for `n = 2^k`, `3 <= k <= 8`.
    pub rtype: Option<RegularType>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NnnVerdict {
    pub is_normal_for_translations: bool,
    pub regular_cyclic_subgroups: Vec<CyclicCopy>,
    pub nnn: bool,
    /// Some cyclic regular subgroup other than the translations exists.
    pub distinct_copy: bool,
    /// Some cyclic regular subgroup is not conjugate to the translations.
    pub nonconjugate_copy: bool,
    /// Generators of a normal and a non-normal copy.
    pub witness: Option<(AffineMap, AffineMap)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ThetaKind {
    OddPrime { p: u64 },
    TwoPart { k: u32 },
}

/// An automorphism fixing 0 that is not a multiplier in `Aut(G, S)`.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaWitness {
    #[serde(flatten)]
    pub kind: ThetaKind,
    pub multiplier: u64,
    pub images: Vec<usize>,
    pub edge_preserving: bool,
    pub fixes_zero: bool,
    pub fixes_one: bool,
    pub outside_aut_g_s: bool,
}

impl ThetaWitness {
    pub fn certified(&self) -> bool {
        self.edge_preserving && self.fixes_zero && self.fixes_one && self.outside_aut_g_s
    }
}

/// The exponent comparison behind non-normality of lexicographic products
/// on `2^k` vertices split as `2^t` blocks: `2^{k-t} t + k - t >= 2k - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LexBound {
    pub k: u32,
    pub t: u32,
    pub lhs: u128,
    pub rhs: u128,
}

impl LexBound {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs
    }

    pub fn tight(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn lex_nonnormal_bound(k: u32, t: u32) -> Result<LexBound, CirculantError> {
    if t < 1 || t + 1 > k || k > 120 {
        return Err(CirculantError::Parse(format!("need 1 <= t <= k - 1 <= 119, got k = {k}, t = {t}")));
    }
    Ok(LexBound {
        k,
        t,
        lhs: (1u128 << (k - t)) * t as u128 + (k - t) as u128,
        rhs: 2 * k as u128 - 1,
    })
}

/// A contiguous slice `index/count` of the connection-set masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Shard {
    pub index: u64,
    pub count: u64,
}

impl Shard {
    pub const ALL: Shard = Shard { index: 0, count: 1 };

    pub fn parse(s: &str) -> Result<Self, CirculantError> {
        let bad = || CirculantError::BadShard(s.to_string());
        let (a, b) = s.split_once('/').ok_or_else(bad)?;
        let index: u64 = a.trim().parse().map_err(|_| bad())?;
        let count: u64 = b.trim().parse().map_err(|_| bad())?;
        if count == 0 || index >= count {
            return Err(bad());
        }
        Ok(Self { index, count })
    }

    /// Mask range of this shard out of `total` masks.
    pub fn range(&self, total: u64) -> std::ops::Range<u64> {
        let lo = (total as u128 * self.index as u128 / self.count as u128) as u64;
        let hi = (total as u128 * (self.index + 1) as u128 / self.count as u128) as u64;
        lo..hi
    }
}

/// One scanned circulant.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRecord {
    pub n: usize,
    #[serde(rename = "S")]
    pub connection_set: Vec<u64>,
    pub mask: u64,
    #[serde(serialize_with = "ser_u128")]
    pub aut_order: u128,
    pub normal: bool,
    pub connected: bool,
    pub w_subgroups: Vec<u64>,
    pub nnn: bool,
    pub witnesses: Vec<ThetaWitness>,
    pub degenerate: bool,
}

fn ser_u128<S: serde::Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
    if *v <= u64::MAX as u128 {
        s.serialize_u64(*v as u64)
    } else {
        s.serialize_str(&v.to_string())
    }
}

pub fn scan_record(graph: &Circulant) -> Result<ScanRecord, CirculantError> {
    let aut = graph.automorphism_group()?;
    let normal = aut.normalises_translations(graph.n);
    let nnn = if normal { graph.nnn_verdict()?.nnn } else { false };
    Ok(ScanRecord {
        n: graph.n,
        connection_set: graph.set.clone(),
        mask: graph.pair_mask(),
        aut_order: aut.order,
        normal,
        connected: graph.is_connected(),
        w_subgroups: graph.w_subgroups().divisors,
        nnn,
        witnesses: graph.theta_witnesses(),
        degenerate: graph.is_degenerate(),
    })
}

/// Every inverse-closed connection set of `Z_n` in the shard, ordered by
/// pair-orbit mask.
pub fn scan(n: usize, shard: Shard, connected_only: bool) -> Result<Vec<ScanRecord>, CirculantError> {
    if !(2..=HARD_MAX_DEGREE).contains(&n) {
        return Err(CirculantError::BadModulus(n));
    }
    if n > max_degree() {
        return Err(CirculantError::TooLarge { n, bound: max_degree() });
    }
    let orbits = Circulant::pair_orbits(n).len() as u32;
    let total = 1u64 << orbits;
    let masks: Vec<u64> = shard.range(total).collect();
    let records: Vec<Option<ScanRecord>> = masks
        .par_iter()
        .map(|&mask| {
            let g = Circulant::from_pair_mask(n, mask)?;
            if connected_only && !g.is_connected() {
                return Ok(None);
            }
            scan_record(&g).map(Some)
        })
        .collect::<Result<_, CirculantError>>()?;
    Ok(records.into_iter().flatten().collect())
}

/// Abelian regular subgroups of a normal circulant.
#[derive(Debug, Clone, Serialize)]
pub struct AbelianScanRecord {
    #[serde(rename = "S")]
    pub connection_set: Vec<u64>,
    pub normal: bool,
    /// `|G_R : G_R ∩ H|` for each abelian regular `H`.
    pub indices: Vec<u64>,
    pub nnn: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AbelianScanReport {
    pub n: usize,
    pub records: Vec<AbelianScanRecord>,
    pub normal_count: usize,
    /// Holds when `4 ∤ n`: every normal circulant has one abelian regular subgroup.
    pub unique: Option<bool>,
    /// Every index is a power of 2.
    pub two_power_indices: bool,
    /// Holds when `8 ∤ n`: no circulant is NNN.
    pub no_nnn: Option<bool>,
}

impl AbelianScanReport {
    pub fn passes(&self) -> bool {
        self.unique.unwrap_or(true) && self.two_power_indices && self.no_nnn.unwrap_or(true)
    }
}

/// Abelian regular subgroups of `Aut(Γ)` for every normal circulant `Γ` on `Z_n`.
pub fn abelian_regular_scan(n: usize) -> Result<AbelianScanReport, CirculantError> {
    if n > max_degree() {
        return Err(CirculantError::TooLarge { n, bound: max_degree() });
    }
    let total = 1u64 << Circulant::pair_orbits(n).len();
    let records: Vec<AbelianScanRecord> = (0..total)
        .into_par_iter()
        .map(|mask| {
            let g = Circulant::from_pair_mask(n, mask)?;
            let verdict = g.nnn_verdict()?;
            let indices = if verdict.is_normal_for_translations {
                g.abelian_regular_subgroups()
                    .iter()
                    .map(|h| {
                        let translations = h.iter().filter(|p| AffineMap::from_perm(p).is_some_and(|f| f.is_translation())).count();
                        (n / translations) as u64
                    })
                    .collect()
            } else {
                Vec::new()
            };
            Ok(AbelianScanRecord {
                connection_set: g.set.clone(),
                normal: verdict.is_normal_for_translations,
                indices,
                nnn: verdict.nnn,
            })
        })
        .collect::<Result<_, CirculantError>>()?;
    let normal: Vec<&AbelianScanRecord> = records.iter().filter(|r| r.normal).collect();
    Ok(AbelianScanReport {
        n,
        normal_count: normal.len(),
        unique: (n % 4 != 0).then(|| normal.iter().all(|r| r.indices == [1])),
        two_power_indices: normal.iter().all(|r| r.indices.iter().all(|i| i.is_power_of_two())),
        no_nnn: (n % 8 != 0).then(|| records.iter().all(|r| !r.nnn)),
        records,
    })
}

/// Counts per flag over a set of scan records.
pub fn summarise(records: &[ScanRecord]) -> BTreeMap<&'static str, usize> {
    let mut out = BTreeMap::new();
    out.insert("total", records.len());
    out.insert("normal", records.iter().filter(|r| r.normal).count());
    out.insert("nnn", records.iter().filter(|r| r.nnn).count());
    out.insert("degenerate", records.iter().filter(|r| r.degenerate).count());
    out.insert("with_w_subgroup", records.iter().filter(|r| !r.w_subgroups.is_empty()).count());
    out
}
