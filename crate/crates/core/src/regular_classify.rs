//! Semiregular elements and regular subgroups of `Hol(Z_{2^n})`.
//!
//! Up to conjugacy there are seven families of regular subgroups (see
//! [`RegularType`]). [`enumerate_regular_subgroups`] finds every regular
//! subgroup independently of that list, either by exhaustive search
//! (`n <= 5`) or by searching the two generator shapes a regular subgroup
//! can take (`6 <= n <= 8`), and matches each one to a representative with
//! an explicit conjugating element.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::holomorph::{HolElem2, HolError};
use crate::permgroup::{recognise, IsoType, Perm, PermError, PermSubgroup};

/// Largest exponent for exhaustive subgroup enumeration.
pub const FULL_ENUMERATION_MAX: u32 = 5;
/// Largest exponent for the shape-restricted search.
pub const STRUCTURED_MAX: u32 = 8;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("exponent {n} outside supported range {min}..={max}")]
    ExponentOutOfRange { n: u32, min: u32, max: u32 },
    #[error("parameter t = {t} out of range for n = {n} (need t <= n - 3)")]
    ParameterOutOfRange { t: u32, n: u32 },
    #[error("{0} is not a cyclic type")]
    NotCyclic(RegularType),
    #[error(transparent)]
    Hol(#[from] HolError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

fn check_range(n: u32, min: u32, max: u32) -> Result<(), ClassifyError> {
    if n < min || n > max {
        return Err(ClassifyError::ExponentOutOfRange { n, min, max });
    }
    Ok(())
}

/// Conjugacy-class representatives of regular subgroups, named by shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum RegularType {
    /// `<a>`.
    Translations,
    /// `<a y^{2^t}>`, `0 <= t <= n - 3`.
    Cyclic { t: u32 },
    /// `<a^2, a x>`.
    Dihedral,
    /// `<a^2, a x y^{2^{n-3}}>`.
    Quaternion,
    /// `<a^{2/5} y> x <a x>`, abelian.
    DirectProduct,
    /// `<a^{2/5 + 2^{n-2}} y> : <a x>`.
    Modular,
    /// `<a^2 y^{2^{n-3}}> : <a x>`.
    Quasidihedral,
}

impl std::fmt::Display for RegularType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegularType::Translations => write!(f, "translations"),
            RegularType::Cyclic { t } => write!(f, "cyclic(t={t})"),
            RegularType::Dihedral => write!(f, "dihedral"),
            RegularType::Quaternion => write!(f, "quaternion"),
            RegularType::DirectProduct => write!(f, "direct-product"),
            RegularType::Modular => write!(f, "modular"),
            RegularType::Quasidihedral => write!(f, "quasidihedral"),
        }
    }
}

impl RegularType {
    /// Every type for exponent `n`, cyclic ones ordered by `t`.
    pub fn all(n: u32) -> Vec<RegularType> {
        let mut out = vec![RegularType::Translations];
        out.extend((0..=n.saturating_sub(3)).map(|t| RegularType::Cyclic { t }));
        out.extend([
            RegularType::Dihedral,
            RegularType::Quaternion,
            RegularType::DirectProduct,
            RegularType::Modular,
            RegularType::Quasidihedral,
        ]);
        out
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self, RegularType::Translations | RegularType::Cyclic { .. })
    }

    /// Generators of the representative.
    pub fn generators(&self, n: u32) -> Result<Vec<HolElem2>, ClassifyError> {
        let h = |t: u64, neg: bool, c: u64| HolElem2::new(n, t, neg, c);
        let top_y = 1u64 << n.saturating_sub(3);
        let ring = HolElem2::identity(n)?.ring();
        let two_over_five = ring.mul(2, ring.inverse_odd(5).map_err(HolError::from)?);
        Ok(match *self {
            RegularType::Translations => vec![h(1, false, 0)?],
            RegularType::Cyclic { t } => {
                if t + 3 > n {
                    return Err(ClassifyError::ParameterOutOfRange { t, n });
                }
                vec![h(1, false, 1 << t)?]
            }
            RegularType::Dihedral => vec![h(2, false, 0)?, h(1, true, 0)?],
            RegularType::Quaternion => vec![h(2, false, 0)?, h(1, true, top_y)?],
            RegularType::DirectProduct => vec![h(two_over_five, false, 1)?, h(1, true, 0)?],
            RegularType::Modular => vec![h(two_over_five + (1 << (n - 2)), false, 1)?, h(1, true, 0)?],
            RegularType::Quasidihedral => vec![h(2, false, top_y)?, h(1, true, 0)?],
        })
    }

    /// The `d` with `R ∩ <a> = <a^d>` for the representative.
    pub fn expected_intersection(&self, n: u32) -> u64 {
        match *self {
            RegularType::Translations => 1,
            RegularType::Cyclic { t } => 1 << (n - t - 2),
            RegularType::Dihedral | RegularType::Quaternion => 2,
            RegularType::DirectProduct | RegularType::Modular => 1 << (n - 1),
            RegularType::Quasidihedral => 4,
        }
    }

    /// The isomorphism type the representative should have.
    ///
    /// For `n = 3` the quasidihedral and modular relations
    /// `s^t = s^{|s|/2 -+ 1}` degenerate to `s^t = s` and `s^t = s^{-1}`.
    pub fn expected_iso(&self, n: u32) -> IsoType {
        let order = 1u128 << n;
        match self {
            RegularType::Translations | RegularType::Cyclic { .. } => IsoType::Cyclic(order),
            RegularType::Dihedral => IsoType::Dihedral(order),
            RegularType::Quaternion => IsoType::GeneralizedQuaternion(order),
            RegularType::DirectProduct => IsoType::DirectZ2xCyclic(order),
            RegularType::Modular if n == 3 => IsoType::Dihedral(order),
            RegularType::Modular => IsoType::Modular(order),
            RegularType::Quasidihedral if n == 3 => IsoType::DirectZ2xCyclic(order),
            RegularType::Quasidihedral => IsoType::Quasidihedral(order),
        }
    }
}

/// A subgroup of `Hol(Z_{2^n})` with its elements and a membership bitset
/// indexed by [`HolElem2::index`].
#[derive(Debug, Clone)]
pub struct HolSubgroup {
    n: u32,
    generators: Vec<HolElem2>,
    elements: Vec<HolElem2>,
    members: Vec<u64>,
}

impl PartialEq for HolSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.members == other.members
    }
}

impl Eq for HolSubgroup {}

fn empty_bitset(n: u32) -> Vec<u64> {
    vec![0u64; (HolElem2::group_order(n) as usize).div_ceil(64)]
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn get_bit(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

impl HolSubgroup {
    pub fn generate(n: u32, generators: Vec<HolElem2>) -> Result<Self, ClassifyError> {
        check_range(n, 3, crate::holomorph::MAX_HOL_EXPONENT.min(12))?;
        if let Some(g) = generators.iter().find(|g| g.n != n) {
            return Err(HolError::ModulusMismatch(1 << n, g.modulus()).into());
        }
        Ok(Self::generate_bounded(n, generators, usize::MAX, false).expect("unbounded"))
    }

    /// Closure of `generators`, abandoned (`None`) once it has more than
    /// `limit` elements or, if `semiregular` is set, once a non-identity
    /// element with a fixed point appears.
    pub fn generate_bounded(n: u32, generators: Vec<HolElem2>, limit: usize, semiregular: bool) -> Option<Self> {
        let id = HolElem2::identity(n).expect("valid n");
        let mut members = empty_bitset(n);
        set_bit(&mut members, id.index());
        let mut elements = vec![id];
        let mut i = 0;
        while i < elements.len() {
            let p = elements[i];
            for g in &generators {
                let q = p.compose(g).expect("same n");
                if !get_bit(&members, q.index()) {
                    if semiregular && !is_fixed_point_free(&q) {
                        return None;
                    }
                    set_bit(&mut members, q.index());
                    elements.push(q);
                    if elements.len() > limit {
                        return None;
                    }
                }
            }
            i += 1;
        }
        Some(Self {
            n,
            generators,
            elements,
            members,
        })
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn generators(&self) -> &[HolElem2] {
        &self.generators
    }

    pub fn elements(&self) -> &[HolElem2] {
        &self.elements
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, h: &HolElem2) -> bool {
        h.n == self.n && get_bit(&self.members, h.index())
    }

    /// Order `2^n` and every point reached from 0.
    pub fn is_regular(&self) -> bool {
        let size = 1usize << self.n;
        if self.elements.len() != size {
            return false;
        }
        let mut hit = vec![false; size];
        for e in &self.elements {
            hit[e.act(0) as usize] = true;
        }
        hit.iter().all(|&b| b)
    }

    /// The `d` with `R ∩ <a> = <a^d>`; `2^n` when the intersection is trivial.
    pub fn intersection_exponent(&self) -> u64 {
        self.elements
            .iter()
            .filter(|e| e.is_translation() && e.translation != 0)
            .map(|e| 1u64 << e.translation.trailing_zeros())
            .min()
            .unwrap_or(1 << self.n)
    }

    /// `w^{-1} R w`.
    pub fn conjugate(&self, w: &HolElem2) -> Self {
        let winv = w.inverse();
        let conj = |h: &HolElem2| winv.compose(h).expect("same n").compose(w).expect("same n");
        let mut members = empty_bitset(self.n);
        let elements: Vec<HolElem2> = self.elements.iter().map(conj).collect();
        for e in &elements {
            set_bit(&mut members, e.index());
        }
        Self {
            n: self.n,
            generators: self.generators.iter().map(conj).collect(),
            elements,
            members,
        }
    }

    /// Whether `w^{-1} R w` is contained in `other`; for subgroups of equal
    /// order this is conjugacy with witness `w`.
    pub fn conjugates_into(&self, w: &HolElem2, other: &Self) -> bool {
        let winv = w.inverse();
        self.generators
            .iter()
            .all(|g| other.contains(&winv.compose(g).expect("same n").compose(w).expect("same n")))
    }

    /// Normality in `Hol(Z_{2^n}) = <a, x, y>`, checked on generators.
    pub fn is_normal_in_hol(&self) -> bool {
        let n = self.n;
        let hol_gens = [HolElem2::a(n), HolElem2::x(n), HolElem2::y(n)].map(|g| g.expect("valid n"));
        hol_gens.iter().all(|w| self.conjugates_into(w, self))
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().enumerate().all(|(i, g)| {
            self.generators[i + 1..]
                .iter()
                .all(|h| g.compose(h).expect("same n") == h.compose(g).expect("same n"))
        })
    }

    pub fn iso_type(&self) -> IsoType {
        let id = HolElem2::identity(self.n).expect("valid n");
        recognise(&self.elements, &id, |p, q| p.compose(q).expect("same n"))
    }

    /// The same group as permutations of `Z_{2^n}`.
    pub fn to_perm_subgroup(&self) -> Result<PermSubgroup, PermError> {
        let degree = 1usize << self.n;
        let gens: Vec<Perm> = self.generators.iter().map(|g| g.to_perm()).collect();
        let elements: Vec<Perm> = self.elements.iter().map(|g| g.to_perm()).collect();
        PermSubgroup::from_elements(degree, gens, elements)
    }
}

fn is_fixed_point_free(h: &HolElem2) -> bool {
    // (g + t) u = g  <=>  g (u - 1) = -t u
    let m = h.ring();
    let u = h.multiplier();
    let lhs = m.sub(u, 1);
    let rhs = m.neg(m.mul(h.translation, u));
    // solvable iff the 2-part of (u - 1) divides rhs
    let v = if lhs == 0 { h.n } else { lhs.trailing_zeros() };
    let w = if rhs == 0 { h.n } else { rhs.trailing_zeros() };
    w < v
}

/// Semiregularity of `h` from its conjugacy normal form `a^{2^s} x^b y^c`:
/// with `b = 0` it holds iff `c = 0` and the translation is non-zero or the
/// element is trivial, or `c != 0` and `2^s < 4 c_2`; with `b = 1` it holds
/// iff `s = 0`.
pub fn is_semiregular_closed_form(h: &HolElem2) -> bool {
    if h.is_identity() {
        return true;
    }
    let (nf, _) = h.conj_normal_form();
    if nf.translation == 0 {
        return false;
    }
    let s = nf.translation.trailing_zeros();
    if nf.negate {
        return s == 0;
    }
    if nf.five_power == 0 {
        return true;
    }
    let c2 = 1u64 << nf.five_power.trailing_zeros();
    (1u64 << s) < 4 * c2
}

/// A representative together with its checks.
#[derive(Debug, Clone, Serialize)]
pub struct RepresentativeCheck {
    pub n: u32,
    pub rtype: RegularType,
    pub generators: Vec<HolElem2>,
    pub order: u64,
    pub regular: bool,
    pub iso: IsoType,
    pub expected_iso: IsoType,
    pub intersection: u64,
    pub expected_intersection: u64,
    /// Earlier type whose representative is the same subgroup, if any.
    pub coincides_with: Option<RegularType>,
}

impl RepresentativeCheck {
    pub fn passes(&self) -> bool {
        self.regular && self.iso == self.expected_iso && self.intersection == self.expected_intersection
    }
}

pub fn representative(rtype: RegularType, n: u32) -> Result<HolSubgroup, ClassifyError> {
    check_range(n, 3, crate::holomorph::MAX_HOL_EXPONENT.min(12))?;
    HolSubgroup::generate(n, rtype.generators(n)?)
}

/// Builds and checks every representative for exponent `n`.
pub fn check_representatives(n: u32) -> Result<Vec<RepresentativeCheck>, ClassifyError> {
    let mut built: Vec<(RegularType, HolSubgroup)> = Vec::new();
    let mut out = Vec::new();
    for rtype in RegularType::all(n) {
        let sub = representative(rtype, n)?;
        let coincides_with = built.iter().find(|(_, s)| *s == sub).map(|(t, _)| *t);
        out.push(RepresentativeCheck {
            n,
            rtype,
            generators: sub.generators().to_vec(),
            order: sub.order(),
            regular: sub.is_regular(),
            iso: sub.iso_type(),
            expected_iso: rtype.expected_iso(n),
            intersection: sub.intersection_exponent(),
            expected_intersection: rtype.expected_intersection(n),
            coincides_with,
        });
        built.push((rtype, sub));
    }
    Ok(out)
}

/// Representatives with coinciding subgroups removed (first type kept).
pub fn distinct_representatives(n: u32) -> Result<Vec<(RegularType, HolSubgroup)>, ClassifyError> {
    let mut out: Vec<(RegularType, HolSubgroup)> = Vec::new();
    for rtype in RegularType::all(n) {
        let sub = representative(rtype, n)?;
        if !out.iter().any(|(_, s)| *s == sub) {
            out.push((rtype, sub));
        }
    }
    Ok(out)
}

/// One regular subgroup with its matched representative.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationRecord {
    pub n: u32,
    pub generators: Vec<HolElem2>,
    pub order: u64,
    pub rtype: Option<RegularType>,
    pub iso: IsoType,
    /// The `d` with `R ∩ <a> = <a^d>`.
    pub intersection: u64,
    /// `w` with `w^{-1} R w` equal to the representative of `rtype`.
    pub conjugator: Option<HolElem2>,
    /// Every representative type this subgroup is conjugate to.
    pub matches: Vec<RegularType>,
}

impl ClassificationRecord {
    pub fn subgroup(&self) -> Result<HolSubgroup, ClassifyError> {
        HolSubgroup::generate(self.n, self.generators.clone())
    }

    /// Re-checks the stored conjugator and intersection.
    pub fn verify(&self) -> Result<bool, ClassifyError> {
        let sub = self.subgroup()?;
        if sub.intersection_exponent() != self.intersection {
            return Ok(false);
        }
        match (self.rtype, self.conjugator) {
            (Some(t), Some(w)) => Ok(sub.conjugate(&w) == representative(t, self.n)?),
            _ => Ok(false),
        }
    }
}

/// How regular subgroups were found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Every subgroup of order `2^n`, built by index-two extensions.
    Exhaustive,
    /// Only subgroups `<a^d, h>` and `<a^d, a x, a^e y^c>`.
    Structured,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerationReport {
    pub n: u32,
    pub mode: SearchMode,
    pub regular_count: usize,
    pub records: Vec<ClassificationRecord>,
    /// Number of regular subgroups conjugate to each representative.
    pub class_sizes: BTreeMap<String, usize>,
    /// Representatives equal as subgroups, as `(kept, dropped)`.
    pub coincidences: Vec<(RegularType, RegularType)>,
}

impl EnumerationReport {
    /// Every subgroup matched exactly one distinct representative with a
    /// verified conjugator.
    pub fn all_matched(&self) -> bool {
        self.records
            .iter()
            .all(|r| r.matches.len() == 1 && r.conjugator.is_some())
    }

    pub fn unmatched(&self) -> impl Iterator<Item = &ClassificationRecord> {
        self.records.iter().filter(|r| r.matches.len() != 1)
    }
}

/// Finds all regular subgroups of `Hol(Z_{2^n})` and matches each to a
/// representative. Exhaustive for `3 <= n <= 5`, structured for `6..=8`.
pub fn enumerate_regular_subgroups(n: u32) -> Result<EnumerationReport, ClassifyError> {
    check_range(n, 3, STRUCTURED_MAX)?;
    if n <= FULL_ENUMERATION_MAX {
        exhaustive_report(n)
    } else {
        structured_report(n)
    }
}

fn coincidences(n: u32) -> Result<Vec<(RegularType, RegularType)>, ClassifyError> {
    Ok(check_representatives(n)?
        .into_iter()
        .filter_map(|c| c.coincides_with.map(|k| (k, c.rtype)))
        .collect())
}

/// All subgroups of order `2^n` with every non-identity element fixed point
/// free, i.e. all regular subgroups. Layer `k` holds the semiregular
/// subgroups of order `2^k`; each is `U ∪ Ug` for some `U` in layer `k - 1`
/// normalised by `g` with `g^2 ∈ U`.
pub fn regular_subgroups_exhaustive(n: u32) -> Result<Vec<HolSubgroup>, ClassifyError> {
    check_range(n, 3, FULL_ENUMERATION_MAX)?;
    let size = HolElem2::group_order(n) as usize;
    let all: Vec<HolElem2> = HolElem2::all(n)?.collect();
    let table: Vec<u16> = all
        .iter()
        .flat_map(|p| all.iter().map(move |q| p.compose(q).expect("same n").index() as u16))
        .collect();
    let mul = |i: usize, j: usize| table[i * size + j] as usize;
    let inv: Vec<usize> = all.iter().map(|h| h.inverse().index()).collect();
    let fpf: Vec<bool> = all.iter().map(is_fixed_point_free).collect();
    let id = HolElem2::identity(n)?.index();

    // (members, element indices, generator indices)
    type Layer = Vec<(Vec<u64>, Vec<usize>, Vec<usize>)>;
    let mut start = empty_bitset(n);
    set_bit(&mut start, id);
    let mut layer: Layer = vec![(start, vec![id], vec![])];
    for _ in 0..n {
        let next: Vec<(Vec<u64>, Vec<usize>, Vec<usize>)> = layer
            .par_iter()
            .flat_map_iter(|(bits, elems, gens)| {
                let mut out = Vec::new();
                for g in 0..size {
                    if !fpf[g] || get_bit(bits, g) || !get_bit(bits, mul(g, g)) {
                        continue;
                    }
                    let normalises = gens.iter().all(|&u| get_bit(bits, mul(mul(inv[g], u), g)));
                    if !normalises {
                        continue;
                    }
                    let coset: Vec<usize> = elems.iter().map(|&u| mul(u, g)).collect();
                    if coset.iter().any(|&c| !fpf[c]) {
                        continue;
                    }
                    let mut nb = bits.clone();
                    for &c in &coset {
                        set_bit(&mut nb, c);
                    }
                    let mut ne = elems.clone();
                    ne.extend(coset);
                    let mut ng = gens.clone();
                    ng.push(g);
                    out.push((nb, ne, ng));
                }
                out
            })
            .collect();
        let mut seen = HashSet::new();
        layer = next.into_iter().filter(|(b, _, _)| seen.insert(b.clone())).collect();
    }
    let mut out: Vec<HolSubgroup> = layer
        .into_iter()
        .map(|(bits, elems, gens)| HolSubgroup {
            n,
            generators: gens.iter().map(|&g| all[g]).collect(),
            elements: elems.iter().map(|&e| all[e]).collect(),
            members: bits,
        })
        .collect();
    out.sort_by(|a, b| a.members.cmp(&b.members));
    Ok(out)
}

fn exhaustive_report(n: u32) -> Result<EnumerationReport, ClassifyError> {
    let subgroups = regular_subgroups_exhaustive(n)?;
    let reps = distinct_representatives(n)?;
    let reps: Vec<_> = reps.into_iter().filter(|(_, s)| s.is_regular()).collect();
    let hol: Vec<HolElem2> = HolElem2::all(n)?.collect();
    let records: Vec<ClassificationRecord> = subgroups
        .par_iter()
        .map(|r| {
            let mut matches = Vec::new();
            let mut first: Option<(RegularType, HolElem2)> = None;
            for (t, rep) in &reps {
                if rep.order() != r.order() {
                    continue;
                }
                if let Some(w) = hol.iter().find(|w| r.conjugates_into(w, rep)) {
                    matches.push(*t);
                    first.get_or_insert((*t, *w));
                }
            }
            ClassificationRecord {
                n,
                generators: r.generators().to_vec(),
                order: r.order(),
                rtype: first.map(|(t, _)| t),
                iso: r.iso_type(),
                intersection: r.intersection_exponent(),
                conjugator: first.map(|(_, w)| w),
                matches,
            }
        })
        .collect();
    finish_report(n, SearchMode::Exhaustive, records)
}

fn finish_report(n: u32, mode: SearchMode, records: Vec<ClassificationRecord>) -> Result<EnumerationReport, ClassifyError> {
    let mut class_sizes = BTreeMap::new();
    for r in &records {
        let key = r.rtype.map_or_else(|| "unmatched".to_string(), |t| t.to_string());
        *class_sizes.entry(key).or_insert(0) += 1;
    }
    Ok(EnumerationReport {
        n,
        mode,
        regular_count: records.len(),
        records,
        class_sizes,
        coincidences: coincidences(n)?,
    })
}

/// Regular subgroups of the forms `<a^{2^s}, h>` with `h` semiregular and
/// `<a^{2^s}, a x, a^e y^c>` with `c != 0` and `2 <= e_2 <= 4 c_2`, together
/// with all their conjugates.
pub fn regular_subgroups_structured(n: u32) -> Result<Vec<HolSubgroup>, ClassifyError> {
    check_range(n, 3, STRUCTURED_MAX)?;
    let size = 1usize << n;
    let semiregular: Vec<HolElem2> = HolElem2::all(n)?.filter(is_semiregular_closed_form).collect();
    let ax = HolElem2::new(n, 1, true, 0)?;
    let mut candidates: Vec<Vec<HolElem2>> = Vec::new();
    for s in 0..=n {
        let base = HolElem2::new(n, 1 << s, false, 0)?;
        for h in &semiregular {
            candidates.push(vec![base, *h]);
        }
        for c in 1..(1u64 << (n - 2)) {
            let c2 = 1u64 << c.trailing_zeros();
            for e in 0..(1u64 << n) {
                let e2 = if e == 0 { 1 << n } else { 1u64 << e.trailing_zeros() };
                if (2..=4 * c2).contains(&e2) {
                    candidates.push(vec![base, ax, HolElem2::new(n, e, false, c)?]);
                }
            }
        }
    }
    let found: Vec<HolSubgroup> = candidates
        .into_par_iter()
        .filter_map(|gens| HolSubgroup::generate_bounded(n, gens, size, true))
        .filter(|r| r.is_regular())
        .collect();
    // the shapes are only exhaustive up to conjugacy
    let steps = [HolElem2::a(n)?, HolElem2::x(n)?, HolElem2::y(n)?];
    let mut seen = HashSet::new();
    let mut queue: VecDeque<HolSubgroup> = found.into_iter().filter(|r| seen.insert(r.members.clone())).collect();
    let mut out = Vec::new();
    while let Some(r) = queue.pop_front() {
        for s in &steps {
            let c = r.conjugate(s);
            if seen.insert(c.members.clone()) {
                queue.push_back(c);
            }
        }
        out.push(r);
    }
    out.sort_by(|a, b| a.members.cmp(&b.members));
    Ok(out)
}

/// Every conjugate of `rep` keyed by membership bitset, each with a `w`
/// such that `w^{-1} rep w` is that conjugate.
fn conjugacy_class(rep: &HolSubgroup) -> HashMap<Vec<u64>, HolElem2> {
    let n = rep.n;
    let steps = [HolElem2::a(n), HolElem2::x(n), HolElem2::y(n)].map(|g| g.expect("valid n"));
    let id = HolElem2::identity(n).expect("valid n");
    let mut class = HashMap::from([(rep.members.clone(), id)]);
    let mut queue = VecDeque::from([(rep.clone(), id)]);
    while let Some((sub, w)) = queue.pop_front() {
        for s in &steps {
            let next = sub.conjugate(s);
            if !class.contains_key(&next.members) {
                let ws = w.compose(s).expect("same n");
                class.insert(next.members.clone(), ws);
                queue.push_back((next, ws));
            }
        }
    }
    class
}

fn structured_report(n: u32) -> Result<EnumerationReport, ClassifyError> {
    let subgroups = regular_subgroups_structured(n)?;
    let reps: Vec<_> = distinct_representatives(n)?
        .into_iter()
        .filter(|(_, s)| s.is_regular())
        .collect();
    let classes: Vec<(RegularType, &HolSubgroup, HashMap<Vec<u64>, HolElem2>)> = reps
        .par_iter()
        .map(|(t, rep)| (*t, rep, conjugacy_class(rep)))
        .collect();
    let records: Vec<ClassificationRecord> = subgroups
        .par_iter()
        .map(|r| {
            let mut matches = Vec::new();
            let mut first: Option<(RegularType, HolElem2)> = None;
            for (t, rep, class) in &classes {
                // rep^w = R, so R^{w^{-1}} = rep
                if let Some(w) = class.get(&r.members) {
                    let winv = w.inverse();
                    if r.conjugates_into(&winv, rep) {
                        matches.push(*t);
                        first.get_or_insert((*t, winv));
                    }
                }
            }
            ClassificationRecord {
                n,
                generators: r.generators().to_vec(),
                order: r.order(),
                rtype: first.map(|(t, _)| t),
                iso: r.iso_type(),
                intersection: r.intersection_exponent(),
                conjugator: first.map(|(_, w)| w),
                matches,
            }
        })
        .collect();
    finish_report(n, SearchMode::Structured, records)
}

/// Normality of a cyclic regular subgroup in `Hol(Z_{2^n})`: only `<a>` and
/// `<a y^{2^{n-3}}>` are normal.
pub fn is_normal_cyclic_regular_in_hol(rtype: RegularType, n: u32) -> Result<bool, ClassifyError> {
    match rtype {
        RegularType::Translations => Ok(true),
        RegularType::Cyclic { t } if t + 3 <= n => Ok(t + 3 == n),
        RegularType::Cyclic { t } => Err(ClassifyError::ParameterOutOfRange { t, n }),
        other => Err(ClassifyError::NotCyclic(other)),
    }
}

/// A cyclic regular subgroup with its type found by conjugacy search.
#[derive(Debug, Clone, Serialize)]
pub struct CyclicRegularCheck {
    pub generator: HolElem2,
    pub rtype: Option<RegularType>,
    pub conjugator: Option<HolElem2>,
    pub normal_brute_force: bool,
    pub normal_predicted: Option<bool>,
}

/// Every cyclic regular subgroup of `Hol(Z_{2^n})`, typed by an exhaustive
/// conjugacy search and tested for normality directly.
pub fn cyclic_regular_normality(n: u32) -> Result<Vec<CyclicRegularCheck>, ClassifyError> {
    check_range(n, 3, 7)?;
    let full = 1u64 << n;
    let hol: Vec<HolElem2> = HolElem2::all(n)?.collect();
    let mut seen = HashSet::new();
    let mut cyclic = Vec::new();
    for h in &hol {
        if h.to_perm().order() != full as u128 || !h.to_perm().is_semiregular() {
            continue;
        }
        let sub = HolSubgroup::generate(n, vec![*h])?;
        if seen.insert(sub.members.clone()) {
            cyclic.push(sub);
        }
    }
    let reps: Vec<(RegularType, HolSubgroup)> = distinct_representatives(n)?
        .into_iter()
        .filter(|(t, _)| t.is_cyclic())
        .collect();
    Ok(cyclic
        .par_iter()
        .map(|sub| {
            let found = reps
                .iter()
                .find_map(|(t, rep)| hol.iter().find(|w| sub.conjugates_into(w, rep)).map(|w| (*t, *w)));
            let rtype = found.map(|(t, _)| t);
            CyclicRegularCheck {
                generator: sub.generators[0],
                rtype,
                conjugator: found.map(|(_, w)| w),
                normal_brute_force: sub.is_normal_in_hol(),
                normal_predicted: rtype.and_then(|t| is_normal_cyclic_regular_in_hol(t, n).ok()),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str, n: u32) -> HolElem2 {
        HolElem2::parse(s, n).unwrap()
    }

    fn orbit_semiregular(h: &HolElem2) -> bool {
        h.to_perm().is_semiregular()
    }

    #[test]
    fn semiregular_examples() {
        assert!(is_semiregular_closed_form(&h("a^2*y", 4)));
        assert!(!is_semiregular_closed_form(&h("a^4*y", 4)));
        for n in 3..=8 {
            assert!(!is_semiregular_closed_form(&h("a^2*x", n)));
            assert!(is_semiregular_closed_form(&h("a*x", n)));
        }
        for s in ["a^2*y", "a^4*y", "a^2*x", "a*x*y^3", "a^6*y^2"] {
            let e = h(s, 5);
            assert_eq!(is_semiregular_closed_form(&e), orbit_semiregular(&e), "{s}");
        }
    }

    #[test]
    fn fixed_point_test_agrees_with_action() {
        for n in 3..=5 {
            for e in HolElem2::all(n).unwrap() {
                let direct = (0..e.modulus()).all(|g| e.act(g) != g);
                assert_eq!(is_fixed_point_free(&e), direct, "{e}");
            }
        }
    }

    #[test]
    fn representative_examples() {
        let d = representative(RegularType::Dihedral, 4).unwrap();
        assert_eq!(d.order(), 16);
        assert!(d.is_regular());
        assert_eq!(d.iso_type(), IsoType::Dihedral(16));
        let c = representative(RegularType::Cyclic { t: 0 }, 4).unwrap();
        assert_eq!(c.intersection_exponent(), 4);
        let dp = representative(RegularType::DirectProduct, 4).unwrap();
        assert_eq!(dp.generators()[0], h("a^26*y", 4));
        assert_eq!(dp.generators()[0].translation, 10);
        assert_eq!(dp.intersection_exponent(), 8);
        assert!(matches!(
            RegularType::Cyclic { t: 2 }.generators(4),
            Err(ClassifyError::ParameterOutOfRange { .. })
        ));
    }

    #[test]
    fn representatives_check_out_for_n_at_least_4() {
        for n in 4..=7 {
            for c in check_representatives(n).unwrap() {
                assert!(c.passes(), "{c:?}");
                assert!(c.coincides_with.is_none());
            }
        }
    }

    #[test]
    fn representatives_at_n3() {
        let checks = check_representatives(3).unwrap();
        let q = checks.iter().find(|c| c.rtype == RegularType::Quasidihedral).unwrap();
        assert_eq!(q.coincides_with, Some(RegularType::DirectProduct));
        let m = checks.iter().find(|c| c.rtype == RegularType::Modular).unwrap();
        // a^4 y fixes the point 1
        assert!(!m.regular);
        assert_eq!(h("a^4*y", 3).act(1), 1);
    }

    #[test]
    fn cyclic_normality_closed_form() {
        assert!(is_normal_cyclic_regular_in_hol(RegularType::Translations, 5).unwrap());
        assert!(is_normal_cyclic_regular_in_hol(RegularType::Cyclic { t: 2 }, 5).unwrap());
        assert!(!is_normal_cyclic_regular_in_hol(RegularType::Cyclic { t: 0 }, 5).unwrap());
        assert!(is_normal_cyclic_regular_in_hol(RegularType::Dihedral, 5).is_err());
        assert!(is_normal_cyclic_regular_in_hol(RegularType::Cyclic { t: 3 }, 5).is_err());
    }

    #[test]
    fn enumeration_rejects_out_of_range() {
        assert!(enumerate_regular_subgroups(2).is_err());
        assert!(enumerate_regular_subgroups(9).is_err());
    }

    #[test]
    fn perm_view_agrees() {
        let q = representative(RegularType::Quaternion, 4).unwrap();
        let p = q.to_perm_subgroup().unwrap();
        assert!(p.is_regular());
        assert_eq!(p.iso_type().unwrap(), IsoType::GeneralizedQuaternion(16));
    }
}
