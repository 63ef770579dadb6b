//! Permutation groups on `{0, .., n-1}`: closure, orbits, stabiliser
//! chains, normality and conjugacy tests, and recognition of the 2-groups
//! with a cyclic subgroup of index two.

use std::collections::{HashSet, VecDeque};

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

/// Default cap on the number of elements stored by [`PermSubgroup::closure`].
pub const DEFAULT_ELEMENT_BOUND: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("images do not form a permutation of 0..{0}")]
    NotABijection(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("first group is not contained in the second")]
    NotContained,
    #[error("group elements not enumerated (order {0} above the element bound)")]
    ElementsUnavailable(u128),
}

/// A permutation, stored as the image of each point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(PermError::NotABijection(n));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    /// The rotation `g -> g + 1 mod n`.
    pub fn rotation(n: usize) -> Self {
        Self {
            images: (0..n).map(|g| (g + 1) % n).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Apply `self`, then `other`.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree(), other.degree());
        Self {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Self { images }
    }

    /// `w^{-1} self w`.
    pub fn conjugate_by(&self, w: &Self) -> Self {
        w.inverse().compose(self).compose(w)
    }

    pub fn power(&self, r: u64) -> Self {
        let mut acc = Self::identity(self.degree());
        let mut base = self.clone();
        let mut e = r;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            out.push(len);
        }
        out
    }

    pub fn order(&self) -> u128 {
        self.cycle_lengths().into_iter().fold(1u128, |acc, l| acc.lcm(&(l as u128)))
    }

    pub fn has_fixed_point(&self) -> bool {
        self.images.iter().enumerate().any(|(i, &j)| i == j)
    }

    /// Non-identity with every cycle of the same length.
    pub fn is_semiregular(&self) -> bool {
        let lens = self.cycle_lengths();
        lens.iter().all(|&l| l == lens[0])
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.compose(other) == other.compose(self)
    }
}

#[derive(Debug, Clone)]
struct Level {
    base: usize,
    gens: Vec<Perm>,
    /// `transversal[p]` maps the base point to `p`.
    transversal: Vec<Option<Perm>>,
}

impl Level {
    fn rebuild(&mut self, degree: usize) {
        let mut trans: Vec<Option<Perm>> = vec![None; degree];
        trans[self.base] = Some(Perm::identity(degree));
        let mut queue = VecDeque::from([self.base]);
        while let Some(p) = queue.pop_front() {
            let up = trans[p].clone().expect("queued points are reached");
            for s in &self.gens {
                let q = s.image(p);
                if trans[q].is_none() {
                    trans[q] = Some(up.compose(s));
                    queue.push_back(q);
                }
            }
        }
        self.transversal = trans;
    }

    fn orbit(&self) -> impl Iterator<Item = usize> + '_ {
        self.transversal
            .iter()
            .enumerate()
            .filter_map(|(p, t)| t.as_ref().map(|_| p))
    }

    fn orbit_len(&self) -> usize {
        self.transversal.iter().filter(|t| t.is_some()).count()
    }
}

/// Base and strong generating set from the Schreier–Sims algorithm.
#[derive(Debug, Clone)]
pub struct StabilizerChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    pub fn new(degree: usize, generators: &[Perm]) -> Self {
        let gens: Vec<Perm> = generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut base: Vec<usize> = Vec::new();
        for g in &gens {
            if base.iter().all(|&b| g.image(b) == b) {
                base.push((0..degree).find(|&i| g.image(i) != i).expect("non-identity"));
            }
        }
        let mut levels: Vec<Level> = base
            .iter()
            .enumerate()
            .map(|(i, &b)| Level {
                base: b,
                gens: gens
                    .iter()
                    .filter(|g| base[..i].iter().all(|&c| g.image(c) == c))
                    .cloned()
                    .collect(),
                transversal: Vec::new(),
            })
            .collect();
        for l in &mut levels {
            l.rebuild(degree);
        }
        let mut chain = Self { degree, levels };
        chain.complete();
        chain
    }

    /// Sifts `h` from level `start`; returns the residue and the level where
    /// sifting stopped (`levels.len()` if it passed every level).
    fn strip(&self, mut h: Perm, start: usize) -> (Perm, usize) {
        for (l, level) in self.levels.iter().enumerate().skip(start) {
            let beta = h.image(level.base);
            match &level.transversal[beta] {
                None => return (h, l),
                Some(u) => h = h.compose(&u.inverse()),
            }
        }
        (h, self.levels.len())
    }

    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let iu = i as usize;
            let mut restart = None;
            let orbit: Vec<usize> = self.levels[iu].orbit().collect();
            'search: for &p in &orbit {
                let up = self.levels[iu].transversal[p].clone().expect("orbit point");
                for s in self.levels[iu].gens.clone() {
                    let q = s.image(p);
                    let uq = self.levels[iu].transversal[q].as_ref().expect("orbit closed");
                    let h = up.compose(&s).compose(&uq.inverse());
                    let (r, j) = self.strip(h, iu + 1);
                    if j < self.levels.len() || !r.is_identity() {
                        if j == self.levels.len() {
                            let b = (0..self.degree).find(|&x| r.image(x) != x).expect("non-identity residue");
                            self.levels.push(Level {
                                base: b,
                                gens: Vec::new(),
                                transversal: Vec::new(),
                            });
                        }
                        for l in iu + 1..=j {
                            self.levels[l].gens.push(r.clone());
                            self.levels[l].rebuild(self.degree);
                        }
                        restart = Some(j as isize);
                        break 'search;
                    }
                }
            }
            match restart {
                Some(j) => i = j,
                None => i -= 1,
            }
        }
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit_len() as u128).product()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        if p.degree() != self.degree {
            return false;
        }
        let (r, j) = self.strip(p.clone(), 0);
        j == self.levels.len() && r.is_identity()
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }
}

/// Isomorphism types recognised by [`PermSubgroup::iso_type`]; each carries
/// the group order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "type", content = "order")]
pub enum IsoType {
    Cyclic(u128),
    /// `Z_2 x Z_{m/2}`, abelian and non-cyclic with a cyclic subgroup of index 2.
    DirectZ2xCyclic(u128),
    Dihedral(u128),
    GeneralizedQuaternion(u128),
    /// `<s, t | s^m = t^2 = 1, s^t = s^{m/2 - 1}>`, `m >= 8`.
    Quasidihedral(u128),
    /// `<s, t | s^m = t^2 = 1, s^t = s^{m/2 + 1}>`, `m >= 8`.
    Modular(u128),
    Other(u128),
}

impl IsoType {
    pub fn order(&self) -> u128 {
        match *self {
            IsoType::Cyclic(m)
            | IsoType::DirectZ2xCyclic(m)
            | IsoType::Dihedral(m)
            | IsoType::GeneralizedQuaternion(m)
            | IsoType::Quasidihedral(m)
            | IsoType::Modular(m)
            | IsoType::Other(m) => m,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            IsoType::Cyclic(_) => "cyclic",
            IsoType::DirectZ2xCyclic(_) => "z2-x-cyclic",
            IsoType::Dihedral(_) => "dihedral",
            IsoType::GeneralizedQuaternion(_) => "quaternion",
            IsoType::Quasidihedral(_) => "quasidihedral",
            IsoType::Modular(_) => "modular",
            IsoType::Other(_) => "other",
        }
    }
}

/// A subgroup of `Sym(degree)` given by generators.
#[derive(Debug, Clone)]
pub struct PermSubgroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Option<Vec<Perm>>,
    chain: StabilizerChain,
}

impl PermSubgroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self, PermError> {
        Self::closure(degree, generators, DEFAULT_ELEMENT_BOUND)
    }

    /// Builds the subgroup, storing its elements when there are at most
    /// `bound` of them. The order is always available from the chain.
    pub fn closure(degree: usize, generators: Vec<Perm>, bound: usize) -> Result<Self, PermError> {
        for g in &generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch(g.degree(), degree));
            }
        }
        let chain = StabilizerChain::new(degree, &generators);
        let elements = (chain.order() <= bound as u128).then(|| bfs_elements(degree, &generators));
        Ok(Self {
            degree,
            generators,
            elements,
            chain,
        })
    }

    /// Wraps a known, closed element list (identity first is not required).
    pub fn from_elements(degree: usize, generators: Vec<Perm>, elements: Vec<Perm>) -> Result<Self, PermError> {
        let mut g = Self::closure(degree, generators, 0)?;
        debug_assert_eq!(g.chain.order(), elements.len() as u128);
        g.elements = Some(elements);
        Ok(g)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> Option<&[Perm]> {
        self.elements.as_deref()
    }

    pub fn chain(&self) -> &StabilizerChain {
        &self.chain
    }

    pub fn order(&self) -> u128 {
        self.chain.order()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.chain.contains(p)
    }

    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut out = vec![point];
        let mut i = 0;
        while i < out.len() {
            let p = out[i];
            for g in &self.generators {
                let q = g.image(p);
                if !seen[q] {
                    seen[q] = true;
                    out.push(q);
                }
            }
            i += 1;
        }
        out
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for p in 0..self.degree {
            if !seen[p] {
                let o = self.orbit(p);
                for &q in &o {
                    seen[q] = true;
                }
                out.push(o);
            }
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    /// Every point stabiliser is trivial, i.e. every orbit has size `|S|`.
    pub fn is_semiregular(&self) -> bool {
        let order = self.order();
        self.orbits().iter().all(|o| o.len() as u128 == order)
    }

    pub fn is_regular(&self) -> bool {
        self.is_transitive() && self.order() == self.degree as u128
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .enumerate()
            .all(|(i, g)| self.generators[i + 1..].iter().all(|h| g.commutes_with(h)))
    }

    pub fn is_subgroup_of(&self, other: &Self) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    /// Whether `self` is normal in `other`; errors if it is not a subgroup.
    pub fn is_normal_in(&self, other: &Self) -> Result<bool, PermError> {
        if self.degree != other.degree {
            return Err(PermError::DegreeMismatch(self.degree, other.degree));
        }
        if !self.is_subgroup_of(other) {
            return Err(PermError::NotContained);
        }
        Ok(other
            .generators
            .iter()
            .all(|t| self.generators.iter().all(|s| self.contains(&s.conjugate_by(t)))))
    }

    /// The conjugate subgroup `w^{-1} S w`.
    pub fn conjugate(&self, w: &Perm) -> Result<Self, PermError> {
        let gens = self.generators.iter().map(|g| g.conjugate_by(w)).collect();
        let bound = if self.elements.is_some() { usize::MAX } else { 0 };
        Self::closure(self.degree, gens, bound)
    }

    /// Searches `ambient` for `w` with `w^{-1} S w = T`.
    pub fn are_conjugate(s: &Self, t: &Self, ambient: &Self) -> Result<Option<Perm>, PermError> {
        let elements = ambient.elements().ok_or(PermError::ElementsUnavailable(ambient.order()))?;
        if s.degree != t.degree || s.degree != ambient.degree {
            return Err(PermError::DegreeMismatch(s.degree, t.degree));
        }
        if s.order() != t.order() {
            return Ok(None);
        }
        Ok(elements
            .iter()
            .find(|w| s.generators.iter().all(|g| t.contains(&g.conjugate_by(w))))
            .cloned())
    }

    /// Recognises cyclic groups, `Z_2 x Z_m`, and the four non-abelian
    /// groups with a cyclic subgroup of index two.
    pub fn iso_type(&self) -> Result<IsoType, PermError> {
        let elements = self.elements().ok_or(PermError::ElementsUnavailable(self.order()))?;
        Ok(recognise(elements, &Perm::identity(self.degree), |p, q| p.compose(q)))
    }
}

/// Isomorphism type of a finite group given by its full element list.
///
/// A largest-order element `s` is located (first in list order). When `<s>`
/// has index two and the group is non-abelian, the first element `t` outside
/// `<s>` fixes the type through `t^{-1} s t = s^k` and `t^2`.
pub fn recognise<E, F>(elements: &[E], identity: &E, mul: F) -> IsoType
where
    E: Clone + Eq,
    F: Fn(&E, &E) -> E,
{
    let order = elements.len() as u128;
    let elem_order = |e: &E| {
        let mut k = 1u128;
        let mut p = e.clone();
        while p != *identity {
            p = mul(&p, e);
            k += 1;
        }
        k
    };
    let mut sigma = identity.clone();
    let mut m = 1;
    for e in elements {
        let k = elem_order(e);
        if k > m {
            m = k;
            sigma = e.clone();
        }
    }
    if m == order {
        return IsoType::Cyclic(order);
    }
    if 2 * m != order {
        return IsoType::Other(order);
    }
    let abelian = elements
        .iter()
        .all(|g| elements.iter().all(|h| mul(g, h) == mul(h, g)));
    if abelian {
        return IsoType::DirectZ2xCyclic(order);
    }
    let mut powers = vec![identity.clone()];
    for _ in 1..m {
        let next = mul(powers.last().expect("non-empty"), &sigma);
        powers.push(next);
    }
    let tau = elements.iter().find(|e| !powers.contains(e)).expect("index two");
    let tau_inv = elements
        .iter()
        .find(|e| mul(tau, e) == *identity)
        .expect("closed under inverses");
    let conj = mul(&mul(tau_inv, &sigma), tau);
    let Some(k) = powers.iter().position(|p| *p == conj).map(|k| k as u128) else {
        return IsoType::Other(order);
    };
    let tau2 = mul(tau, tau);
    if k == m - 1 {
        if tau2 == *identity {
            IsoType::Dihedral(order)
        } else if tau2 == powers[(m / 2) as usize] {
            IsoType::GeneralizedQuaternion(order)
        } else {
            IsoType::Other(order)
        }
    } else if m >= 8 && m.is_power_of_two() && k == m / 2 - 1 {
        IsoType::Quasidihedral(order)
    } else if m >= 8 && m.is_power_of_two() && k == m / 2 + 1 {
        IsoType::Modular(order)
    } else {
        IsoType::Other(order)
    }
}

fn bfs_elements(degree: usize, generators: &[Perm]) -> Vec<Perm> {
    let id = Perm::identity(degree);
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() {
        let p = out[i].clone();
        for g in generators {
            let q = p.compose(g);
            if seen.insert(q.clone()) {
                out.push(q);
            }
        }
        i += 1;
    }
    out
}

/// All regular subgroups of `Sym(degree)` contained in the group whose
/// elements are `ambient`. Each is returned as a sorted element list.
///
/// The search grows a semiregular subgroup one generator at a time, always
/// adding an element that sends 0 to the least point not yet reached.
pub fn regular_subgroups(degree: usize, ambient: &[Perm], abelian_only: bool) -> Vec<Vec<Perm>> {
    let candidates: Vec<&Perm> = ambient.iter().filter(|p| !p.has_fixed_point()).collect();
    let mut found: HashSet<Vec<Perm>> = HashSet::new();
    let start = vec![Perm::identity(degree)];
    grow(degree, &candidates, &start, &[], abelian_only, &mut found);
    let mut out: Vec<Vec<Perm>> = found.into_iter().collect();
    out.sort();
    out
}

fn grow(
    degree: usize,
    candidates: &[&Perm],
    elements: &[Perm],
    gens: &[Perm],
    abelian_only: bool,
    found: &mut HashSet<Vec<Perm>>,
) {
    let mut reached = vec![false; degree];
    for e in elements {
        reached[e.image(0)] = true;
    }
    let Some(target) = reached.iter().position(|r| !r) else {
        let mut sorted = elements.to_vec();
        sorted.sort();
        found.insert(sorted);
        return;
    };
    for c in candidates.iter().filter(|c| c.image(0) == target) {
        if abelian_only && !gens.iter().all(|g| g.commutes_with(c)) {
            continue;
        }
        let mut more = gens.to_vec();
        more.push((*c).clone());
        if let Some(closed) = semiregular_closure(degree, elements, &more) {
            grow(degree, candidates, &closed, &more, abelian_only, found);
        }
    }
}

/// Closure of `gens`, or `None` as soon as it contains a non-identity
/// element with a fixed point or exceeds `degree` elements.
fn semiregular_closure(degree: usize, seed: &[Perm], gens: &[Perm]) -> Option<Vec<Perm>> {
    let mut seen: HashSet<Perm> = seed.iter().cloned().collect();
    let mut out = seed.to_vec();
    let mut i = 0;
    while i < out.len() {
        let p = out[i].clone();
        for g in gens {
            let q = p.compose(g);
            if !seen.contains(&q) {
                if q.has_fixed_point() && !q.is_identity() {
                    return None;
                }
                seen.insert(q.clone());
                out.push(q);
                if out.len() > degree {
                    return None;
                }
            }
        }
        i += 1;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Perm {
        Perm::from_images(v.to_vec()).unwrap()
    }

    fn symmetric(n: usize) -> PermSubgroup {
        let mut t = Perm::identity(n).images().to_vec();
        t.swap(0, 1);
        PermSubgroup::new(n, vec![Perm::rotation(n), p(&t)]).unwrap()
    }

    #[test]
    fn perm_basics() {
        assert!(Perm::from_images(vec![0, 0]).is_err());
        let r = Perm::rotation(5);
        assert_eq!(r.order(), 5);
        assert_eq!(r.power(5), Perm::identity(5));
        assert_eq!(r.compose(&r.inverse()), Perm::identity(5));
        let a = p(&[1, 0, 2]);
        let b = p(&[0, 2, 1]);
        // apply a then b: 0 -> 1 -> 2
        assert_eq!(a.compose(&b).image(0), 2);
        assert_eq!(p(&[1, 0, 3, 4, 2]).order(), 6);
    }

    #[test]
    fn closure_examples() {
        let c8 = PermSubgroup::new(8, vec![Perm::rotation(8)]).unwrap();
        assert_eq!(c8.order(), 8);
        assert!(c8.is_regular());
        let triv = PermSubgroup::new(4, vec![]).unwrap();
        assert_eq!(triv.order(), 1);
        assert_eq!(triv.elements().unwrap().len(), 1);
        assert!(!triv.is_transitive());
    }

    #[test]
    fn schreier_sims_orders() {
        for n in 2..=7u128 {
            let s = symmetric(n as usize);
            assert_eq!(s.order(), (1..=n).product::<u128>());
            if n <= 6 {
                assert_eq!(s.elements().unwrap().len() as u128, s.order());
            }
        }
        let big = PermSubgroup::closure(12, symmetric(12).generators().to_vec(), 1000).unwrap();
        assert_eq!(big.order(), 479_001_600);
        assert!(big.elements().is_none());
        assert!(big.iso_type().is_err());
        // wreath product S_4 wr S_2 on 8 points
        let gens = vec![
            p(&[1, 0, 2, 3, 4, 5, 6, 7]),
            p(&[1, 2, 3, 0, 4, 5, 6, 7]),
            p(&[4, 5, 6, 7, 0, 1, 2, 3]),
        ];
        assert_eq!(PermSubgroup::new(8, gens).unwrap().order(), 1152);
    }

    #[test]
    fn membership() {
        let c8 = PermSubgroup::new(8, vec![Perm::rotation(8).power(2)]).unwrap();
        assert!(c8.contains(&Perm::rotation(8).power(4)));
        assert!(!c8.contains(&Perm::rotation(8)));
        assert!(!c8.contains(&Perm::identity(9)));
    }

    #[test]
    fn normality() {
        let s4 = symmetric(4);
        let v4 = PermSubgroup::new(4, vec![p(&[1, 0, 3, 2]), p(&[2, 3, 0, 1])]).unwrap();
        assert!(v4.is_normal_in(&s4).unwrap());
        let c4 = PermSubgroup::new(4, vec![Perm::rotation(4)]).unwrap();
        assert!(!c4.is_normal_in(&s4).unwrap());
        let odd = PermSubgroup::new(4, vec![p(&[1, 0, 2, 3])]).unwrap();
        assert_eq!(odd.is_normal_in(&v4), Err(PermError::NotContained));
    }

    #[test]
    fn conjugacy_search() {
        let s4 = symmetric(4);
        let a = PermSubgroup::new(4, vec![p(&[1, 0, 2, 3])]).unwrap();
        let b = PermSubgroup::new(4, vec![p(&[0, 1, 3, 2])]).unwrap();
        let w = PermSubgroup::are_conjugate(&a, &b, &s4).unwrap().unwrap();
        assert!(b.contains(&a.generators()[0].conjugate_by(&w)));
        let c = PermSubgroup::new(4, vec![p(&[1, 0, 3, 2])]).unwrap();
        assert_eq!(PermSubgroup::are_conjugate(&a, &c, &s4).unwrap(), None);
        let w = PermSubgroup::are_conjugate(&a, &a, &s4).unwrap().unwrap();
        assert!(w.is_identity());
    }

    #[test]
    fn iso_types_of_small_groups() {
        let c8 = PermSubgroup::new(8, vec![Perm::rotation(8)]).unwrap();
        assert_eq!(c8.iso_type().unwrap(), IsoType::Cyclic(8));
        let refl = p(&[0, 7, 6, 5, 4, 3, 2, 1]);
        let d16 = PermSubgroup::new(8, vec![Perm::rotation(8), refl]).unwrap();
        assert_eq!(d16.iso_type().unwrap(), IsoType::Dihedral(16));
        // Q8 in its regular representation (i, j acting on the right)
        let i = p(&[2, 3, 1, 0, 6, 7, 5, 4]);
        let j = p(&[4, 5, 7, 6, 1, 0, 2, 3]);
        let q8 = PermSubgroup::new(8, vec![i, j]).unwrap();
        assert_eq!(q8.order(), 8);
        assert_eq!(q8.iso_type().unwrap(), IsoType::GeneralizedQuaternion(8));
        let v4 = PermSubgroup::new(4, vec![p(&[1, 0, 3, 2]), p(&[2, 3, 0, 1])]).unwrap();
        assert_eq!(v4.iso_type().unwrap(), IsoType::DirectZ2xCyclic(4));
        assert_eq!(symmetric(4).iso_type().unwrap(), IsoType::Other(24));
    }

    #[test]
    fn regular_subgroups_of_s4() {
        let s4 = symmetric(4);
        let all = regular_subgroups(4, s4.elements().unwrap(), false);
        // three cyclic, one normal Klein, plus none else
        assert_eq!(all.len(), 4);
        let ab = regular_subgroups(4, s4.elements().unwrap(), true);
        assert_eq!(ab.len(), 4);
    }
}
