//! Registered verification routines. Each claim is checked against an
//! independent oracle (iterated composition, orbit computations,
//! brute-force subgroup tests, graph automorphism search) over a finite
//! parameter range and produces a [`VerificationReport`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::circulant::{self, lex_nonnormal_bound, Circulant, CirculantError, Shard};
use crate::holomorph::{centralizer_in_aut, crt_decompose, point_stabilizer, unit_order, units, AffineMap, HolElem2, HolError};
use crate::numtheory::{alt_sum_l, five_power_congruences, geom_sum_m, pow5, NumError, TwoPartCheck};
use crate::permgroup::regular_subgroups;
use crate::regular_classify::{
    check_representatives, cyclic_regular_normality, enumerate_regular_subgroups, is_normal_cyclic_regular_in_hol,
    is_semiregular_closed_form, ClassifyError, HolSubgroup,
};

/// Largest exponent accepted for `Hol(Z_{2^n})` work unless forced.
pub const DEFAULT_MAX_EXPONENT: u32 = 8;
/// Counterexamples kept per report.
const MAX_COUNTEREXAMPLES: usize = 20;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown claim {0:?}; run `holocirc claims` for the list")]
    UnknownClaim(String),
    #[error("{what} {value} exceeds the configured bound {bound} (use --force or a config file)")]
    Bound { what: &'static str, value: u64, bound: u64 },
    #[error("bad parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Hol(#[from] HolError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Circulant(#[from] CirculantError),
}

impl VerifyError {
    pub fn is_bound(&self) -> bool {
        matches!(
            self,
            VerifyError::Bound { .. } | VerifyError::Circulant(CirculantError::TooLarge { .. })
        )
    }
}

/// Resource bounds; exceeding them is an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_exponent: u32,
    pub max_degree: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            max_exponent: DEFAULT_MAX_EXPONENT,
            max_degree: circulant::max_degree(),
        }
    }
}

/// Range flags. Unset fields fall back to the claim's defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    /// Inclusive range of the exponent `n` (or `k` for the lexicographic bound).
    pub n: Option<(u32, u32)>,
    pub moduli: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl Params {
    pub fn parse_range(s: &str) -> Result<(u32, u32), VerifyError> {
        let bad = || VerifyError::Parameter(format!("expected N or A..B, got {s:?}"));
        let (a, b) = match s.split_once("..") {
            Some((a, b)) => (a, b.trim_start_matches('=')),
            None => (s, s),
        };
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok((a, b))
    }

    pub fn parse_moduli(s: &str) -> Result<Vec<usize>, VerifyError> {
        s.split(',')
            .map(|t| t.trim().parse().map_err(|_| VerifyError::Parameter(format!("bad modulus list {s:?}"))))
            .collect()
    }

    fn resolved(&self, claim: &Claim) -> Params {
        Params {
            n: self.n.or(claim.default_n),
            moduli: self.moduli.clone().or_else(|| claim.default_moduli.map(|m| m.to_vec())),
            samples: self.samples.or(claim.default_samples),
            seed: self.seed.or(claim.default_samples.map(|_| DEFAULT_SEED)),
        }
    }

    fn exponents(&self) -> std::ops::RangeInclusive<u32> {
        let (a, b) = self.n.unwrap_or((3, 3));
        a..=b
    }

    fn moduli(&self) -> Vec<usize> {
        self.moduli.clone().unwrap_or_default()
    }

    fn to_json(&self) -> BTreeMap<String, Value> {
        let mut out = BTreeMap::new();
        if let Some((a, b)) = self.n {
            out.insert("n".into(), json!(format!("{a}..{b}")));
        }
        if let Some(m) = &self.moduli {
            out.insert("modulus".into(), json!(m));
        }
        if let Some(s) = self.samples {
            out.insert("samples".into(), json!(s));
        }
        if let Some(s) = self.seed {
            out.insert("seed".into(), json!(s));
        }
        out
    }

    fn replay(&self, claim: &str) -> String {
        let mut cmd = format!("holocirc verify {claim}");
        if let Some((a, b)) = self.n {
            let _ = write!(cmd, " --n {a}..{b}");
        }
        if let Some(m) = &self.moduli {
            let list: Vec<String> = m.iter().map(|v| v.to_string()).collect();
            let _ = write!(cmd, " --modulus {}", list.join(","));
        }
        if let Some(s) = self.samples {
            let _ = write!(cmd, " --samples {s}");
        }
        if let Some(s) = self.seed {
            let _ = write!(cmd, " --seed {s}");
        }
        cmd
    }
}

const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub claim_id: String,
    pub parameters: BTreeMap<String, Value>,
    pub status: Status,
    /// Counts on success; concrete counterexamples on failure.
    pub evidence: Vec<Value>,
    pub replay: String,
    pub runtime: f64,
}

type Routine = fn(&Params, &Bounds) -> Result<Outcome, VerifyError>;

/// A registered claim.
pub struct Claim {
    pub id: &'static str,
    pub summary: &'static str,
    default_n: Option<(u32, u32)>,
    default_moduli: Option<&'static [usize]>,
    default_samples: Option<usize>,
    run: Routine,
}

struct Outcome {
    status: Status,
    evidence: Vec<Value>,
}

impl Outcome {
    fn from_failures(counts: Value, failures: Vec<Value>) -> Self {
        if failures.is_empty() {
            Outcome {
                status: Status::Pass,
                evidence: vec![counts],
            }
        } else {
            let mut evidence = vec![counts];
            evidence.extend(failures.into_iter().take(MAX_COUNTEREXAMPLES));
            Outcome {
                status: Status::Fail,
                evidence,
            }
        }
    }
}

pub static CLAIMS: &[Claim] = &[
    Claim {
        id: "pow5-congruence",
        summary: "5^(2^t) = 1 mod 2^(t+2) and != 1 mod 2^(t+3)",
        default_n: Some((20, 20)),
        default_moduli: None,
        default_samples: None,
        run: pow5_congruence,
    },
    Claim {
        id: "geometric-sum-valuation",
        summary: "2-parts of the 5-power geometric and alternating sums",
        default_n: Some((40, 40)),
        default_moduli: None,
        default_samples: Some(10_000),
        run: geometric_sum_valuation,
    },
    Claim {
        id: "power-closed-form",
        summary: "closed-form powers in Hol(Z_2^n) equal iterated products",
        default_n: Some((3, 8)),
        default_moduli: None,
        default_samples: Some(100_000),
        run: power_closed_form,
    },
    Claim {
        id: "order-closed-form",
        summary: "closed-form element orders equal permutation orders",
        default_n: Some((3, 8)),
        default_moduli: None,
        default_samples: Some(100_000),
        run: order_closed_form,
    },
    Claim {
        id: "conjugate-normal-form",
        summary: "every element is conjugate by an automorphism to a^(2-part) x^b y^c",
        default_n: Some((3, 8)),
        default_moduli: None,
        default_samples: Some(100_000),
        run: conjugate_normal_form,
    },
    Claim {
        id: "point-stabilizer",
        summary: "the two-generator point stabilizer equals the brute-force stabilizer",
        default_n: Some((3, 6)),
        default_moduli: None,
        default_samples: None,
        run: point_stabilizer_claim,
    },
    Claim {
        id: "semiregular-classification",
        summary: "closed-form semiregularity equals orbit semiregularity",
        default_n: Some((3, 7)),
        default_moduli: None,
        default_samples: None,
        run: semiregular_classification,
    },
    Claim {
        id: "regular-classification",
        summary: "regular subgroups of Hol(Z_2^n) are conjugate to exactly one representative",
        default_n: Some((3, 8)),
        default_moduli: None,
        default_samples: None,
        run: regular_classification,
    },
    Claim {
        id: "cyclic-normality",
        summary: "a cyclic regular subgroup is normal in Hol iff it is <a> or <a y^(2^(n-3))>",
        default_n: Some((3, 6)),
        default_moduli: None,
        default_samples: None,
        run: cyclic_normality,
    },
    Claim {
        id: "nnn-forces-y-power",
        summary: "a normal circulant of order 2^k with a non-normal cyclic regular subgroup admits 5^(2^(k-4))",
        default_n: None,
        default_moduli: Some(&[16]),
        default_samples: None,
        run: nnn_forces_y_power,
    },
    Claim {
        id: "lex-bound",
        summary: "lexicographic-product order bound, and W-subgroups force non-normality on Z_2^k",
        default_n: Some((2, 20)),
        default_moduli: Some(&[8, 16]),
        default_samples: None,
        run: lex_bound,
    },
    Claim {
        id: "y-forces-nonnormal",
        summary: "circulants on Z_2^k preserved by multiplication by 5 are not normal",
        default_n: None,
        default_moduli: Some(&[8, 16]),
        default_samples: None,
        run: y_forces_nonnormal,
    },
    Claim {
        id: "centralizer-order",
        summary: "the centraliser of Z_p^m in Aut(Z_p^k) has order p^(k-m)",
        default_n: None,
        default_moduli: Some(&[4, 8, 9, 16, 25, 27, 32, 49, 64, 81, 121, 125, 128, 169, 243, 256, 343, 512]),
        default_samples: None,
        run: centralizer_order,
    },
    Claim {
        id: "centralizer-product",
        summary: "for abelian regular H in Hol(Z_n), |C_Aut(N)| = |H : N| with N = H meet G_R",
        default_n: None,
        default_moduli: Some(&[6, 8, 9, 10, 12, 15, 16, 18, 20]),
        default_samples: None,
        run: centralizer_product,
    },
    Claim {
        id: "theta-odd-prime",
        summary: "the odd-prime theta map certifies non-normality whenever its multiplier preserves S",
        default_n: None,
        default_moduli: Some(&[9, 18, 25, 27]),
        default_samples: None,
        run: theta_odd_prime,
    },
    Claim {
        id: "two-power-index",
        summary: "abelian regular subgroups of normal circulants meet G_R with 2-power index",
        default_n: None,
        default_moduli: Some(&[9, 10, 12]),
        default_samples: None,
        run: two_power_index,
    },
    Claim {
        id: "unique-abelian-regular",
        summary: "for 4 not dividing n, G_R is the only abelian regular subgroup of a normal circulant",
        default_n: None,
        default_moduli: Some(&[9, 10]),
        default_samples: None,
        run: unique_abelian_regular,
    },
    Claim {
        id: "no-nnn-without-8",
        summary: "no circulant on Z_n with 8 not dividing n is NNN",
        default_n: None,
        default_moduli: Some(&[9, 10, 12]),
        default_samples: None,
        run: no_nnn_without_8,
    },
    Claim {
        id: "theta-two-part",
        summary: "the 2-part theta map certifies non-normality whenever 5^(2^(k-4)) preserves S",
        default_n: None,
        default_moduli: Some(&[16]),
        default_samples: None,
        run: theta_two_part,
    },
    Claim {
        id: "cyclic-nnn-scan",
        summary: "no circulant in the full census is NNN",
        default_n: None,
        default_moduli: Some(&[8, 9, 10, 12, 16]),
        default_samples: None,
        run: cyclic_nnn_scan,
    },
];

pub fn claim(id: &str) -> Option<&'static Claim> {
    CLAIMS.iter().find(|c| c.id == id)
}

/// Runs `claim_id` over the given range with default bounds.
pub fn run(claim_id: &str, params: &Params) -> Result<VerificationReport, VerifyError> {
    run_bounded(claim_id, params, &Bounds::default())
}

pub fn run_bounded(claim_id: &str, params: &Params, bounds: &Bounds) -> Result<VerificationReport, VerifyError> {
    let c = claim(claim_id).ok_or_else(|| VerifyError::UnknownClaim(claim_id.to_string()))?;
    let params = params.resolved(c);
    check_bounds(&params, bounds, c)?;
    let start = Instant::now();
    let outcome = (c.run)(&params, bounds)?;
    Ok(VerificationReport {
        claim_id: c.id.to_string(),
        parameters: params.to_json(),
        status: outcome.status,
        evidence: outcome.evidence,
        replay: params.replay(c.id),
        runtime: start.elapsed().as_secs_f64(),
    })
}

fn check_bounds(params: &Params, bounds: &Bounds, c: &Claim) -> Result<(), VerifyError> {
    let exponent_is_hol = !matches!(c.id, "pow5-congruence" | "geometric-sum-valuation" | "lex-bound");
    if let Some((_, b)) = params.n {
        if exponent_is_hol && b > bounds.max_exponent {
            return Err(VerifyError::Bound {
                what: "exponent",
                value: b as u64,
                bound: bounds.max_exponent as u64,
            });
        }
        if b > 63 {
            return Err(VerifyError::Parameter(format!("exponent {b} above 63")));
        }
    }
    if c.id != "centralizer-order" {
        for &m in params.moduli.iter().flatten() {
            if m > bounds.max_degree {
                return Err(VerifyError::Bound {
                    what: "modulus",
                    value: m as u64,
                    bound: bounds.max_degree as u64,
                });
            }
            if m < 2 {
                return Err(VerifyError::Parameter(format!("modulus {m} below 2")));
            }
        }
    }
    Ok(())
}

fn pow5_congruence(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in p.exponents() {
        for t in 0..=n.saturating_sub(3) {
            let (lower, upper) = five_power_congruences(t, n)?;
            checked += 1;
            if !(lower && upper) {
                failures.push(json!({"t": t, "n": n, "divides": lower, "not_divides": upper, "value": pow5(1 << t, n)?}));
            }
        }
    }
    Ok(Outcome::from_failures(json!({"checked": checked}), failures))
}

fn geometric_sum_valuation(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed.unwrap_or(DEFAULT_SEED));
    let samples = p.samples.unwrap_or(0);
    let mut failures = Vec::new();
    let mut tallies: BTreeMap<&str, usize> = BTreeMap::new();
    for n in p.exponents() {
        for _ in 0..samples {
            let k = rng.gen_range(1..=1u64 << 10);
            let j = rng.gen_range(1..=1u64 << 10);
            let k_even = 2 * rng.gen_range(1..=1u64 << 9);
            let k2 = 1u128 << k.trailing_zeros();
            let m = geom_sum_m(k, j, n)?.check_two_part(k2);
            let l_pred = 2 * (1u128 << k_even.trailing_zeros()) * (1u128 << j.trailing_zeros());
            let l = alt_sum_l(k_even, j, n)?.check_two_part(l_pred);
            for (name, check) in [("geometric", m), ("alternating", l)] {
                let key = match check {
                    TwoPartCheck::Match => "match",
                    TwoPartCheck::Truncated => "truncated",
                    TwoPartCheck::Mismatch => "mismatch",
                };
                *tallies.entry(key).or_default() += 1;
                if check == TwoPartCheck::Mismatch {
                    let kk = if name == "geometric" { k } else { k_even };
                    failures.push(json!({"sum": name, "k": kk, "j": j, "n": n}));
                }
            }
        }
    }
    Ok(Outcome::from_failures(json!(tallies), failures))
}

/// Exhaustive for `n <= 5`, otherwise `samples` random elements.
fn elements_for(n: u32, p: &Params, rng: &mut ChaCha8Rng) -> Result<Vec<HolElem2>, VerifyError> {
    if n <= 5 {
        return Ok(HolElem2::all(n)?.collect());
    }
    let size = HolElem2::group_order(n) as usize;
    Ok((0..p.samples.unwrap_or(0))
        .map(|_| HolElem2::from_index(n, rng.gen_range(0..size)))
        .collect())
}

fn power_closed_form(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed.unwrap_or(DEFAULT_SEED));
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for n in p.exponents() {
        let full = 1i64 << n;
        if n <= 5 {
            for h in HolElem2::all(n)? {
                let mut acc = HolElem2::identity(n)?;
                for r in 0..=full {
                    checked += 1;
                    if h.power(r) != acc {
                        failures.push(json!({"n": n, "element": h.to_string(), "r": r}));
                    }
                    acc = acc.compose(&h)?;
                }
            }
        } else {
            let picks: Vec<(HolElem2, i64)> = elements_for(n, p, &mut rng)?
                .into_iter()
                .map(|h| (h, rng.gen_range(0..=full)))
                .collect();
            checked += picks.len();
            failures.extend(picks.par_iter().filter_map(|&(h, r)| {
                let mut acc = HolElem2::identity(n).expect("valid");
                for _ in 0..r {
                    acc = acc.compose(&h).expect("same modulus");
                }
                (h.power(r) != acc).then(|| json!({"n": n, "element": h.to_string(), "r": r}))
            }).collect::<Vec<_>>());
        }
    }
    Ok(Outcome::from_failures(json!({"checked": checked}), failures))
}

fn order_closed_form(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed.unwrap_or(DEFAULT_SEED));
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for n in p.exponents() {
        let elems = elements_for(n, p, &mut rng)?;
        checked += elems.len();
        failures.extend(elems.par_iter().filter_map(|h| {
            let brute = h.to_perm().order();
            (h.order() as u128 != brute).then(|| json!({"n": n, "element": h.to_string(), "closed_form": h.order(), "brute_force": brute as u64}))
        }).collect::<Vec<_>>());
    }
    Ok(Outcome::from_failures(json!({"checked": checked}), failures))
}

fn conjugate_normal_form(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed.unwrap_or(DEFAULT_SEED));
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for n in p.exponents() {
        let elems = elements_for(n, p, &mut rng)?;
        checked += elems.len();
        failures.extend(elems.par_iter().filter_map(|h| {
            let (nf, rho) = h.conj_normal_form();
            let conj = h.conjugate_by(&rho.inverse()).expect("same modulus");
            let shape = nf.translation == 0 || nf.translation.is_power_of_two();
            let t2 = if h.translation == 0 { 0 } else { 1 << h.translation.trailing_zeros() };
            let ok = conj == nf && rho.translation == 0 && shape && nf.translation == t2;
            (!ok).then(|| json!({"n": n, "element": h.to_string(), "normal_form": nf.to_string(), "rho": rho.to_string()}))
        }).collect::<Vec<_>>());
    }
    Ok(Outcome::from_failures(json!({"checked": checked}), failures))
}

fn point_stabilizer_claim(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for n in p.exponents() {
        let hol: Vec<HolElem2> = HolElem2::all(n)?.collect();
        for g in 0..(1u64 << n) {
            let gens = point_stabilizer(g, n)?;
            let sub = HolSubgroup::generate(n, gens.to_vec())?;
            let brute: Vec<&HolElem2> = hol.iter().filter(|h| h.act(g) == g).collect();
            checked += 1;
            let same = brute.len() as u64 == sub.order() && brute.iter().all(|h| sub.contains(h));
            if !same || sub.order() != 1 << (n - 1) {
                failures.push(json!({"n": n, "point": g, "generated_order": sub.order(), "stabilizer_order": brute.len()}));
            }
        }
    }
    Ok(Outcome::from_failures(json!({"points": checked}), failures))
}

fn semiregular_classification(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    let mut semiregular = 0usize;
    for n in p.exponents() {
        let hol: Vec<HolElem2> = HolElem2::all(n)?.collect();
        checked += hol.len();
        let results: Vec<(HolElem2, bool, bool)> = hol
            .par_iter()
            .map(|h| (*h, is_semiregular_closed_form(h), h.to_perm().is_semiregular()))
            .collect();
        semiregular += results.iter().filter(|r| r.2).count();
        failures.extend(
            results
                .iter()
                .filter(|(_, c, o)| c != o)
                .map(|(h, c, o)| json!({"n": n, "element": h.to_string(), "closed_form": c, "orbits": o})),
        );
    }
    Ok(Outcome::from_failures(json!({"checked": checked, "semiregular": semiregular}), failures))
}

fn regular_classification(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut failures = Vec::new();
    let mut evidence = Vec::new();
    for n in p.exponents() {
        for c in check_representatives(n)? {
            if let Some(k) = c.coincides_with {
                evidence.push(json!({"n": n, "coincidence": [k.to_string(), c.rtype.to_string()]}));
                continue;
            }
            if !c.passes() {
                failures.push(json!({
                    "n": n, "representative": c.rtype.to_string(),
                    "generators": c.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                    "regular": c.regular, "iso": c.iso.name(), "iso_order": c.iso.order() as u64,
                    "expected_iso": c.expected_iso.name(),
                    "intersection": c.intersection, "expected_intersection": c.expected_intersection,
                }));
            }
        }
        let report = enumerate_regular_subgroups(n)?;
        for r in &report.records {
            if r.matches.len() != 1 || !r.verify()? {
                failures.push(json!({
                    "n": n, "subgroup": r.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                    "matches": r.matches.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                }));
            }
        }
        evidence.push(json!({"n": n, "mode": report.mode, "regular_subgroups": report.regular_count, "class_sizes": report.class_sizes}));
    }
    let mut out = Outcome::from_failures(json!(evidence), failures);
    if out.status == Status::Pass {
        out.evidence = evidence;
    }
    Ok(out)
}

fn cyclic_normality(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for n in p.exponents() {
        let checks = cyclic_regular_normality(n)?;
        let normal = checks.iter().filter(|c| c.normal_brute_force).count();
        counts.push(json!({"n": n, "cyclic_regular": checks.len(), "normal": normal}));
        for c in checks {
            if c.normal_predicted != Some(c.normal_brute_force) {
                failures.push(json!({
                    "n": n, "generator": c.generator.to_string(),
                    "type": c.rtype.map(|t| t.to_string()), "brute_force": c.normal_brute_force,
                    "predicted": c.normal_predicted,
                }));
            }
        }
    }
    Ok(Outcome::from_failures(json!(counts), failures))
}

fn census(n: usize) -> Result<Vec<Circulant>, VerifyError> {
    let total = 1u64 << Circulant::pair_orbits(n).len();
    Ok((0..total).map(|m| Circulant::from_pair_mask(n, m)).collect::<Result<_, _>>()?)
}

fn graph_replay(g: &Circulant) -> String {
    let set: Vec<String> = g.connection_set().iter().map(|s| s.to_string()).collect();
    format!("holocirc graph --modulus {} --set \"{}\"", g.modulus(), set.join(","))
}

fn require_two_power(n: usize, min: u32) -> Result<u32, VerifyError> {
    if !n.is_power_of_two() || n.trailing_zeros() < min {
        return Err(VerifyError::Parameter(format!("modulus {n} must be 2^k with k >= {min}")));
    }
    Ok(n.trailing_zeros())
}

fn nnn_forces_y_power(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for n in p.moduli() {
        let k = require_two_power(n, 4)?;
        let m = pow5(1 << (k - 4), k)?;
        let graphs = census(n)?;
        let results: Vec<Result<(bool, Option<Value>), VerifyError>> = graphs
            .par_iter()
            .map(|g| {
                let v = g.nnn_verdict()?;
                let mut antecedent = false;
                for c in &v.regular_cyclic_subgroups {
                    let t = c.rtype.ok_or_else(|| VerifyError::Parameter("untyped cyclic subgroup".into()))?;
                    if !is_normal_cyclic_regular_in_hol(t, k)? {
                        antecedent = true;
                    }
                }
                let holds = !antecedent || g.aut_g_s().contains(&m);
                Ok((antecedent, (!holds).then(|| json!({"S": g.connection_set(), "replay": graph_replay(g)}))))
            })
            .collect();
        let mut antecedents = 0;
        for r in results {
            let (a, f) = r?;
            antecedents += a as usize;
            failures.extend(f);
        }
        counts.push(json!({"modulus": n, "graphs": graphs.len(), "antecedent_held": antecedents}));
    }
    Ok(Outcome::from_failures(json!(counts), failures))
}

fn lex_bound(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut failures = Vec::new();
    let mut pairs = 0;
    for k in p.exponents() {
        for t in 1..k {
            let b = lex_nonnormal_bound(k, t)?;
            pairs += 1;
            if !b.holds() || b.tight() != (t + 1 == k) {
                failures.push(json!(b));
            }
        }
    }
    let mut graphs = Vec::new();
    for n in p.moduli() {
        require_two_power(n, 2)?;
        let mut with_w = 0;
        for g in census(n)? {
            if g.is_degenerate() || g.w_subgroups().divisors.is_empty() {
                continue;
            }
            with_w += 1;
            if g.is_normal_cayley()? {
                failures.push(json!({"S": g.connection_set(), "normal": true, "replay": graph_replay(&g)}));
            }
        }
        graphs.push(json!({"modulus": n, "with_w_subgroup": with_w}));
    }
    Ok(Outcome::from_failures(json!({"pairs": pairs, "graphs": graphs}), failures))
}

fn y_forces_nonnormal(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for n in p.moduli() {
        require_two_power(n, 3)?;
        let mut fixed = 0;
        for g in census(n)? {
            if !g.aut_g_s().contains(&5) {
                continue;
            }
            fixed += 1;
            if g.is_normal_cayley()? {
                failures.push(json!({"S": g.connection_set(), "replay": graph_replay(&g)}));
            }
        }
        counts.push(json!({"modulus": n, "preserved_by_5": fixed}));
    }
    Ok(Outcome::from_failures(json!(counts), failures))
}

fn centralizer_order(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for q in p.moduli() {
        let q = q as u64;
        let frame = crt_decompose(q)?;
        let [(prime, k)] = frame.factors[..] else {
            return Err(VerifyError::Parameter(format!("{q} is not a prime power")));
        };
        if k < 2 {
            return Err(VerifyError::Parameter(format!("{q} is prime; need k >= 2")));
        }
        let group_order = units(q).len() as u64;
        for m in 1..k {
            let c = centralizer_in_aut(&[m], &frame)?;
            let size = c.multipliers.len() as u64;
            let cyclic = c.multipliers.iter().any(|&u| unit_order(u, q) == size);
            checked += 1;
            let expected_cyclic = !(prime == 2 && m == 1 && k >= 3);
            let whole = prime == 2 && m == 1;
            let ok = size == prime.pow(k - m) && cyclic == expected_cyclic && (!whole || size == group_order);
            if !ok {
                failures.push(json!({"modulus": q, "m": m, "order": size, "cyclic": cyclic}));
            }
        }
    }
    Ok(Outcome::from_failures(json!({"subgroups": checked}), failures))
}

fn centralizer_product(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for n in p.moduli() {
        let modulus = n as u64;
        let frame = crt_decompose(modulus)?;
        let hol: Vec<AffineMap> = units(modulus)
            .into_iter()
            .flat_map(|m| (0..modulus).map(move |t| AffineMap::new(modulus, t, m).expect("unit")))
            .collect();
        let perms: Vec<_> = hol.iter().map(|f| f.to_perm()).collect();
        let subgroups = regular_subgroups(n, &perms, true);
        let mut nontrivial = 0;
        for h in &subgroups {
            let maps: Vec<AffineMap> = h.iter().map(|q| AffineMap::from_perm(q).expect("affine")).collect();
            let n_order = maps.iter().filter(|f| f.is_translation()).count() as u64;
            if n_order == modulus {
                continue;
            }
            nontrivial += 1;
            let exps: Vec<u32> = frame
                .factors
                .iter()
                .map(|&(q, _)| {
                    let mut e = 0;
                    let mut r = n_order;
                    while r % q == 0 {
                        r /= q;
                        e += 1;
                    }
                    e
                })
                .collect();
            let index = modulus / n_order;
            let ok = match centralizer_in_aut(&exps, &frame) {
                Ok(c) => c.multipliers.len() as u64 == index && c.predicted_order() == index,
                Err(_) => false,
            };
            if !ok {
                failures.push(json!({
                    "modulus": n, "subgroup": maps.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                    "intersection_order": n_order, "exponents": exps,
                }));
            }
        }
        counts.push(json!({"modulus": n, "abelian_regular": subgroups.len(), "other_than_translations": nontrivial}));
    }
    Ok(Outcome::from_failures(json!(counts), failures))
}

/// Shared driver for the θ claims: every census member whose multiplier
/// precondition holds must yield a certified witness and be non-normal.
fn theta_census(p: &Params, witness: fn(&Circulant) -> Result<Vec<circulant::ThetaWitness>, VerifyError>) -> Result<Outcome, VerifyError> {
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for n in p.moduli() {
        let graphs = census(n)?;
        let results: Vec<Result<(usize, Vec<Value>), VerifyError>> = graphs
            .par_iter()
            .map(|g| {
                let ws = witness(g)?;
                let mut bad = Vec::new();
                if !ws.is_empty() && g.is_normal_cayley()? {
                    bad.push(json!({"S": g.connection_set(), "normal": true, "replay": graph_replay(g)}));
                }
                for w in ws.iter().filter(|w| !w.certified()) {
                    bad.push(json!({"S": g.connection_set(), "witness": w, "replay": graph_replay(g)}));
                }
                Ok((ws.len(), bad))
            })
            .collect();
        let mut applied = 0;
        for r in results {
            let (a, bad) = r?;
            applied += a;
            failures.extend(bad);
        }
        counts.push(json!({"modulus": n, "graphs": graphs.len(), "precondition_held": applied}));
    }
    Ok(Outcome::from_failures(json!(counts), failures))
}

fn theta_odd_prime(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    for &n in p.moduli.iter().flatten() {
        let frame = crt_decompose(n as u64)?;
        if !frame.factors.iter().any(|&(q, k)| q > 2 && k >= 2) {
            return Err(VerifyError::Parameter(format!("no odd prime square divides {n}")));
        }
    }
    theta_census(p, |g| {
        let frame = crt_decompose(g.modulus() as u64)?;
        let mut out = Vec::new();
        for &(q, k) in &frame.factors {
            if q > 2 && k >= 2 {
                out.extend(g.theta_witness_p_odd(q)?);
            }
        }
        Ok(out)
    })
}

fn theta_two_part(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    for &n in p.moduli.iter().flatten() {
        if n.trailing_zeros() < 4 {
            return Err(VerifyError::Parameter(format!("16 does not divide {n}")));
        }
    }
    theta_census(p, |g| Ok(g.theta_witness_2part()?.into_iter().collect()))
}

fn abelian_scans(p: &Params) -> Result<Vec<circulant::AbelianScanReport>, VerifyError> {
    p.moduli().into_iter().map(|n| Ok(circulant::abelian_regular_scan(n)?)).collect()
}

fn two_power_index(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for r in abelian_scans(p)? {
        let subgroups: usize = r.records.iter().map(|x| x.indices.len()).sum();
        counts.push(json!({"modulus": r.n, "normal": r.normal_count, "abelian_regular": subgroups}));
        for x in &r.records {
            if x.indices.iter().any(|i| !i.is_power_of_two()) {
                failures.push(json!({"modulus": r.n, "S": x.connection_set, "indices": x.indices}));
            }
        }
    }
    Ok(Outcome::from_failures(json!(counts), failures))
}

fn unique_abelian_regular(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    if let Some(n) = p.moduli().into_iter().find(|n| n % 4 == 0) {
        return Err(VerifyError::Parameter(format!("4 divides {n}")));
    }
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for r in abelian_scans(p)? {
        counts.push(json!({"modulus": r.n, "normal": r.normal_count}));
        for x in r.records.iter().filter(|x| x.normal && x.indices != [1]) {
            failures.push(json!({"modulus": r.n, "S": x.connection_set, "indices": x.indices}));
        }
    }
    Ok(Outcome::from_failures(json!(counts), failures))
}

fn no_nnn_without_8(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    if let Some(n) = p.moduli().into_iter().find(|n| n % 8 == 0) {
        return Err(VerifyError::Parameter(format!("8 divides {n}")));
    }
    nnn_census(p)
}

fn cyclic_nnn_scan(p: &Params, _: &Bounds) -> Result<Outcome, VerifyError> {
    nnn_census(p)
}

fn nnn_census(p: &Params) -> Result<Outcome, VerifyError> {
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for n in p.moduli() {
        let records = circulant::scan(n, Shard::ALL, false)?;
        let summary = circulant::summarise(&records);
        counts.push(json!({"modulus": n, "summary": summary}));
        for r in records.iter().filter(|r| r.nnn) {
            let g = Circulant::new(n, r.connection_set.iter().copied())?;
            failures.push(json!({"S": r.connection_set, "degenerate": r.degenerate, "replay": graph_replay(&g)}));
        }
    }
    Ok(Outcome::from_failures(json!(counts), failures))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete_and_unique() {
        assert_eq!(CLAIMS.len(), 20);
        let mut ids: Vec<&str> = CLAIMS.iter().map(|c| c.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 20);
        assert!(matches!(run("no-such-claim", &Params::default()), Err(VerifyError::UnknownClaim(_))));
    }

    #[test]
    fn ranges_parse() {
        assert_eq!(Params::parse_range("3..5").unwrap(), (3, 5));
        assert_eq!(Params::parse_range("3..=5").unwrap(), (3, 5));
        assert_eq!(Params::parse_range("4").unwrap(), (4, 4));
        assert!(Params::parse_range("5..3").is_err());
        assert_eq!(Params::parse_moduli("8,9").unwrap(), vec![8, 9]);
    }

    #[test]
    fn bounds_are_enforced() {
        let p = Params {
            n: Some((3, 9)),
            ..Params::default()
        };
        let err = run("semiregular-classification", &p).unwrap_err();
        assert!(err.is_bound());
        let p = Params {
            moduli: Some(vec![100]),
            ..Params::default()
        };
        assert!(run("cyclic-nnn-scan", &p).unwrap_err().is_bound());
    }

    #[test]
    fn small_claims_pass() {
        let small = Params {
            n: Some((3, 4)),
            ..Params::default()
        };
        for id in ["power-closed-form", "order-closed-form", "conjugate-normal-form", "point-stabilizer", "semiregular-classification", "cyclic-normality"] {
            let r = run(id, &small).unwrap();
            assert_eq!(r.status, Status::Pass, "{id}: {:?}", r.evidence);
        }
        let r = run("cyclic-nnn-scan", &Params { moduli: Some(vec![8]), ..Params::default() }).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.replay, "holocirc verify cyclic-nnn-scan --modulus 8");
    }

    #[test]
    fn failures_carry_counterexamples() {
        let r = run("regular-classification", &Params { n: Some((3, 3)), ..Params::default() }).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.evidence.len() >= 2);
        assert!(r.replay.contains("--n 3..3"));
    }
}
