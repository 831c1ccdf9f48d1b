//! The verification suite: each criterion runs a seeded batch of cases and
//! compares the library against the brute-force references in [`oracle`].
//!
//! Results carry no timing in their serialized form, so a fixed seed gives
//! byte-identical reports.
//!
//! [`oracle`]: crate::oracle

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::devlin::{enumerate_types, similarity_type, tangent_number, TangentTable, TreeType};
use crate::error::Result;
use crate::intervals::refine_canonical;
use crate::lab::{self, ColoringRule, ColoringSpec, QCopy, Regime};
use crate::oracle;
use crate::random;
use crate::surjections::{
    compose, distance, factor_through, to_filtering, truncate, tuple_to_factor, SupDistance, Surjection,
    DEFAULT_DEPTH_CAP,
};
use crate::Point;

/// Identifier and title of every criterion [`run`] knows.
pub const CRITERIA: [(u8, &str); 9] = [
    (1, "tangent numbers"),
    (2, "type counts"),
    (3, "filtering roundtrip"),
    (4, "monoid laws"),
    (5, "metric criterion"),
    (6, "factorization roundtrip"),
    (7, "lower-bound realization"),
    (8, "omega-coloring witnesses"),
    (9, "oscillation exact regime"),
];

/// Counterexamples kept per criterion.
const KEPT_FAILURES: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub failed: usize,
    pub summary: String,
    /// The first few failing inputs, as JSON accepted by the CLI.
    pub failures: Vec<Value>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failed: usize,
    failures: Vec<Value>,
}

impl Tally {
    fn check(&mut self, ok: bool, dump: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(dump());
            }
        }
    }

    fn record(&mut self, outcome: Result<bool>, dump: impl FnOnce() -> Value) {
        match outcome {
            Ok(ok) => self.check(ok, dump),
            Err(e) => self.check(false, || {
                let mut v = dump();
                v["error"] = json!(e.to_string());
                v
            }),
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.cases += other.cases;
        self.failed += other.failed;
        let room = KEPT_FAILURES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
    }
}

fn rng_for(seed: u64, id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (id as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Runs one criterion. Unknown identifiers yield a failed result.
pub fn run(id: u8, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let name = CRITERIA.iter().find(|(i, _)| *i == id).map_or("unknown", |(_, n)| n);
    let mut rng = rng_for(seed, id);
    let (tally, summary) = match id {
        1 => tangent_numbers(),
        2 => type_counts(),
        3 => filtering_roundtrip(&mut rng),
        4 => monoid_laws(&mut rng),
        5 => metric_criterion(&mut rng),
        6 => factorization_roundtrip(&mut rng),
        7 => lower_bound_realization(&mut rng),
        8 => omega_witnesses(&mut rng),
        9 => oscillation_exact(&mut rng),
        _ => {
            let mut t = Tally::default();
            t.check(false, || json!({ "criterion": id }));
            (t, "no such criterion".to_string())
        }
    };
    CriterionResult {
        id,
        name,
        passed: tally.failed == 0 && tally.cases > 0,
        cases: tally.cases,
        failed: tally.failed,
        summary,
        failures: tally.failures,
        elapsed: start.elapsed(),
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|&(id, _)| run(id, seed)).collect()
}

fn tangent_numbers() -> (Tally, String) {
    let expected: [u64; 5] = [1, 2, 16, 272, 7936];
    let table = TangentTable::new(6);
    let mut t = Tally::default();
    for k in 1..=6usize {
        let by_table = table.get(k).cloned();
        let by_call = tangent_number(k).ok();
        let by_permutations = BigUint::from(oracle::alternating_permutations(2 * k - 1));
        let pinned = expected.get(k - 1).map(|&v| BigUint::from(v));
        let ok = by_table.as_ref() == Some(&by_permutations)
            && by_call.as_ref() == Some(&by_permutations)
            && pinned.is_none_or(|p| p == by_permutations);
        t.check(ok, || {
            json!({ "k": k, "recurrence": by_table.map(|v| v.to_string()), "alternating": by_permutations.to_string() })
        });
    }
    (
        t,
        "t_1..t_5 = 1, 2, 16, 272, 7936; recurrence matches alternating permutations for k <= 6".into(),
    )
}

fn type_counts() -> (Tally, String) {
    let mut t = Tally::default();
    let table = TangentTable::new(4);
    for l in 1..=4usize {
        let count = enumerate_types(l).map(|v| v.len());
        let want = table.get(l).expect("table covers l").clone();
        t.record(
            count.clone().map(|c| BigUint::from(c) == want),
            || json!({ "l": l, "count": count.ok(), "tangent": want.to_string() }),
        );
    }
    for l in 1..=3usize {
        let brute = oracle::brute_force_types(l, 2 * l + 1);
        let want = table.get(l).expect("table covers l").clone();
        t.check(
            BigUint::from(brute.len()) == want,
            || json!({ "l": l, "brute_force": brute.len() }),
        );
        // every brute-force class must be one library type, and distinct classes distinct types
        let classified: Result<Vec<TreeType>> = brute
            .values()
            .map(|stems| {
                let points = stems
                    .iter()
                    .map(|w| Point::new(2, w.clone(), 1))
                    .collect::<Result<Vec<_>>>()?;
                similarity_type(&points)
            })
            .collect();
        let outcome = classified.map(|types| {
            let mut sorted = types.clone();
            sorted.sort();
            sorted.dedup();
            sorted.len() == types.len()
        });
        t.record(
            outcome,
            || json!({ "l": l, "check": "brute-force classes map injectively to types" }),
        );
    }
    (
        t,
        "|types(l)| = t_l for l <= 4; brute-force diagonal classes agree for l <= 3".into(),
    )
}

fn filtering_roundtrip(rng: &mut ChaCha8Rng) -> (Tally, String) {
    let cases: Vec<(u8, u32, u64)> = (0..1000)
        .map(|_| (if rng.gen_bool(0.5) { 2 } else { 3 }, rng.gen_range(0..=4), rng.gen()))
        .collect();
    let tallies: Vec<Tally> = cases
        .par_iter()
        .map(|&(base, support, case_seed)| {
            let mut t = Tally::default();
            let mut rng = ChaCha8Rng::seed_from_u64(case_seed);
            let filtering = match random::filtering(&mut rng, base, support) {
                Ok(f) => f,
                Err(e) => {
                    t.check(false, || json!({ "error": e.to_string() }));
                    return t;
                }
            };
            let f = Surjection::from_filtering(filtering.clone()).expect("generated filterings are valid");
            let reference = oracle::greedy_levels(base, filtering.levels().to_vec(), 6);
            for d in 0..=6u32 {
                let got = to_filtering(&f, d);
                let outcome = got.map(|g| {
                    g.validate().is_ok()
                        && g.levels() == &reference[..d as usize]
                        && (d < support || refine_canonical(&filtering, d).is_ok_and(|c| c.levels() == g.levels()))
                });
                t.record(outcome, || json!({ "filtering": filtering, "depth": d }));
            }
            t
        })
        .collect();
    let mut t = Tally::default();
    tallies.into_iter().for_each(|x| t.absorb(x));
    (
        t,
        "1000 filterings, b in {2, 3}, support <= 4, depths 0..=6 against greedy enumeration".into(),
    )
}

fn same_fingerprints(a: &Surjection, b: &Surjection, depth: u32) -> Result<bool> {
    for d in 1..=depth {
        if a.boundary_tuple(d)? != b.boundary_tuple(d)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn monoid_laws(rng: &mut ChaCha8Rng) -> (Tally, String) {
    let seeds: Vec<u64> = (0..200).map(|_| rng.gen()).collect();
    let id = Surjection::identity(2);
    let tallies: Vec<Tally> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut t = Tally::default();
            let triple = (0..3)
                .map(|_| random::surjection(&mut rng, 2, 3))
                .collect::<Result<Vec<_>>>()
                .expect("generated filterings are valid");
            let (f, g, h) = (&triple[0], &triple[1], &triple[2]);
            let dump = || json!({ "f": f, "g": g, "h": h });
            let laws = (|| -> Result<bool> {
                let left = compose(&id, f)?;
                let right = compose(f, &id)?;
                let assoc_l = compose(&compose(f, g)?, h)?;
                let assoc_r = compose(f, &compose(g, h)?)?;
                Ok(same_fingerprints(&left, f, 8)?
                    && same_fingerprints(&right, f, 8)?
                    && same_fingerprints(&assoc_l, &assoc_r, 8)?)
            })();
            t.record(laws, dump);
            // pointwise: (f∘g)(x) = f(g(x)) at the depth-3 cell maxima of f∘g
            let pointwise = (|| -> Result<bool> {
                let fg = compose(f, g)?;
                for x in fg.max_set(3)? {
                    let direct = fg.evaluate(&x, 0, DEFAULT_DEPTH_CAP)?.exact;
                    let inner = g.evaluate(&x, 0, DEFAULT_DEPTH_CAP)?.exact;
                    let nested = match inner {
                        Some(y) => f.evaluate(&y, 0, DEFAULT_DEPTH_CAP)?.exact,
                        None => None,
                    };
                    if direct.is_none() || direct != nested {
                        return Ok(false);
                    }
                }
                Ok(true)
            })();
            t.record(pointwise, dump);
            t
        })
        .collect();
    let mut t = Tally::default();
    tallies.into_iter().for_each(|x| t.absorb(x));
    (
        t,
        "200 triples, b = 2: neutrality and associativity to depth 8, pointwise composition".into(),
    )
}

fn distance_token(d: SupDistance) -> Option<u32> {
    match d {
        SupDistance::Exact { exponent } => Some(exponent),
        SupDistance::ZeroToCap { .. } => None,
    }
}

fn random_pair(rng: &mut ChaCha8Rng, kind: usize) -> Result<(Surjection, Surjection)> {
    match kind {
        0 => Ok((random::surjection(rng, 2, 3)?, random::surjection(rng, 2, 3)?)),
        1 => {
            let f = random::surjection(rng, 2, 3)?;
            let keep = rng.gen_range(0..=3);
            let extra = rng.gen_range(1..=2);
            let g = Surjection::from_filtering(random::filtering_extending(rng, &f, keep, keep + extra)?)?;
            Ok((f, g))
        }
        2 => {
            let depth = rng.gen_range(0..=3);
            let filtering = random::filtering(rng, 2, depth)?;
            let deeper = refine_canonical(&filtering, filtering.support_depth() + 2)?;
            Ok((
                Surjection::from_filtering(filtering)?,
                Surjection::from_filtering(deeper)?,
            ))
        }
        _ => {
            let f = random::surjection(rng, 2, 2)?;
            let h = random::surjection(rng, 2, 2)?;
            let fh = compose(&f, &h)?;
            let cut = truncate(&fh, rng.gen_range(1..=3))?;
            Ok((fh, cut))
        }
    }
}

fn metric_criterion(rng: &mut ChaCha8Rng) -> (Tally, String) {
    const STEMS: usize = 10;
    const PRECISION: usize = 14;
    let points = oracle::sample_points(2, STEMS);
    let seeds: Vec<u64> = (0..500).map(|_| rng.gen()).collect();
    let outcomes: Vec<(Tally, Option<Option<u32>>)> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut t = Tally::default();
            let (f, g) = random_pair(&mut rng, i % 4).expect("generated filterings are valid");
            let outcome = (|| -> Result<(Option<u32>, Option<u32>)> {
                let by_fingerprint = distance_token(distance(&f, &g, DEFAULT_DEPTH_CAP)?);
                let by_sampling = oracle::sup_distance_exponent(&f, &g, &points, PRECISION)?;
                Ok((by_fingerprint, by_sampling))
            })();
            let shown = outcome.clone().ok();
            t.record(outcome.map(|(a, b)| a == b), || {
                json!({ "f": f, "g": g, "fingerprint_exponent": shown.map(|s| s.0), "sampled_exponent": shown.map(|s| s.1) })
            });
            (t, shown.map(|s| s.0))
        })
        .collect();
    let mut t = Tally::default();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (tally, token) in outcomes {
        t.absorb(tally);
        if let Some(token) = token {
            let key = match token {
                None => "0".to_string(),
                Some(0) => "1".to_string(),
                Some(e) => format!("2^-{e}"),
            };
            *seen.entry(key).or_default() += 1;
        }
    }
    let histogram: Vec<String> = seen.iter().map(|(k, n)| format!("{k}: {n}")).collect();
    (
        t,
        format!(
            "500 pairs, b = 2: fingerprint distance equals the sup over all {} points with stems <= {STEMS} ({})",
            points.len(),
            histogram.join(", ")
        ),
    )
}

fn factorization_roundtrip(rng: &mut ChaCha8Rng) -> (Tally, String) {
    let seeds: Vec<u64> = (0..200).map(|_| rng.gen()).collect();
    let tallies: Vec<Tally> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut t = Tally::default();
            let f = random::surjection(&mut rng, 2, 3).expect("valid");
            let h = random::surjection(&mut rng, 2, 3).expect("valid");
            let dump = || json!({ "f": f, "h": h });
            let via_factor = (|| -> Result<bool> {
                let g = compose(&f, &h)?;
                let back = factor_through(&g, &h, 6, DEFAULT_DEPTH_CAP)?;
                same_fingerprints(&back, &f, 6)
            })();
            t.record(via_factor, dump);
            let via_tuple = (|| -> Result<bool> {
                let tuple = compose(&f, &h)?.boundary_tuple(6)?;
                let back = tuple_to_factor(&h, &tuple, DEFAULT_DEPTH_CAP)?;
                Ok(same_fingerprints(&back, &f, 6)? && compose(&back, &h)?.boundary_tuple(6)? == tuple)
            })();
            t.record(via_tuple, dump);
            t
        })
        .collect();
    let mut t = Tally::default();
    tallies.into_iter().for_each(|x| t.absorb(x));
    (
        t,
        "200 pairs, b = 2: factor_through and tuple_to_factor recover f to depth 6".into(),
    )
}

fn lower_bound_realization(rng: &mut ChaCha8Rng) -> (Tally, String) {
    const CAP: u32 = 20;
    let mut hs = vec![Surjection::identity(2)];
    for _ in 0..20 {
        let depth = rng.gen_range(1..=3);
        hs.push(Surjection::from_filtering(random::filtering(rng, 2, depth).expect("valid")).expect("valid"));
    }
    let mut t = Tally::default();
    let mut deepest = 0;
    for h in &hs {
        let report = lab::realize_all_colors(h, 2, CAP);
        if let Ok(r) = &report {
            deepest = r.realized.iter().map(|w| w.depth).max().unwrap_or(0).max(deepest);
        }
        t.record(
            report.map(|r| r.all_realized && r.realized.len() == 16),
            || json!({ "h": h, "k": 2, "cap": CAP }),
        );
    }
    (
        t,
        format!("identity and 20 random h: all 16 colors realized and verified, deepest search depth {deepest}"),
    )
}

fn omega_witnesses(rng: &mut ChaCha8Rng) -> (Tally, String) {
    let mut copies = vec![QCopy::unrestricted(Surjection::identity(2), DEFAULT_DEPTH_CAP).expect("valid")];
    while copies.len() < 51 {
        if let Ok(y) = lab::random_qcopy(rng, DEFAULT_DEPTH_CAP) {
            copies.push(y);
        }
    }
    let tallies: Vec<Tally> = copies
        .par_iter()
        .map(|y| {
            let mut t = Tally::default();
            for r in 0..=8u64 {
                let outcome =
                    lab::build_witness(y, r).and_then(|z| Ok(z.is_subset_of(y) && lab::omega_coloring(&z)? == r));
                t.record(outcome, || json!({ "y": y, "target": r }));
            }
            t
        })
        .collect();
    let mut t = Tally::default();
    tallies.into_iter().for_each(|x| t.absorb(x));
    (
        t,
        "Y_identity and 50 random copies: witnesses for every color r <= 8".into(),
    )
}

fn oscillation_exact(rng: &mut ChaCha8Rng) -> (Tally, String) {
    let mut t = Tally::default();
    for colors in [1u32, 2, 5, 16, 33, 64] {
        let mut map: Vec<u32> = (0..16).map(|_| rng.gen_range(0..colors)).collect();
        if colors == 16 {
            map = (0..16).collect();
            map.shuffle(rng);
        }
        let spec = ColoringSpec {
            b: 2,
            depth: 2,
            colors,
            rule: ColoringRule::Relabel { map: map.clone() },
        };
        let outcome = lab::oscillation_search(&spec, 0.3, 0, rng.gen()).and_then(|report| {
            let mut image = map.clone();
            image.sort_unstable();
            image.dedup();
            let mut ok = report.regime == Regime::Exact
                && report.bound_verified
                && report.colors.len() <= 16
                && report.colors == image;
            for w in &report.witnesses {
                let fp = crate::intervals::BoundaryTuple::new(2, 2, w.fingerprint.clone())?;
                ok &= w.ball_verified && spec.color(&fp)? == w.color;
            }
            Ok(ok)
        });
        t.record(outcome, || json!({ "coloring": spec, "epsilon": 0.3 }));
    }
    (
        t,
        "relabelings into 1, 2, 5, 16, 33, 64 colors: |B| <= 16 with ball-verified witnesses".into(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run(42, 0).passed);
    }
}
