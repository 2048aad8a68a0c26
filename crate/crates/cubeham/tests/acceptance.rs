//! The acceptance gate: every stated criterion at full pinned scale, one
//! pass/fail line per criterion. Counts here are frozen; loosening them is
//! not an acceptable fix for a red run.

mod common;

use common::naive_extends;
use cubeham::certificate::check_cycle;
use cubeham::extender::{fink_extend_perfect, forced_pairs};
use cubeham::gen::{perfect_kqd, seeded_rng};
use cubeham::matching::{Matching, MatchingJson, Slot};
use cubeham::oracle::{extends, SearchConfig, SearchOutcome};
use cubeham::property_h::check_property_h;
use cubeham::suite::{run_suite, HarnessReport, SuiteConfig};
use cubeham::{Dimension, Edge};
use std::collections::BTreeMap;
use std::time::Instant;

struct Gate {
    lines: Vec<(String, bool)>,
}

impl Gate {
    fn new() -> Self {
        Gate { lines: Vec::new() }
    }

    fn record(&mut self, name: &str, ok: bool, detail: String) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("criterion {name}: {verdict} ({detail})");
        self.lines.push((name.to_string(), ok));
    }

    fn finish(self) {
        let failed: Vec<String> = self
            .lines
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| n.clone())
            .collect();
        assert!(failed.is_empty(), "criteria failed: {failed:?}");
    }
}

fn green(r: &HarnessReport) -> bool {
    r.failed == 0 && r.budget_exhausted == 0
}

fn tag(r: &HarnessReport, key: &str) -> usize {
    r.tags.get(key).copied().unwrap_or(0)
}

#[test]
fn acceptance() {
    let cfg = SuiteConfig::default();
    let mut gate = Gate::new();

    // 1. Exhaustive small dimensions: every matching class of K(Q_d) for
    // d in {2,3,4} extends, with the class counts frozen.
    let r1 = run_suite("exhaustive_d_le_4", &cfg).unwrap();
    let ok = green(&r1)
        && r1.total == 1_941_879
        && tag(&r1, "d2") == 7
        && tag(&r1, "d3") == 160
        && tag(&r1, "d4") == 1_941_712;
    gate.record(
        "1 exhaustive d<=4",
        ok,
        format!(
            "{} classes (7 + 160 + 1941712), {} failed, {} budget-exhausted",
            r1.total, r1.failed, r1.budget_exhausted
        ),
    );

    // 2. Necessity: 10^4 violating matchings split over d in {4,5}; the
    // oracle must refuse every one.
    let r2 = run_suite("necessity_d45", &cfg).unwrap();
    let ok = green(&r2)
        && r2.total == 10_000
        && tag(&r2, "d4:no") == 5_000
        && tag(&r2, "d5:no") == 5_000;
    gate.record(
        "2 necessity d4/d5",
        ok,
        format!("{} refusals of {} instances", tag(&r2, "d4:no") + tag(&r2, "d5:no"), r2.total),
    );

    // 3. Sufficiency sampled: 10^4 conforming d=5 instances through the
    // oracle, 10^4 d=6 instances constructively, plus the five coverage
    // instances; every certificate checked.
    let r3 = run_suite("sampled_thm8_d5", &cfg).unwrap();
    let ok = green(&r3)
        && r3.total == 20_005
        && tag(&r3, "d5:yes") == 10_000
        && tag(&r3, "d6:constructed") == 10_005;
    gate.record(
        "3 sufficiency d5 oracle / d6 constructive",
        ok,
        format!(
            "{} d5 yes, {} d6 constructed, {} failed",
            tag(&r3, "d5:yes"),
            tag(&r3, "d6:constructed"),
            r3.failed
        ),
    );

    // 4. Sharpness at d=4: the hunt finds witnesses and the first one
    // matches the pinned fixture, which an independent naive search also
    // rejects.
    let r4 = run_suite("d4_counterexample_hunt", &cfg).unwrap();
    let fixture_text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/d4_counterexample.json"
    ))
    .unwrap();
    let fixture: MatchingJson = serde_json::from_str(&fixture_text).unwrap();
    let pinned = fixture.to_matching().unwrap();
    let mut plain = pinned.clone();
    plain.set_label(0, Slot::Uncovered).unwrap();
    let fixture_checks = check_property_h(&plain, 0).unwrap().satisfied
        && !naive_extends(&pinned)
        && matches!(
            extends(&pinned, &SearchConfig::default()).unwrap(),
            SearchOutcome::No
        );
    let first_matches = r4
        .witnesses
        .first()
        .map(|w| serde_json::to_value(w).unwrap() == serde_json::to_value(&fixture).unwrap())
        .unwrap_or(false);
    let ok = green(&r4) && !r4.witnesses.is_empty() && first_matches && fixture_checks;
    gate.record(
        "4 d=4 sharpness witness",
        ok,
        format!(
            "{} witnesses in {} scanned classes; fixture re-verified independently: {}",
            r4.witnesses.len(),
            r4.total,
            fixture_checks
        ),
    );

    // 5. Length bounds: the two exact small-dimension extremes plus 10^3
    // instances per dimension and family at d in {5,6,7}.
    let r5 = run_suite("length_bounds", &cfg).unwrap();
    let ok = green(&r5)
        && r5.total == 6_001
        && tag(&r5, "exact:small") == 1
        && [5u8, 6, 7].iter().all(|n| {
            tag(&r5, &format!("qd:d{n}")) == 1_000 && tag(&r5, &format!("kqd:d{n}")) == 1_000
        });
    gate.record(
        "5 length bounds",
        ok,
        format!("{} instances, {} failed", r5.total, r5.failed),
    );

    // 6. Lemma bank: union counts exact, single-direction exhaustive over
    // all 41025 cube matchings of Q_4, exact size bounds, 10^4 maximal
    // matchings per dimension, 10^4 completions per mode.
    let r6 = run_suite("lemma_bank", &cfg).unwrap();
    let ok = green(&r6)
        && tag(&r6, "bounds:exact") == 1
        && tag(&r6, "single-direction:checked:41025") == 1
        && ["union:d4", "union:d5", "union:d6"].iter().all(|t| tag(&r6, t) == 1)
        && tag(&r6, "maximal:d5") == 10_000
        && tag(&r6, "maximal:d6") == 10_000
        && tag(&r6, "completion:Half") == 10_000
        && tag(&r6, "completion:NearHalf") == 10_000;
    gate.record(
        "6 lemma bank",
        ok,
        format!("{} checks, {} failed", r6.total, r6.failed),
    );

    // 7. Perfect-matching subroutine: 10^3 random perfect matchings per
    // d in {4..9}, Hamilton certificates of length 2^d, d=9 median < 1 s.
    let mut fink_ok = true;
    let mut d9_times = Vec::new();
    for n in 4u8..=9 {
        let d = Dimension::new(n).unwrap();
        let mut rng = seeded_rng(0xf1f0 + n as u64);
        for _ in 0..1_000 {
            let m = perfect_kqd(d, &mut rng).unwrap();
            let t = Instant::now();
            let cert = fink_extend_perfect(&m).unwrap();
            let elapsed = t.elapsed();
            if n == 9 {
                d9_times.push(elapsed);
            }
            fink_ok &= cert.len() == 1usize << n && check_cycle(&cert).is_ok();
        }
    }
    d9_times.sort();
    let median = d9_times[d9_times.len() / 2];
    fink_ok &= median < std::time::Duration::from_secs(1);
    gate.record(
        "7 perfect-matching Hamilton cycles",
        fink_ok,
        format!("6000 certificates, d=9 median {median:.2?}"),
    );

    // 8. Laceability at d=5: 10^3 positives (cycle length 30, then a
    // rebuilt Hamilton path), 10^2 planted negatives confirmed by the
    // oracle.
    let r8 = run_suite("hamlace_d5", &cfg).unwrap();
    let ok = green(&r8)
        && tag(&r8, "lace:positive") == 1_000
        && tag(&r8, "lace:negative") == 100;
    gate.record(
        "8 laceability d=5",
        ok,
        format!(
            "{} positives, {} negatives, {} failed",
            tag(&r8, "lace:positive"),
            tag(&r8, "lace:negative"),
            r8.failed
        ),
    );

    // 9. Case-tree coverage aggregated over criteria 3 and 5. The
    // four-crossing double-missing sub-case (bii'') cannot arise from valid
    // inputs (the blocked direction would then outweigh the chosen one
    // under the maximal-cut rule), so it is exercised by invoking the
    // branch directly; the other seven tags must appear in the traces.
    let mut agg: BTreeMap<String, usize> = BTreeMap::new();
    for r in [&r3, &r5] {
        for (k, v) in &r.tags {
            *agg.entry(k.clone()).or_insert(0) += v;
        }
    }
    let needed = ["p0:a", "case:ai", "case:aii", "case:b", "p0:bi", "p0:bii'", "p0:biii"];
    let mut cover_ok = true;
    let mut counts = Vec::new();
    for t in needed {
        let c = agg.get(t).copied().unwrap_or(0);
        cover_ok &= c >= 1;
        counts.push(format!("{t}={c}"));
    }
    let bii2 = {
        let d6 = Dimension::new(6).unwrap();
        let e = |u, v| Edge::new(u, v).unwrap();
        let n = Matching::from_edges(d6, &[e(4, 5), e(6, 7), e(8, 9), e(10, 11)]).unwrap();
        let obs = vec![(2u8, vec![e(5, 7), e(9, 11)])];
        forced_pairs(&n, 1, 3, &obs, 4, 6).map(|p| p == vec![e(4, 6), e(8, 10)]).unwrap_or(false)
    };
    counts.push(format!("bii''(direct)={}", usize::from(bii2)));
    gate.record(
        "9 case-tree coverage",
        cover_ok && bii2,
        counts.join(", "),
    );
    println!(
        "note: sub-case bii'' is unreachable from valid inputs; covered by direct branch invocation"
    );

    gate.finish();
}
