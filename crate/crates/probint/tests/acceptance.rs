//! Acceptance suite: ten criteria, one test and one printed PASS/FAIL line
//! each (run with `-- --nocapture` to see the lines for passing tests).
//! Every criterion collects violations instead of panicking mid-run, prints
//! its verdict line, and only then asserts.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use probint::compress::{
    compress_family_ij, compress_family_uv, compress_family_uvf, element_weight_sum,
    is_left_compressed, layerize, left_compress, order_sum, sandwich_layer, PairingFn, UvfSpec,
};
use probint::count::{prob_intersecting, profile, profile_bruteforce};
use probint::family::{
    is_intersecting, is_t_intersecting, parse_family, ElemSet, Family, GroundSet,
};
use probint::inject::{verify_injection_ij, verify_injection_uvf};
use probint::verify::{
    check_corollary_next, check_layer_optimality, check_sandwich, ExperimentReport, Verdict,
};
use probint::Count;

// ============================================================================
// harness
// ============================================================================

fn fam(text: &str) -> Family {
    parse_family(&text.replace(';', "\n")).unwrap()
}

fn stat(report: &ExperimentReport, key: &str) -> String {
    report
        .stats
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.clone())
        .unwrap_or_else(|| panic!("missing stat {key}"))
}

fn conclude(number: u32, label: &str, detail: String, violations: Vec<String>) {
    if violations.is_empty() {
        println!("criterion {number:>2}: PASS — {label} ({detail})");
    } else {
        println!(
            "criterion {number:>2}: FAIL — {label} ({detail}; {} violations)",
            violations.len()
        );
        for v in violations.iter().take(5) {
            println!("    {v}");
        }
        panic!("criterion {number} failed: {}", violations[0]);
    }
}

/// All fixed-point-free involutions on `elems`, as pair lists.
fn matchings(elems: &[u32]) -> Vec<Vec<(u32, u32)>> {
    if elems.is_empty() {
        return vec![vec![]];
    }
    let first = elems[0];
    let mut out = Vec::new();
    for k in 1..elems.len() {
        let partner = elems[k];
        let rest: Vec<u32> = elems[1..].iter().copied().filter(|&e| e != partner).collect();
        for mut tail in matchings(&rest) {
            tail.push((first, partner));
            out.push(tail);
        }
    }
    out
}

/// Every valid (U,v,f) spec over the ground set.
fn all_uvf_specs(ground: GroundSet) -> Vec<UvfSpec> {
    let mut specs = Vec::new();
    for u_bits in 0..=ground.full_mask() {
        if u_bits.count_ones() % 2 != 0 {
            continue;
        }
        let u = ElemSet::from_bits(ground, u_bits).unwrap();
        let u_elems: Vec<u32> = u.elements().collect();
        for v in 1..=ground.n() {
            if u.contains(v) {
                continue;
            }
            for pairs in matchings(&u_elems) {
                let f = PairingFn::new(u, &pairs).unwrap();
                specs.push(UvfSpec::new(u, v, f).unwrap());
            }
        }
    }
    specs
}

fn random_family(rng: &mut StdRng, ground: GroundSet, max_size: u32) -> Family {
    let size = rng.gen_range(0..=max_size);
    let masks: Vec<u32> = (0..size).map(|_| rng.gen_range(0..=ground.full_mask())).collect();
    Family::from_bits(ground, masks).unwrap()
}

// ============================================================================
// criteria
// ============================================================================

#[test]
fn criterion_01_golden_worked_examples() {
    let started = Instant::now();
    let mut violations = Vec::new();

    let compressed = compress_family_ij(&fam("n=4; 1 3; 2 3; 2 4"), 1, 2).unwrap();
    if compressed != fam("n=4; 1 3; 2 3; 1 4") {
        violations.push(format!("(1,2) example produced {compressed:?}"));
    }

    let g6 = GroundSet::new(6).unwrap();
    let pair = fam("n=6; 4 5; 4 6");
    let small_uv = compress_family_uv(
        &pair,
        ElemSet::from_elements(g6, &[1, 2]).unwrap(),
        ElemSet::from_elements(g6, &[4]).unwrap(),
    )
    .unwrap();
    if small_uv != fam("n=6; 1 2 5; 1 2 6") {
        violations.push(format!("(12,4) example produced {small_uv:?}"));
    }
    let big_uv = compress_family_uv(
        &pair,
        ElemSet::from_elements(g6, &[1, 2, 3]).unwrap(),
        ElemSet::from_elements(g6, &[4, 5]).unwrap(),
    )
    .unwrap();
    if big_uv != fam("n=6; 1 2 3; 4 6") {
        violations.push(format!("(123,45) example produced {big_uv:?}"));
    }

    let spec = UvfSpec::parse("U=2,3,4,5; v=1; f=2-4,3-5", g6).unwrap();
    let before = fam("n=6; 2 3; 1 2 3 6");
    let after = compress_family_uvf(&before, &spec);
    if after != fam("n=6; 1 4 5; 1 2 3 6") {
        violations.push(format!("(U,v,f) example produced {after:?}"));
    }
    if !is_t_intersecting(&before, 2) {
        violations.push("source of the (U,v,f) example should be 2-intersecting".into());
    }
    if is_t_intersecting(&after, 2) {
        violations.push("image of the (U,v,f) example should not be 2-intersecting".into());
    }

    let elapsed = started.elapsed();
    if elapsed.as_secs() >= 1 {
        violations.push(format!("worked examples took {elapsed:?}, budget is 1 s"));
    }
    conclude(
        1,
        "golden worked examples",
        format!("4 operators, {} µs", elapsed.as_micros()),
        violations,
    );
}

#[test]
fn criterion_02_uvf_preserves_intersecting_exhaustively() {
    let mut violations = Vec::new();
    let ground = GroundSet::new(4).unwrap();
    let pool: Vec<ElemSet> =
        (1..16u32).map(|bits| ElemSet::from_bits(ground, bits).unwrap()).collect();
    let specs = all_uvf_specs(ground);
    assert_eq!(specs.len(), 16, "valid (U,v,f) specs over [4]");

    // independent-set DP over the disjointness relation picks out exactly the
    // intersecting families among all 2^15 candidates
    let mut conflicts = vec![0u32; pool.len()];
    for (a, sa) in pool.iter().enumerate() {
        for (b, sb) in pool.iter().enumerate() {
            if a != b && sa.is_disjoint(sb) {
                conflicts[a] |= 1 << b;
            }
        }
    }
    // the empty family compresses to itself and stays vacuously intersecting
    for spec in &specs {
        assert!(is_intersecting(&compress_family_uvf(&Family::empty(ground), spec)));
    }

    let mut ok = vec![false; 1 << pool.len()];
    ok[0] = true;
    let mut families = 0u64;
    let mut checks = 0u64;
    for mask in 1u32..1 << pool.len() {
        let low = mask.trailing_zeros() as usize;
        ok[mask as usize] = ok[(mask & (mask - 1)) as usize] && conflicts[low] & mask == 0;
        if !ok[mask as usize] {
            continue;
        }
        families += 1;
        let family = Family::from_sets(
            ground,
            pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &s)| s),
        );
        for spec in &specs {
            checks += 1;
            let image = compress_family_uvf(&family, spec);
            if !is_intersecting(&image) {
                violations.push(format!("non-intersecting image: F={family:?} spec={spec}"));
                if violations.len() >= 5 {
                    break;
                }
            }
        }
        if violations.len() >= 5 {
            break;
        }
    }

    // independent route: the intersecting subfamilies of P[4]−{∅} are exactly
    // the nonempty intersecting families counted above, plus the empty one
    let full = Family::from_sets(ground, pool.iter().copied());
    let total = profile(&full).unwrap().total();
    if Count::from(families + 1) != total {
        violations.push(format!("enumerated {families} families but the profile says {total}"));
    }

    conclude(
        2,
        "images of intersecting families stay intersecting",
        format!("{families} intersecting families x 16 specs = {checks} checks"),
        violations,
    );
}

#[test]
fn criterion_03_recount_certificates_always_pass() {
    let mut violations = Vec::new();
    let ground = GroundSet::new(4).unwrap();
    let all: Vec<ElemSet> = (0..16u32).map(|b| ElemSet::from_bits(ground, b).unwrap()).collect();
    let specs = all_uvf_specs(ground);
    let mut rng = StdRng::seed_from_u64(0x3a7c0de);
    let mut runs = 0u64;

    for _ in 0..10_000 {
        let size = rng.gen_range(0..=12usize);
        let mut idx: Vec<usize> = (0..all.len()).collect();
        idx.shuffle(&mut rng);
        let family = Family::from_sets(ground, idx[..size].iter().map(|&i| all[i]));

        for i in 1..=4u32 {
            for j in 1..=4u32 {
                if i == j {
                    continue;
                }
                runs += 1;
                match verify_injection_ij(&family, i, j) {
                    Ok(report) if report.passed() => {}
                    Ok(report) => violations.push(format!(
                        "({i},{j}) certificate failed on {family:?}: {report}"
                    )),
                    Err(e) => violations.push(format!("({i},{j}) on {family:?}: {e}")),
                }
            }
        }
        for spec in &specs {
            runs += 1;
            match verify_injection_uvf(&family, spec) {
                Ok(report) if report.passed() => {}
                Ok(report) => {
                    violations.push(format!("{spec} certificate failed on {family:?}: {report}"))
                }
                Err(e) => violations.push(format!("{spec} on {family:?}: {e}")),
            }
        }
        if violations.len() >= 5 {
            break;
        }
    }

    // the worked examples, pinned
    let report = verify_injection_ij(&fam("n=4; 1 3; 2 3; 2 4"), 1, 2).unwrap();
    if !report.passed() || report.intersecting_subfamilies != 6 {
        violations.push(format!("worked (1,2) example: {report}"));
    }
    let g6 = GroundSet::new(6).unwrap();
    let spec = UvfSpec::parse("U=2,3,4,5; v=1; f=2-4,3-5", g6).unwrap();
    let report = verify_injection_uvf(&fam("n=6; 2 3; 1 2 3 6"), &spec).unwrap();
    if !report.passed() {
        violations.push(format!("worked (U,v,f) example: {report}"));
    }

    conclude(
        3,
        "recount certificates hold on random families",
        format!("10000 families x 28 parameter choices = {runs} certificates"),
        violations,
    );
}

#[test]
fn criterion_04_layers_dominate_every_order() {
    let mut violations = Vec::new();
    let mut swept = 0u64;
    for (n, r) in [(3, 1), (3, 2), (3, 3), (4, 1), (4, 2), (4, 3), (4, 4)] {
        match check_layer_optimality(n, r, None) {
            Ok(report) => {
                swept += stat(&report, "families_checked").parse::<u64>().unwrap();
                if report.verdict != Verdict::Confirmed {
                    violations.push(format!("layer (n={n}, r={r}) not optimal:\n{report}"));
                }
            }
            Err(e) => violations.push(format!("layer (n={n}, r={r}): {e}")),
        }
    }
    conclude(
        4,
        "up-set layers dominate all same-order families",
        format!("n=3,4 with every r >= 1; {swept} competitor families"),
        violations,
    );
}

#[test]
fn criterion_05_undominated_sandwich_family_at_every_order() {
    let mut violations = Vec::new();
    let mut swept = 0u64;
    for size in 9..=16u32 {
        match check_sandwich(4, size) {
            Ok(report) => {
                swept += stat(&report, "families_checked").parse::<u64>().unwrap();
                if report.verdict != Verdict::Confirmed {
                    violations.push(format!("no sandwiched optimum at size {size}:\n{report}"));
                }
            }
            Err(e) => violations.push(format!("size {size}: {e}")),
        }
    }
    conclude(
        5,
        "some undominated family of every order is sandwiched",
        format!("n=4, sizes 9..=16; {swept} families"),
        violations,
    );
}

#[test]
fn criterion_06_named_neighbours_dominate_their_order() {
    let mut violations = Vec::new();
    let cases: &[(u32, i32)] = &[
        (1, -2),
        (1, -1),
        (2, -2),
        (2, -1),
        (2, 1),
        (2, 2),
        (3, -2),
        (3, -1),
        (3, 1),
        (3, 2),
        (4, -1),
        (4, 1),
        (4, 2),
    ];
    for &(r, offset) in cases {
        match check_corollary_next(4, r, offset, None) {
            Ok(report) => {
                if report.verdict != Verdict::Confirmed {
                    violations.push(format!("(r={r}, offset={offset}) beaten:\n{report}"));
                }
            }
            Err(e) => violations.push(format!("(r={r}, offset={offset}): {e}")),
        }
    }
    conclude(
        6,
        "prescribed families at layer size -2..+2 dominate",
        format!("n=4, {} defined (r, offset) pairs", cases.len()),
        violations,
    );
}

#[test]
fn criterion_07_counting_routes_agree() {
    let mut violations = Vec::new();
    let mut rng = StdRng::seed_from_u64(0xc0117);

    for t in 0..500 {
        let n = rng.gen_range(2..=5u32);
        let ground = GroundSet::new(n).unwrap();
        let family = random_family(&mut rng, ground, 18.min(1 << n));
        let a = profile(&family).unwrap();
        let b = profile_bruteforce(&family).unwrap();
        if a.counts() != b.counts() {
            violations.push(format!("routes disagree on trial {t}: {family:?}"));
            if violations.len() >= 5 {
                break;
            }
        }
    }

    // edgeless disjointness graph: every count is a binomial coefficient
    let g5 = GroundSet::new(5).unwrap();
    let star = Family::from_sets(
        g5,
        (0..32u32).filter(|b| b & 1 == 1).map(|b| ElemSet::from_bits(g5, b).unwrap()),
    );
    let counts = profile(&star).unwrap();
    let mut expect = Count::from(1u32);
    for k in 0..=16u32 {
        if counts.counts()[k as usize] != expect {
            violations.push(format!("star count N_{k} != C(16,{k})"));
        }
        if k < 16 {
            expect = expect * (16 - k) / (k + 1);
        }
    }
    if profile_bruteforce(&star).unwrap().counts() != counts.counts() {
        violations.push("bruteforce route disagrees on the star family".into());
    }

    // complete disjointness graph: singletons admit no intersecting pair
    let singles = fam("n=5; 1; 2; 3; 4; 5");
    let counts = profile(&singles).unwrap();
    let expect: Vec<Count> =
        [1u32, 5, 0, 0, 0, 0].iter().map(|&c| Count::from(c)).collect();
    if counts.counts() != expect.as_slice() {
        violations.push(format!("singleton counts wrong: {}", counts.to_text()));
    }

    conclude(
        7,
        "independence-polynomial and subset-scan counts agree",
        "500 random families + 2 analytic cases".into(),
        violations,
    );
}

#[test]
fn criterion_08_intersecting_families_have_probability_one() {
    let mut violations = Vec::new();
    let mut rng = StdRng::seed_from_u64(0x9b5);
    let tolerance = 2f64.powi(-40);

    for t in 0..100 {
        let family = match t % 3 {
            0 => {
                // random subfamily of a star: always intersecting
                let n = rng.gen_range(2..=5u32);
                let ground = GroundSet::new(n).unwrap();
                Family::from_sets(
                    ground,
                    (0..=ground.full_mask())
                        .filter(|b| b & 1 == 1 && rng.gen_bool(0.5))
                        .map(|b| ElemSet::from_bits(ground, b).unwrap()),
                )
            }
            1 => {
                // random subfamily of [5]^(>=3): orders sum past n
                let ground = GroundSet::new(5).unwrap();
                Family::from_sets(
                    ground,
                    (0..=ground.full_mask())
                        .filter(|b| b.count_ones() >= 3 && rng.gen_bool(0.5))
                        .map(|b| ElemSet::from_bits(ground, b).unwrap()),
                )
            }
            _ => {
                // rejection sampling over [4]
                let ground = GroundSet::new(4).unwrap();
                loop {
                    let size = rng.gen_range(0..=6u32);
                    let masks: Vec<u32> =
                        (0..size).map(|_| rng.gen_range(1..=ground.full_mask())).collect();
                    let family = Family::from_bits(ground, masks).unwrap();
                    if is_intersecting(&family) {
                        break family;
                    }
                }
            }
        };
        assert!(is_intersecting(&family));
        for p in [0.1, 0.5, 0.9] {
            let value = prob_intersecting(&family, p).unwrap();
            if (value - 1.0).abs() > tolerance {
                violations.push(format!(
                    "P != 1 at p={p} for {family:?}: {value} (|F|={})",
                    family.len()
                ));
            }
        }
    }

    let exact = prob_intersecting(&fam("n=4; 1 3; 2 3; 2 4"), 0.5).unwrap();
    if exact != 0.75 {
        violations.push(format!("dyadic case: expected exactly 0.75, got {exact}"));
    }

    conclude(
        8,
        "probability identity for intersecting families",
        format!("100 families x 3 retention probabilities, tolerance 2^-40; dyadic case {exact}"),
        violations,
    );
}

#[test]
fn criterion_09_compression_search_finds_no_counterexample() {
    let mut violations = Vec::new();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = probint::cli::run(
        [
            "probint",
            "verify",
            "q2",
            "--n",
            "5",
            "--trials",
            "13000",
            "--seed",
            "20250819",
            "--expect-no-counterexample",
        ],
        &mut out,
        &mut err,
    );
    let text = String::from_utf8(out).unwrap();
    if code != 0 {
        violations.push(format!("exit code {code}: {text}"));
    }
    if !text.contains("verdict=inconclusive\n") {
        violations.push(format!("unexpected verdict:\n{text}"));
    }
    let grab = |key: &str| -> u64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}=")))
            .and_then(|v| v.parse().ok())
            .unwrap_or(0)
    };
    let eligible = grab("instances_v1") + grab("instances_v2");
    if eligible < 10_000 {
        violations.push(format!("only {eligible} instances with |V| in {{1,2}}"));
    }
    conclude(
        9,
        "no compression loses counts in 10^4+ searched instances",
        format!("n=5, {eligible} instances with |V| in {{1,2}}, exit {code}"),
        violations,
    );
}

#[test]
fn criterion_10_drivers_terminate_with_monotone_potentials() {
    let mut violations = Vec::new();
    let mut rng = StdRng::seed_from_u64(0x9e3779b9);

    let mut left_steps = 0u64;
    for t in 0..1000 {
        let n = rng.gen_range(2..=5u32);
        let ground = GroundSet::new(n).unwrap();
        let family = random_family(&mut rng, ground, 1 << n);
        let (result, trace) = left_compress(&family);
        let mut cur = family.clone();
        let mut weight = element_weight_sum(&cur);
        for &(i, j) in &trace {
            cur = compress_family_ij(&cur, i, j).unwrap();
            let next = element_weight_sum(&cur);
            if next >= weight {
                violations.push(format!("trial {t}: weight not decreasing at ({i},{j})"));
                break;
            }
            weight = next;
            left_steps += 1;
        }
        if cur != result || !is_left_compressed(&result) || result.len() != family.len() {
            violations.push(format!("trial {t}: left_compress replay mismatch on {family:?}"));
        }
        if violations.len() >= 5 {
            break;
        }
    }

    let mut layer_steps = 0u64;
    for t in 0..1000 {
        let n = rng.gen_range(2..=4u32);
        let ground = GroundSet::new(n).unwrap();
        let family = random_family(&mut rng, ground, 1 << n);
        let (result, trace) = layerize(&family);
        let mut cur = family.clone();
        let mut orders = order_sum(&cur);
        for spec in &trace {
            cur = compress_family_uvf(&cur, spec);
            let next = order_sum(&cur);
            if next <= orders {
                violations.push(format!("trial {t}: order sum not increasing at {spec}"));
                break;
            }
            orders = next;
            layer_steps += 1;
        }
        if cur != result || sandwich_layer(&result).is_none() || result.len() != family.len() {
            violations.push(format!("trial {t}: layerize replay mismatch on {family:?}"));
        }
        if violations.len() >= 5 {
            break;
        }
    }

    conclude(
        10,
        "driver traces replay with strictly monotone potentials",
        format!("1000 families each; {left_steps} + {layer_steps} traced steps"),
        violations,
    );
}
