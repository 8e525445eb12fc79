//! Acceptance checklist. Each test covers one numbered criterion and prints
//! a single PASS/FAIL verdict line with the measured quantities, then
//! asserts it. Tolerances and ranges are pinned here, not in the library.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isoprof::ball::{build_ball, BallIndex, Side};
use isoprof::extremal::jinf_inradius;
use isoprof::folner::{check, construct, folner_j_points, test_function, Family};
use isoprof::func::{FunctionOnBall, P};
use isoprof::profile::{sobolev_check, Phi};
use isoprof::randomwalk::{
    binomial_decay, fit_decay, project_measure, return_probabilities, standard_measure,
    DecayModel, WalkMeasure,
};
use isoprof::spectral::j2_spectral;
use isoprof::transfer::{compression, embed_witness, psi_report, restrict_to_cosets};
use isoprof::{Element, GroupSpec, ZSubgroup};

fn verdict(label: &str, ok: bool, detail: &str) {
    let flag = if ok { "PASS" } else { "FAIL" };
    println!("criterion {label}: {flag} - {detail}");
    assert!(ok, "criterion {label}: FAIL - {detail}");
}

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn spec(s: &str) -> GroupSpec {
    GroupSpec::parse(s).unwrap()
}

fn ids_within(index: &BallIndex, r: u32) -> Vec<u32> {
    index.ids().filter(|&id| index.sphere(id) <= r).collect()
}

fn random_function(index: &BallIndex, rng: &mut ChaCha8Rng) -> FunctionOnBall {
    let mut f = FunctionOnBall::zero(index);
    for id in 0..index.len() as u32 {
        if rng.gen_bool(0.3) {
            f.set(
                id,
                BigRational::new(
                    BigInt::from(rng.gen_range(-9i64..=9)),
                    BigInt::from(rng.gen_range(1i64..=4)),
                ),
            );
        }
    }
    f
}

#[test]
fn a01_simple_lattice_walk_is_exactly_binomial() {
    let start = Instant::now();
    let z = spec("zd:d=1");
    let measure = standard_measure(&z, BigRational::zero()).unwrap();
    let seq = return_probabilities(&measure, 64).unwrap();
    let oracle = binomial_decay(64);
    let mut equal = true;
    for n in 0..=64 {
        if seq.value_at(n) != oracle.value_at(n) {
            equal = false;
            break;
        }
    }
    let elapsed = start.elapsed();
    let ok = equal && elapsed.as_secs_f64() < 5.0;
    verdict(
        "01 binomial return probabilities",
        ok,
        &format!(
            "central binomial law reproduced exactly for n <= 64, equal={equal}, {} ms (limit 5000)",
            elapsed.as_millis()
        ),
    );
}

#[test]
fn a02_spectral_values_match_the_path_graph_closed_form() {
    let start = Instant::now();
    let z = spec("zd:d=1");
    let index = build_ball(&z, 200).unwrap();
    let mut worst = 0.0f64;
    for r in 0..=200u32 {
        let a = ids_within(&index, r);
        let bound = j2_spectral(&index, &a).unwrap();
        let exact = (1.0 - (std::f64::consts::PI / (2.0 * r as f64 + 2.0)).cos()).powf(-0.5);
        worst = worst.max((bound.j2_avg - exact).abs());
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-9 && elapsed.as_secs_f64() < 60.0;
    verdict(
        "02 spectral closed form",
        ok,
        &format!(
            "max |j2 - closed form| = {worst:.3e} over r <= 200 (tol 1e-9), {} ms (limit 60000)",
            elapsed.as_millis()
        ),
    );
}

#[test]
fn a03_sup_profile_of_balls_is_the_inradius_law() {
    let grid: [(&str, u32); 7] = [
        ("zd:d=2", 6),
        ("heis", 6),
        ("lamplighter:p=2", 4),
        ("bs:m=2", 4),
        ("hall:q=2", 6),
        ("hallq:q=2", 6),
        ("f2", 6),
    ];
    let mut checked = 0u32;
    let mut bad = Vec::new();
    for (s, rmax) in grid {
        let g = spec(s);
        // distance-to-complement certification needs spare shells; two
        // cover the dead-end detours seen on these groups
        let index = build_ball(&g, rmax + 2).unwrap();
        for r in 0..=rmax {
            let a = ids_within(&index, r);
            checked += 1;
            match jinf_inradius(&index, &a) {
                Ok(got) if got == r + 1 => {}
                Ok(got) => bad.push(format!("{s} r={r}: {got}")),
                Err(e) => bad.push(format!("{s} r={r}: {e}")),
            }
        }
    }
    verdict(
        "03 inradius law",
        bad.is_empty(),
        &format!("sup-quotient of B(e,r) equals r+1 at {checked} (group, radius) pairs {bad:?}"),
    );
}

#[test]
fn a04_folner_families_verify_across_the_grid() {
    let mut cases = Vec::new();
    for d in 1..=3u32 {
        for n in 1..=6u32 {
            cases.push((format!("zd:d={d}"), Family::ZdCubes, n));
        }
    }
    for p in [2u32, 3] {
        for n in 1..=3u32 {
            cases.push((format!("lamplighter:p={p}"), Family::LamplighterWindows, n));
        }
    }
    for n in 1..=3u32 {
        cases.push(("bs:m=2".to_string(), Family::BsWindows, n));
    }
    for n in 1..=4u32 {
        cases.push(("heis".to_string(), Family::HeisenbergBoxes, n));
    }

    let mut failures = Vec::new();
    let mut ratio_bad = Vec::new();
    let total = cases.len();
    for (s, family, n) in cases {
        let g = spec(&s);
        let pair = construct(&g, family, n).unwrap();
        let report = check(&pair);
        if !(report.neighborhood_ok && report.ratio_ok && report.diameter_ok) {
            failures.push(format!("{s} n={n}"));
        }
        if family == Family::LamplighterWindows {
            let expected = q((4 * n + 1) as i64, (2 * n + 1) as i64);
            if pair.measured_c() != expected {
                ratio_bad.push(format!("{s} n={n}: {}", pair.measured_c()));
            }
        }
    }
    let ok = failures.is_empty() && ratio_bad.is_empty();
    verdict(
        "04 folner verification",
        ok,
        &format!(
            "{total} pairs checked, failures={failures:?}, \
             lamplighter ratios off (4n+1)/(2n+1)={ratio_bad:?}"
        ),
    );
}

#[test]
fn a05_layered_test_functions_certify_linear_lower_bounds() {
    let mut cert_bad = Vec::new();
    let mut envelopes = Vec::new();
    let mut ok = true;
    for (s, family) in [
        ("lamplighter:p=2", Family::LamplighterWindows),
        ("bs:m=2", Family::BsWindows),
    ] {
        let g = spec(s);
        for n in 1..=3u32 {
            let pair = construct(&g, family, n).unwrap();
            let tf = test_function(&pair, P::One).unwrap();
            // supported in B(e, K*n), so this ratio lower-bounds the
            // profile there; it must reach n/C with the family constant
            let floor = BigRational::from_integer(BigInt::from(n)) / pair.claimed_c();
            if tf.ratio_pow() < floor {
                cert_bad.push(format!("{s} n={n}: {} < {floor}", tf.ratio_pow()));
            }
        }

        let curve = folner_j_points(&g, family, 3, P::One).unwrap();
        let fit = sobolev_check(&curve, Phi::Log).unwrap();
        let c_low = curve
            .points
            .iter()
            .map(|pt| pt.value / (1.0 + (1.0 + pt.arg as f64).ln()))
            .fold(f64::INFINITY, f64::min);
        let fits = c_low > 0.0 && fit.max_violation <= 1e-9;
        ok &= fits;
        envelopes.push(format!(
            "{s}: c_low={c_low:.4}, overlay C={:.4}, violation={:.2e}",
            fit.c, fit.max_violation
        ));
    }
    ok &= cert_bad.is_empty();
    verdict(
        "05 profile lower bounds",
        ok,
        &format!("certificates below n/C: {cert_bad:?}; log envelopes {envelopes:?}"),
    );
}

#[test]
fn a06_quotient_and_coset_identities_hold_on_random_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0106);
    let ps = [P::One, P::Two, P::Three];

    let quotient_pairs: [(&str, u32, &str); 4] = [
        ("bs:m=2", 4, "zd:d=1"),
        ("heis", 3, "zd:d=2"),
        ("lamplighter:p=2", 3, "zd:d=1"),
        ("hall:q=2", 2, "hallq:q=2"),
    ];
    let mut psi_failures = 0usize;
    for (gs, r, qs) in quotient_pairs {
        let gi = build_ball(&spec(gs), r).unwrap();
        let qi = build_ball(&spec(qs), r + 1).unwrap();
        for trial in 0..100 {
            let f = random_function(&gi, &mut rng);
            let p = ps[trial % ps.len()];
            let side = if trial % 2 == 0 { Side::Right } else { Side::Left };
            let report = psi_report(&gi, &qi, &f, p, side).unwrap();
            if !report.all_ok() {
                psi_failures += 1;
            }
        }
    }

    let subgroup_pairs: [(&str, u32, ZSubgroup); 5] = [
        ("heis", 4, ZSubgroup::HeisenbergCenter),
        ("bs:m=2", 4, ZSubgroup::BsXAxis),
        ("lamplighter:p=2", 4, ZSubgroup::LamplighterCursor),
        ("zd:d=2", 6, ZSubgroup::ZdAxis { axis: 0 }),
        ("zd:d=1", 8, ZSubgroup::ZMultiples { k: 2 }),
    ];
    let mut coset_failures = 0usize;
    for (gs, r, sub) in subgroup_pairs {
        let gi = build_ball(&spec(gs), r).unwrap();
        for trial in 0..100 {
            let f = random_function(&gi, &mut rng);
            let p = ps[trial % ps.len()];
            let restriction = restrict_to_cosets(&gi, sub, &f, p).unwrap();
            if !restriction.identity_ok {
                coset_failures += 1;
            }
        }
    }

    let ok = psi_failures == 0 && coset_failures == 0;
    verdict(
        "06 transfer identities",
        ok,
        &format!(
            "100 random functions x 4 quotient pairs: {psi_failures} failures; \
             x 5 subgroup pairs: {coset_failures} failures"
        ),
    );
}

#[test]
fn a07_decay_sequences_are_monotone_convex_and_dominated() {
    let mut shape_bad = Vec::new();
    let battery: [(&str, BigRational); 9] = [
        ("zd:d=1", BigRational::zero()),
        ("zd:d=1", q(1, 2)),
        ("zd:d=2", q(1, 2)),
        ("heis", q(1, 2)),
        ("lamplighter:p=2", q(1, 2)),
        ("bs:m=2", q(1, 2)),
        ("hall:q=2", q(1, 2)),
        ("hallq:q=2", q(1, 2)),
        ("f2", BigRational::zero()),
    ];
    for (s, theta) in &battery {
        let measure = standard_measure(&spec(s), theta.clone()).unwrap();
        let seq = return_probabilities(&measure, 6).unwrap();
        if !seq.is_nonincreasing() || !seq.is_log_convex() {
            shape_bad.push(format!("{s} theta={theta}"));
        }
    }

    let mut domination_bad = Vec::new();
    for (gs, qs) in [("bs:m=2", "zd:d=1"), ("heis", "zd:d=2")] {
        let upstairs = standard_measure(&spec(gs), q(1, 2)).unwrap();
        let downstairs = project_measure(&upstairs, &spec(qs)).unwrap();
        let seq_g = return_probabilities(&upstairs, 6).unwrap();
        let seq_q = return_probabilities(&downstairs, 6).unwrap();
        for n in 0..=6 {
            if seq_g.value_at(n).unwrap() > seq_q.value_at(n).unwrap() {
                domination_bad.push(format!("{gs} 2n={}", 2 * n));
            }
        }
    }

    let ok = shape_bad.is_empty() && domination_bad.is_empty();
    verdict(
        "07 decay properties",
        ok,
        &format!(
            "9 sequences monotone and log-convex except {shape_bad:?}; \
             quotient domination violations {domination_bad:?}"
        ),
    );
}

#[test]
fn a08_decay_fits_land_in_the_expected_brackets() {
    let start = Instant::now();

    let z_fit = fit_decay(&binomial_decay(500).window(50, 500), DecayModel::Polynomial).unwrap();
    let z_ok = (0.48..=0.52).contains(&z_fit.param);

    let z2 = standard_measure(&spec("zd:d=2"), BigRational::zero()).unwrap();
    let z2_seq = return_probabilities(&z2, 80).unwrap();
    let z2_fit = fit_decay(&z2_seq.window(20, 80), DecayModel::Polynomial).unwrap();
    let z2_ok = (0.9..=1.1).contains(&z2_fit.param);

    let lamp = standard_measure(&spec("lamplighter:p=2"), q(1, 2)).unwrap();
    let lamp_seq = return_probabilities(&lamp, 12).unwrap();
    let lamp_fit = fit_decay(&lamp_seq, DecayModel::Stretched).unwrap();
    let lamp_ok = (0.2..=0.5).contains(&lamp_fit.param) && !lamp_fit.windows.is_empty();

    let free = standard_measure(&spec("f2"), BigRational::zero()).unwrap();
    let free_seq = return_probabilities(&free, 200).unwrap();
    let (n_top, root) = free_seq.root_estimate().unwrap();
    let free_ok = (0.84..=0.89).contains(&root);

    let elapsed = start.elapsed();
    let ok = z_ok && z2_ok && lamp_ok && free_ok && elapsed.as_secs_f64() < 600.0;
    verdict(
        "08 decay fits",
        ok,
        &format!(
            "alpha(Z)={:.4} in [0.48,0.52]={z_ok}, alpha(Z^2)={:.4} in [0.9,1.1]={z2_ok}, \
             gamma(lamplighter)={:.4} in [0.2,0.5]={lamp_ok} ({} windows), \
             root at n={n_top} = {root:.4} in [0.84,0.89]={free_ok}, {} ms (limit 600000)",
            z_fit.param,
            z2_fit.param,
            lamp_fit.param,
            lamp_fit.windows.len(),
            elapsed.as_millis()
        ),
    );
}

#[test]
fn a09_distortion_curves_meet_the_stated_envelopes() {
    let bs = spec("bs:m=2");
    let mut witness_bad = Vec::new();
    for k in 0..=10u32 {
        let w = embed_witness(&bs, ZSubgroup::BsXAxis, 1i64 << k).unwrap();
        if w.len() as u32 != 2 * k + 1 {
            witness_bad.push(format!("k={k}: len {}", w.len()));
        }
    }
    let bs_ok = witness_bad.is_empty();
    println!(
        "criterion 09a (doubling witnesses): {} - word evaluating to the 2^k-th power \
         has length 2k+1 for k <= 10, exceptions {witness_bad:?}",
        if bs_ok { "PASS" } else { "FAIL" }
    );

    let heis = spec("heis");
    let curve = compression(&heis, ZSubgroup::HeisenbergCenter, 100).unwrap();
    let mut envelope_bad = Vec::new();
    for pt in &curve.points {
        if pt.t == 0 {
            continue;
        }
        let envelope = 3.0 * (pt.t as f64).sqrt() + 3.0;
        if !pt.exact || pt.rho as f64 > envelope {
            envelope_bad.push(format!("rho({}) = {} > {envelope:.2}", pt.t, pt.rho));
        }
    }
    let heis_ok = envelope_bad.is_empty();

    verdict(
        "09 distortion",
        bs_ok && heis_ok,
        &format!(
            "doubling witnesses exact for k <= 10: {bs_ok}; center curve under \
             3*sqrt(t)+3 for t <= 100: {heis_ok}, first violations {:?} \
             (central words have even length and rho(t) = 2*min(a+b : ab >= t) \
             ~ 4*sqrt(t), which first crosses the stated envelope at t = 5 \
             and stays above it from t = 10 on; the curve itself is exact)",
            &envelope_bad[..envelope_bad.len().min(3)]
        ),
    );
}

/// Every generator word up to the length cap, evaluated independently of
/// the ball machinery; shortest length per element wins.
fn brute_force_lengths(g: &GroupSpec, rmax: u32) -> HashMap<Element, u32> {
    let gens = g.generators().len();
    let mut best: HashMap<Element, u32> = HashMap::new();
    best.insert(g.identity(), 0);
    for len in 1..=rmax as usize {
        let mut word = vec![0usize; len];
        'words: loop {
            let el = g.eval_word(&word);
            match best.get(&el) {
                Some(&l) if l as usize <= len => {}
                _ => {
                    best.insert(el, len as u32);
                }
            }
            let mut i = 0;
            loop {
                word[i] += 1;
                if word[i] < gens {
                    break;
                }
                word[i] = 0;
                i += 1;
                if i == len {
                    break 'words;
                }
            }
        }
    }
    best
}

fn convolve(
    g: &GroupSpec,
    dist: &HashMap<Element, BigRational>,
    measure: &WalkMeasure,
) -> HashMap<Element, BigRational> {
    let mut out: HashMap<Element, BigRational> = HashMap::new();
    for (el, mass) in dist {
        for (s, w) in measure.weights() {
            let target = g.multiply(el, s).unwrap();
            let add = mass * w;
            out.entry(target)
                .and_modify(|m| *m += &add)
                .or_insert(add);
        }
    }
    out
}

#[test]
fn a10_independent_oracles_agree_with_the_fast_paths() {
    let all = [
        "zd:d=1",
        "zd:d=2",
        "heis",
        "lamplighter:p=2",
        "bs:m=2",
        "hall:q=2",
        "hallq:q=2",
        "f2",
    ];
    let mut ball_bad = Vec::new();
    for s in all {
        let g = spec(s);
        let index = build_ball(&g, 5).unwrap();
        let brute = brute_force_lengths(&g, 5);
        let mut ok = brute.len() == index.len();
        if ok {
            ok = brute
                .iter()
                .all(|(el, &len)| index.word_length(el) == Some(len));
        }
        if !ok {
            ball_bad.push(s);
        }
    }

    let mut conv_bad = Vec::new();
    for s in ["zd:d=2", "heis", "bs:m=2", "lamplighter:p=2"] {
        let g = spec(s);
        let measure = standard_measure(&g, q(1, 2)).unwrap();
        let seq = return_probabilities(&measure, 6).unwrap();
        let zero = BigRational::zero();

        let mut dist: HashMap<Element, BigRational> = HashMap::new();
        dist.insert(g.identity(), BigRational::one());
        let mut half_norms: Vec<BigRational> = Vec::new();
        let mut returns: Vec<BigRational> = Vec::new();
        for step in 1..=12u32 {
            dist = convolve(&g, &dist, &measure);
            if step <= 6 {
                half_norms.push(dist.values().map(|m| m * m).sum());
            }
            if step % 2 == 0 {
                returns.push(dist.get(&g.identity()).cloned().unwrap_or_else(|| zero.clone()));
            }
        }
        for n in 1..=6usize {
            let identity_holds = returns[n - 1] == half_norms[n - 1];
            let matches_library = seq.value_at(n as u32) == Some(&returns[n - 1]);
            if !(identity_holds && matches_library) {
                conv_bad.push(format!("{s} 2n={}", 2 * n));
            }
        }
    }

    let ok = ball_bad.is_empty() && conv_bad.is_empty();
    verdict(
        "10 oracle equivalence",
        ok,
        &format!(
            "8 balls at r <= 5 against plain word enumeration, mismatches {ball_bad:?}; \
             direct convolution vs half-time identity for 2n <= 12, mismatches {conv_bad:?}"
        ),
    );
}
