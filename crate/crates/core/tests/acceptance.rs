//! Acceptance suite: one PASS/FAIL line per criterion, with its time limit.
//! Run with `cargo test -p vom-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vom_core::binary::{
    cheaptalk_max_binary, classify, feasible_binary, two_value_outcome, Case, CheapTalkMethod,
};
use vom_core::fixtures;
use vom_core::mediated::{check_equilibrium, maximize_welfare};
use vom_core::oracle::{enumerate_equilibria, joint_outcome, shift_receiver, shift_sender, OneRoundProtocol};
use vom_core::sim::{run_mediated, SimConfig};
use vom_core::vom::{value_of_mediation, CtSource, VomValue};
use vom_core::{Game, Outcome, Player, Rational, Table, Welfare};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    r(rng.gen_range(lo..=hi), rng.gen_range(1..=6))
}

fn random_table(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Table {
    (0..rows)
        .map(|_| (0..cols).map(|_| random_rational(rng, 0, 6)).collect())
        .collect()
}

fn random_prior(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = w.iter().sum();
    w.iter().map(|&x| r(x, total)).collect()
}

fn random_binary_game(rng: &mut ChaCha8Rng) -> Game {
    let n = rng.gen_range(1..=4);
    let prior = random_prior(rng, n);
    let u_s = random_table(rng, n, 2);
    let u_r = random_table(rng, n, 2);
    Game::unlabeled(prior, u_s, u_r).expect("valid random game")
}

fn random_distribution(rng: &mut ChaCha8Rng, len: usize) -> Vec<Rational> {
    let mut w: Vec<i64> = (0..len).map(|_| rng.gen_range(0..=4)).collect();
    if w.iter().all(|&x| x == 0) {
        w[0] = 1;
    }
    let total: i64 = w.iter().sum();
    w.iter().map(|&x| r(x, total)).collect()
}

fn grid() -> Vec<(Rational, Rational)> {
    (0..=7)
        .flat_map(|i| (0..=7).map(move |j| (r(i, 7), r(j, 7))))
        .collect()
}

fn criterion_1() -> Result<String, String> {
    let (game, w) = fixtures::non_monotone_binary();
    let opt = maximize_welfare(&game, &w).map_err(|e| e.to_string())?;
    ensure(opt.value == r(1, 4), || format!("value {}", opt.value))?;
    let p = (opt.outcome.get(0, 0).clone(), opt.outcome.get(1, 0).clone());
    ensure(p == (r(1, 2), r(0, 1)), || format!("argmax P = ({}, {})", p.0, p.1))?;
    Ok(format!("value {} at P = ({}, {})", opt.value, p.0, p.1))
}

fn criterion_2() -> Result<String, String> {
    let (game, w) = fixtures::non_monotone_binary();
    let v = value_of_mediation(&game, &w, &CtSource::Certified(fixtures::non_monotone_binary_ct()))
        .map_err(|e| e.to_string())?;
    ensure(v.value == VomValue::PlusInfinity, || format!("w: {}", v.value))?;
    let (game, w) = fixtures::non_monotone_binary_eps();
    let v2 = value_of_mediation(&game, &w, &CtSource::Certified(fixtures::non_monotone_binary_eps_ct()))
        .map_err(|e| e.to_string())?;
    ensure(v2.value == VomValue::Finite { value: r(26, 1) }, || format!("w+1/100: {}", v2.value))?;
    Ok(format!("w -> {}, w+1/100 -> {}", v.value, v2.value))
}

fn criterion_3() -> Result<String, String> {
    let (game, w) = fixtures::non_monotone_binary();
    let mut counts = Vec::new();
    for k in [2, 3] {
        let set = enumerate_equilibria(&game, k, Some(&w)).map_err(|e| e.to_string())?;
        let outcomes = set.outcomes();
        ensure(outcomes.len() >= 2, || format!("alphabet {k}: {} outcomes", outcomes.len()))?;
        for m in &set.members {
            ensure(m.welfare == Some(Rational::zero()), || format!("alphabet {k}: welfare {:?}", m.welfare))?;
            ensure(m.outcome.get(0, 1).is_zero(), || format!("alphabet {k}: action 1 in state t0"))?;
        }
        counts.push(outcomes.len());
    }
    Ok(format!("{} / {} distinct outcomes, all welfare 0", counts[0], counts[1]))
}

fn criterion_4() -> Result<String, String> {
    let (game, _) = fixtures::cyclic_three_action();
    let mu = fixtures::cyclic_mediated_outcome();
    let cert = check_equilibrium(&game, &mu).map_err(|e| e.to_string())?;
    ensure(cert.slacks.len() == 12, || format!("{} constraints", cert.slacks.len()))?;
    ensure(cert.is_equilibrium(), || format!("violated {:?}", cert.violated()))?;
    let us = game.expected_utility(&mu, Player::Sender).map_err(|e| e.to_string())?;
    let ur = game.expected_utility(&mu, Player::Receiver).map_err(|e| e.to_string())?;
    ensure(us == r(1, 2) && ur == r(1, 2), || format!("u_s {us}, u_r {ur}"))?;
    Ok(format!("12/12 constraints hold, u_s = {us}, u_r = {ur}"))
}

fn criterion_5() -> Result<String, String> {
    let (game, _) = fixtures::cyclic_three_action();
    let set = enumerate_equilibria(&game, 3, None).map_err(|e| e.to_string())?;
    ensure(!set.members.is_empty(), || "no equilibria".into())?;
    for m in &set.members {
        ensure(m.u_s == m.u_r, || format!("u_s {} != u_r {}", m.u_s, m.u_r))?;
        ensure(m.u_s < r(1, 2), || format!("u_s {}", m.u_s))?;
    }
    let hull = set.payoff_hull();
    ensure(
        hull.vertices.iter().all(|(s, u)| *s < r(1, 2) && *u < r(1, 2)),
        || "hull reaches 1/2".into(),
    )?;
    Ok(format!("{} equilibria, max payoff {}", set.members.len(), hull.max_u_s))
}

fn criterion_6() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..200 {
        let game = random_binary_game(&mut rng);
        let (alpha, beta) = (random_rational(&mut rng, 0, 4), random_rational(&mut rng, 0, 4));
        let w = Welfare::linear(&game, &alpha, &beta).map_err(|e| e.to_string())?;
        let ct = cheaptalk_max_binary(&game, &w).map_err(|e| e.to_string())?;
        let med = maximize_welfare(&game, &w).map_err(|e| e.to_string())?.value;
        ensure(ct.method == CheapTalkMethod::Exact && ct.value == med, || {
            format!("case {i}: cheap talk {:?} {} vs mediated {med}", ct.method, ct.value)
        })?;
    }
    Ok("200/200 exact matches".into())
}

fn criterion_7() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut games = 0;
    let mut points = 0;
    while games < 100 {
        let game = random_binary_game(&mut rng);
        let n = game.num_types();
        let zeros = (0..n).filter(|&t| game.u_s(t, 0) > game.u_s(t, 1)).count();
        let strict = (0..n).all(|t| game.u_s(t, 0) != game.u_s(t, 1));
        if !strict || zeros == 0 || zeros == n {
            continue;
        }
        games += 1;
        let a = classify(&game).map_err(|e| e.to_string())?;
        for (p0, p1) in grid() {
            let mu = two_value_outcome(&a.partition, &p0, &p1).map_err(|e| e.to_string())?;
            let member = check_equilibrium(&game, &mu).map_err(|e| e.to_string())?.is_equilibrium();
            let closed = feasible_binary(&game, &p0, &p1).map_err(|e| e.to_string())?;
            ensure(member == closed, || format!("game {games} at ({p0}, {p1}): system {member}, closed form {closed}"))?;
            points += 1;
        }
    }
    Ok(format!("{points} grid points agree over 100 games"))
}

fn two_type_game(u_r: [[i64; 2]; 2]) -> Game {
    let u_s = vec![vec![r(1, 1), r(0, 1)], vec![r(0, 1), r(1, 1)]];
    let u_r = u_r.iter().map(|row| row.iter().map(|&v| r(v, 1)).collect()).collect();
    Game::uniform(u_s, u_r).expect("valid game")
}

fn criterion_8() -> Result<String, String> {
    let cases = [
        ([[1, 0], [2, 0]], Case::OnlyConstantOne, vec![(r(1, 1), r(1, 1))]),
        ([[0, 2], [0, 1]], Case::OnlyConstantZero, vec![(r(0, 1), r(0, 1))]),
        ([[0, 1], [1, 0]], Case::DiagonalOnly, vec![(r(0, 1), r(0, 1)), (r(1, 1), r(1, 1))]),
    ];
    for (u_r, case, vertices) in cases {
        let game = two_type_game(u_r);
        let a = classify(&game).map_err(|e| e.to_string())?;
        let c = &a.coefficients;
        ensure(a.case == case, || format!("b0 {}, b1 {}: got {:?}, want {case:?}", c.b0, c.b1, a.case))?;
        ensure(a.region_vertices == vertices, || format!("{case:?}: vertices {:?}", a.region_vertices))?;
        for (p0, p1) in grid() {
            let mu = two_value_outcome(&a.partition, &p0, &p1).map_err(|e| e.to_string())?;
            let member = check_equilibrium(&game, &mu).map_err(|e| e.to_string())?.is_equilibrium();
            ensure(member == c.admits(&p0, &p1), || format!("{case:?} at ({p0}, {p1})"))?;
        }
    }
    Ok("constant-one, constant-zero and diagonal branches match".into())
}

fn criterion_9() -> Result<String, String> {
    let (game, _) = fixtures::cyclic_three_action();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..100 {
        let k = rng.gen_range(1..=4);
        let s = (0..3).map(|_| random_distribution(&mut rng, k)).collect();
        let rr = (0..k).map(|_| random_distribution(&mut rng, 3)).collect();
        let sigma = OneRoundProtocol::new(&game, s, rr).map_err(|e| e.to_string())?;
        let p = joint_outcome(&game, &sigma);
        let ps = joint_outcome(&game, &shift_sender(&game, &sigma).map_err(|e| e.to_string())?);
        let pr = joint_outcome(&game, &shift_receiver(&game, &sigma).map_err(|e| e.to_string())?);
        ensure(ps.get(0, 0) == p.get(2, 0), || format!("protocol {i}: sender shift"))?;
        ensure(p.get(0, 0) == pr.get(0, 1), || format!("protocol {i}: receiver shift"))?;
        for a in 0..3 {
            for b in 0..3 {
                ensure(ps.get(a, b) == p.get((a + 2) % 3, b), || format!("protocol {i}: sender shift at ({a}, {b})"))?;
                ensure(pr.get(a, b) == p.get(a, (b + 2) % 3), || format!("protocol {i}: receiver shift at ({a}, {b})"))?;
            }
        }
    }
    Ok("100/100 protocols".into())
}

fn criterion_10() -> Result<String, String> {
    let (cyclic, _) = fixtures::cyclic_three_action();
    let sum = Welfare::sum(&cyclic).map_err(|e| e.to_string())?;
    let (binary, w) = fixtures::non_monotone_binary();
    let runs: [(&str, &Game, Outcome, Welfare); 2] = [
        ("cyclic", &cyclic, fixtures::cyclic_mediated_outcome(), sum),
        (
            "binary",
            &binary,
            Outcome::from_action0_probabilities(&[r(1, 2), r(0, 1)]).map_err(|e| e.to_string())?,
            w,
        ),
    ];
    let mut details = Vec::new();
    for (name, game, mu, w) in runs {
        let cfg = SimConfig::new(20_240_601, 100_000).with_transcripts(5);
        let a = run_mediated(game, &mu, Some(&w), cfg).map_err(|e| e.to_string())?;
        let b = run_mediated(game, &mu, Some(&w), cfg).map_err(|e| e.to_string())?;
        let estimates = [("u_s", &a.u_s), ("u_r", &a.u_r), ("w", a.welfare.as_ref().expect("welfare given"))];
        for (label, e) in estimates {
            ensure(e.within(4.0) == Some(true), || {
                format!("{name} {label}: mean {} se {} exact {:?}", e.mean, e.std_error, e.exact)
            })?;
            let z = match &e.exact {
                Some(x) if e.std_error > 0.0 => (e.mean - x.to_f64()).abs() / e.std_error,
                _ => 0.0,
            };
            details.push(format!("{name} {label} {z:.2}se"));
        }
        let ta: Vec<String> = a.transcripts.iter().map(|t| t.to_json_line()).collect();
        let tb: Vec<String> = b.transcripts.iter().map(|t| t.to_json_line()).collect();
        ensure(ta == tb, || format!("{name}: transcripts differ"))?;
    }
    Ok(details.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, Check); 10] = [
        (1, "binary example mediated optimum", Duration::from_secs(1), criterion_1),
        (2, "binary example value of mediation", Duration::from_secs(1), criterion_2),
        (3, "binary example oracle corroboration", Duration::from_secs(10), criterion_3),
        (4, "cyclic example mediated side", Duration::from_secs(1), criterion_4),
        (5, "cyclic example cheap-talk side", Duration::from_secs(60), criterion_5),
        (6, "binary linear-welfare property suite", Duration::from_secs(60), criterion_6),
        (7, "obedience inequality vs constraint system", Duration::from_secs(30), criterion_7),
        (8, "classification coverage", Duration::from_secs(5), criterion_8),
        (9, "shift identities", Duration::from_secs(5), criterion_9),
        (10, "simulator convergence", Duration::from_secs(30), criterion_10),
    ];
    let mut failures = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(d) if elapsed <= limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over time limit")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {id:>2} {status} {name}: {detail} [{:.3}s / {}s]",
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {}/10 passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
