//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed. The
//! process exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{counts, Mode};
use urntubes::analysis::{
    check_binomial_vandermonde, check_firstfull_identity, check_multichoose_vandermonde, check_negative_identity,
    hypergeometric_via_conditioning, multiset_to_tuple, polya_via_conditioning, tuple_to_multiset, IdentityParams,
};
use urntubes::mmo::{first_full_via_mmo, firstfull_step_bound};
use urntubes::multiset::ms;
use urntubes::negative::single_tube_negative;
use urntubes::{
    draw_pmf, first_full, hgff, hypergeometric_pmf, mnff, multinomial_pmf, nhg, nmn, npl, parse_distribution, plff,
    points_grid, points_share, polya_pmf, sequence_oracle, Color, Cutoff, Dist, DrawMode, Multiset, Rational,
    TubeConfig, Urn,
};

type Outcome = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

fn c(s: &str) -> Color {
    Color::new(s).unwrap()
}

fn tubes(s: &str) -> TubeConfig {
    TubeConfig::new(ms(s)).unwrap()
}

fn expect(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn expect_dist(d: &Dist<Color>, want: &[(&str, Rational)], what: &str) -> Result<(), String> {
    let wanted = Dist::from_pairs(want.iter().map(|(k, p)| (c(k), p.clone()))).map_err(|e| e.to_string())?;
    expect(*d == wanted, format!("{what}: got {d:?}"))
}

const RS: [(i64, i64); 3] = [(1, 3), (1, 2), (3, 5)];

fn criterion_1() -> Outcome {
    let w = parse_distribution("1/3 R + 2/3 B").unwrap();
    expect_dist(&mnff(&w, &tubes("2R+3B")).unwrap(), &[("R", q(11, 27)), ("B", q(16, 27))], "mnff")?;
    expect_dist(&hgff(&ms("3R+6B"), &tubes("2R+3B")).unwrap(), &[("R", q(17, 42)), ("B", q(25, 42))], "hgff")?;
    expect_dist(&plff(&ms("1R+1B"), &tubes("2R+3B")).unwrap(), &[("R", q(3, 5)), ("B", q(2, 5))], "plff")?;
    Ok("11/27, 17/42, 3/5".into())
}

fn criterion_2() -> Outcome {
    let w = parse_distribution("1/3 a + 1/6 b + 1/2 c").unwrap();
    let (even, uneven) = (tubes("2a+2b+2c"), tubes("6a+3b+4c"));
    let hg = ms("8a+4b+12c");
    let pl = ms("1a+1b+1c");
    let abc = |x: Rational, y: Rational, z: Rational| [("a", x), ("b", y), ("c", z)];
    expect_dist(&mnff(&w, &even).unwrap(), &abc(q(17, 54), q(11, 108), q(7, 12)), "mnff 2,2,2")?;
    expect_dist(
        &mnff(&w, &uneven).unwrap(),
        &abc(q(331, 4374), q(5443, 34992), q(2989, 3888)),
        "mnff 6,3,4",
    )?;
    expect_dist(&hgff(&hg, &even).unwrap(), &abc(q(79, 253), q(313, 3542), q(193, 322)), "hgff 2,2,2")?;
    expect_dist(
        &hgff(&hg, &uneven).unwrap(),
        &abc(q(38843, 1225785), q(1952813, 17160990), q(88875, 104006)),
        "hgff 6,3,4",
    )?;
    expect_dist(&plff(&pl, &even).unwrap(), &abc(q(1, 3), q(1, 3), q(1, 3)), "plff 2,2,2")?;
    expect_dist(&plff(&pl, &uneven).unwrap(), &abc(q(38, 195), q(128, 273), q(153, 455)), "plff 6,3,4")?;
    Ok("six distributions exact".into())
}

fn criterion_3() -> Outcome {
    let w = parse_distribution("1/3 a + 1/2 b + 1/6 c").unwrap();
    let mn = multinomial_pmf(&w, 3);
    expect(mn.prob(&ms("2a+1b")) == q(1, 6), "multinomial 2a+1b")?;
    // every entry against the sequence tree with weights 2:3:1
    let tree = common::draws(Mode::Returned, &counts(&[("a", 2), ("b", 3), ("c", 1)]), 3);
    expect(tree.len() == mn.len(), "multinomial support size")?;
    for (key, p) in &tree {
        let m = Multiset::from_counts(key.iter().map(|(k, n)| (c(k), *n)));
        expect(mn.prob(&m) == *p, format!("multinomial entry {m}"))?;
    }
    let order = [ms("3a"), ms("2a+1b"), ms("1a+2b"), ms("3b")];
    let hg = hypergeometric_pmf(&ms("4a+6b"), 3).unwrap();
    let pl = polya_pmf(&ms("4a+6b"), 3).unwrap();
    let hg_want = [q(1, 30), q(3, 10), q(1, 2), q(1, 6)];
    let pl_want = [q(1, 11), q(3, 11), q(21, 55), q(14, 55)];
    for (i, phi) in order.iter().enumerate() {
        expect(hg.prob(phi) == hg_want[i], format!("hypergeometric at {phi}"))?;
        expect(pl.prob(phi) == pl_want[i], format!("polya at {phi}"))?;
    }
    Ok("multinomial, hypergeometric, polya exact".into())
}

fn criterion_4() -> Outcome {
    let d = nhg(&ms("5M+4F"), &ms("2M+2F")).unwrap();
    let want = [(4, q(10, 21)), (5, q(20, 63)), (6, q(10, 63)), (7, q(1, 21))];
    expect(d.entries().len() == 4 && d.residual().is_zero(), "nhg support and residual")?;
    for (k, p) in &want {
        expect(d.prob(*k) == *p, format!("nhg at {k}"))?;
    }
    let w = parse_distribution("1/6 a + 1/2 b + 1/3 c").unwrap();
    let tau = ms("2a+4b+3c");
    let mn = nmn(&w, &tau, &Cutoff::KMax(24)).unwrap();
    let mn_want = [(9, q(35, 432)), (10, q(875, 7776)), (11, q(3605, 31104)), (12, q(1243, 11664))];
    for (k, p) in &mn_want {
        expect(mn.prob(*k) == *p, format!("nmn at {k}"))?;
    }
    let pl = npl(&ms("3a+2b+1c"), &tau, &Cutoff::KMax(24)).unwrap();
    let mn_mass = mn.mass_upto(24).approx();
    let pl_mass = pl.mass_upto(24).approx();
    expect((mn_mass - 0.92).abs() <= 0.02, format!("nmn mass over 9..24 is {mn_mass:.4}"))?;
    expect((pl_mass - 0.42).abs() <= 0.02, format!("npl mass over 9..24 is {pl_mass:.4}"))?;
    Ok(format!("committee exact; mass over 9..24: nmn {mn_mass:.4}, npl {pl_mass:.4}"))
}

fn criterion_5() -> Outcome {
    let share = points_share(4, 1, 2, &q(3, 5), &q(64, 1)).unwrap();
    expect_dist(&share.rho, &[("A", q(297, 625)), ("B", q(328, 625))], "rho(1,2)")?;
    expect(share.share == q(19008, 625), "share")?;
    expect((share.share.approx() - 30.4128).abs() < 1e-9, "share approx")?;
    let grid = points_grid(4, &q(3, 5), &q(64, 1)).map_err(|e| e.to_string())?;
    expect(grid.len() == 4 && grid.iter().all(|row| row.len() == 4), "grid shape")?;
    expect(grid[1][2] == share, "grid entry (1,2)")?;
    Ok("297/625 and 19008/625; 4x4 grid".into())
}

/// Random drawing situation: up to `colours` colours, tube lengths up to
/// `max_tube`, urn counts (or weights) up to `max_urn`.
fn random_instance(rng: &mut ChaCha8Rng, mode: DrawMode, colours: usize, max_tube: u64, max_urn: u64) -> (Urn, TubeConfig) {
    let names = ["a", "b", "c", "d"];
    let len = rng.gen_range(1..=colours);
    let tau = Multiset::from_counts(names[..len].iter().map(|n| (c(n), rng.gen_range(1..=max_tube))));
    let balls = Multiset::from_counts(names[..len].iter().map(|n| {
        let lo = if mode == DrawMode::Hypergeometric { tau.count(&c(n)) } else { 1 };
        (c(n), rng.gen_range(lo..=max_urn))
    }));
    let urn = match mode {
        DrawMode::Multinomial => Urn::Distribution(urntubes::flrn(&balls).unwrap()),
        _ => Urn::Balls(balls),
    };
    (urn, TubeConfig::new(tau).unwrap())
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 210;
    for i in 0..n {
        let mode = DrawMode::ALL[i % 3];
        let (urn, tau) = random_instance(&mut rng, mode, 4, 4, 8);
        let direct = first_full(mode, &urn, &tau).unwrap();
        let run = first_full_via_mmo(mode, &urn, &tau).unwrap();
        let bound = firstfull_step_bound(&tau);
        expect(run.residual.is_zero(), format!("residual left for {mode} {urn:?} {tau:?}"))?;
        expect(run.steps <= bound, format!("{} steps > bound {bound}", run.steps))?;
        expect(run.distribution().as_ref() == Some(&direct), format!("mismatch for {mode} {urn:?} {tau:?}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    expect(secs < 60.0, format!("took {secs:.1}s"))?;
    Ok(format!("{n} instances in {secs:.2}s"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 120;
    for i in 0..n {
        let mode = DrawMode::ALL[i % 3];
        let k = rng.gen_range(0..=5);
        let (urn, _) = random_instance(&mut rng, mode, 3, 1, 6);
        let urn = match (mode, urn) {
            (DrawMode::Hypergeometric, Urn::Balls(b)) if b.size() < k => Urn::Balls(b.scale(k)),
            (_, u) => u,
        };
        let closed = draw_pmf(mode, &urn, k).unwrap();
        let seq = sequence_oracle(mode, &urn, k).unwrap();
        expect(closed == seq, format!("{mode} K={k} {urn:?}"))?;
    }
    Ok(format!("{n} instances, K ≤ 5"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rs: Vec<Rational> = RS.iter().map(|&(n, d)| q(n, d)).collect();
    let mut checked = 0;
    for _ in 0..40 {
        let len = rng.gen_range(1..=4);
        let ks: Vec<u64> = (0..len).map(|_| rng.gen_range(0..=6)).collect();
        let k = rng.gen_range(0..=ks.iter().sum::<u64>());
        let hg = hypergeometric_pmf(&tuple_to_multiset(&ks), k).unwrap().map(|m| multiset_to_tuple(m, len));
        for r in &rs {
            let cond = hypergeometric_via_conditioning(&ks, r, k).unwrap();
            expect(cond == hg, format!("hypergeometric ks={ks:?} K={k} r={r}"))?;
            checked += 1;
        }
        let len = rng.gen_range(1..=3);
        let ks: Vec<u64> = (0..len).map(|_| rng.gen_range(1..=4)).collect();
        let base: u64 = ks.iter().sum();
        let k = base + rng.gen_range(0..=5);
        let pl = polya_pmf(&tuple_to_multiset(&ks), k - base).unwrap().map(|m| multiset_to_tuple(m, len));
        for r in &rs {
            let cond = polya_via_conditioning(&ks, r, k, k).unwrap();
            let shifted = cond.map(|t| t.iter().zip(&ks).map(|(a, b)| a - b).collect::<Vec<u64>>());
            expect(shifted == pl, format!("polya ks={ks:?} K={k} r={r}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} comparisons across r in {{1/3, 1/2, 3/5}}"))
}

fn criterion_9a() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let len = rng.gen_range(1..=4);
        let psi = loop {
            let m = Multiset::from_counts((0..len).map(|i| (c(["a", "b", "c", "d"][i]), rng.gen_range(0..=6))));
            if !m.is_empty() && m.size() <= 12 {
                break m;
            }
        };
        for k in 0..=psi.size() {
            let rep = check_binomial_vandermonde(&psi, k).unwrap();
            // independent right-hand side
            expect(rep.holds && rep.rhs == Rational::from_integer(common::choose(psi.size(), k)), format!("{psi} K={k}"))?;
        }
        for k in 0..=8 {
            let rep = check_multichoose_vandermonde(&psi, k).unwrap();
            let rhs = common::choose(psi.size() + k - 1, k);
            expect(rep.holds && rep.rhs == Rational::from_integer(rhs), format!("multichoose {psi} K={k}"))?;
        }
    }
    Ok("100 random ψ, all K".into())
}

fn sweep() -> impl Iterator<Item = (u64, u64)> {
    (1..=4).flat_map(|n| (1..=4).map(move |m| (n, m)))
}

fn criterion_9b() -> Outcome {
    let mut count = 0;
    for (n, m) in sweep() {
        for (a, b) in RS.iter().chain(&[(0, 1), (1, 1)]) {
            let r = q(*a, *b);
            let p = IdentityParams::Coin { n, m, s: r.complement(), r };
            expect(check_firstfull_identity(1, &p).unwrap().holds, format!("item 1 {p:?}"))?;
            count += 1;
        }
        for big_n in 1..=8 {
            for big_m in 1..=8 {
                let p = IdentityParams::Urn { n, m, big_n, big_m };
                if big_n >= n && big_m >= m {
                    expect(check_firstfull_identity(2, &p).unwrap().holds, format!("item 2 {p:?}"))?;
                    let rep = check_negative_identity(2, &p, 0, &Rational::zero()).unwrap();
                    expect(rep.holds, format!("negative item 2 {p:?}"))?;
                    count += 2;
                }
                expect(check_firstfull_identity(3, &p).unwrap().holds, format!("item 3 {p:?}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} exact identities"))
}

fn criterion_9c() -> Outcome {
    let tol = q(1, 100);
    let mut worst = 0.0f64;
    for (n, m) in sweep() {
        for (a, b) in RS {
            let r = q(a, b);
            let p = IdentityParams::Coin { n, m, s: r.complement(), r };
            let rep = check_negative_identity(1, &p, 200, &tol).unwrap();
            worst = worst.max((&rep.rhs - &rep.lhs).approx());
            expect(rep.holds, format!("{p:?}: {}", rep.note.unwrap_or_default()))?;
        }
    }
    Ok(format!("coin series, largest gap {worst:.3e} at 200 terms"))
}

fn criterion_9d() -> Outcome {
    let tol = q(1, 100);
    let mut failed = Vec::new();
    let mut total = 0;
    let mut worst = 0.0f64;
    for (n, m) in sweep() {
        for big_n in 1..=8 {
            for big_m in 1..=8 {
                let p = IdentityParams::Urn { n, m, big_n, big_m };
                let rep = check_negative_identity(3, &p, 200, &tol).unwrap();
                let gap = (&rep.rhs - &rep.lhs).approx();
                expect(!rep.lhs.is_negative() && rep.lhs <= rep.rhs, format!("{p:?} exceeds rhs"))?;
                worst = worst.max(gap);
                total += 1;
                if !rep.holds {
                    failed.push((n, m, big_n, big_m, gap));
                }
            }
        }
    }
    let example = check_negative_identity(3, &IdentityParams::Urn { n: 1, m: 1, big_n: 1, big_m: 1 }, 200, &tol).unwrap();
    let detail = format!(
        "urn series: n=m=N=M=1 gap {} (~{:.4}); {} of {total} sweep instances above 1/100, largest gap {worst:.4}",
        &example.rhs - &example.lhs,
        (&example.rhs - &example.lhs).approx(),
        failed.len()
    );
    if failed.is_empty() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut checked = 0;
    for i in 0..90 {
        let mode = DrawMode::ALL[i % 3];
        let y = c("y");
        let m = rng.gen_range(1..=4);
        let own = rng.gen_range(if mode == DrawMode::Hypergeometric { m } else { 1 }..=8);
        let rest = rng.gen_range(1..=6);
        let balls = Multiset::from_counts([(y.clone(), own), (c("z"), rest)]);
        let tau = Multiset::single(y.clone(), m);
        let urn = match mode {
            DrawMode::Multinomial => Urn::Distribution(urntubes::flrn(&balls).unwrap()),
            _ => Urn::Balls(balls.clone()),
        };
        let k_max = m + 10;
        let general = match mode {
            DrawMode::Multinomial => nmn(&urntubes::flrn(&balls).unwrap(), &tau, &Cutoff::KMax(k_max)).unwrap(),
            DrawMode::Hypergeometric => nhg(&balls, &tau).unwrap(),
            DrawMode::Polya => npl(&balls, &tau, &Cutoff::KMax(k_max)).unwrap(),
        };
        for k in 0..=10 {
            let closed = single_tube_negative(mode, &urn, &y, m, k).unwrap();
            expect(closed == general.prob(m + k), format!("{mode} {balls} m={m} k={k}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} single-tube values"))
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_urntubes"))
        .args(args)
        .env_remove("URNTUBES_FORMAT")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8"))
}

fn criterion_11() -> Outcome {
    let goldens: [(&[&str], &str); 3] = [
        (
            &["first-full", "--mode", "multinomial", "--urn", "1/3 R + 2/3 B", "--tubes", "2R+3B", "--format", "json"],
            include_str!("golden/first_full_multinomial.json"),
        ),
        (
            &["negative", "--mode", "hypergeometric", "--urn", "5M+4F", "--tubes", "2M+2F"],
            include_str!("golden/negative_committee.txt"),
        ),
        (
            &["check", "--suite", "vandermonde", "--seed", "7", "--trials", "100"],
            include_str!("golden/check_vandermonde.txt"),
        ),
    ];
    for (args, want) in goldens {
        let (code, out) = run_cli(args);
        expect(code == 0, format!("{args:?} exited {code}"))?;
        expect(out == want, format!("{args:?} output differs from golden"))?;
    }
    let matrix: [(&[&str], i32); 9] = [
        (&["draw", "--mode", "polya", "--urn", "4a+6b", "-k", "3"], 0),
        (&["points", "--target", "4", "--wins-a", "1", "--wins-b", "2", "--prob", "3/5", "--stake", "64"], 0),
        (&["bogus"], 1),
        (&["draw", "--mode", "polya", "--urn", "4a+6b"], 1),
        (&["draw", "--mode", "polya", "--urn", "4a+", "-k", "3"], 1),
        (&["first-full", "--mode", "multinomial", "--urn", "1/3 R + 1/3 B", "--tubes", "2R+3B"], 1),
        (&["draw", "--mode", "hypergeometric", "--urn", "2a", "-k", "3"], 2),
        (&["first-full", "--mode", "polya", "--urn", "1a+1b", "--tubes", "2a+2c"], 2),
        (&["check", "--suite", "corollaries", "--truncation", "5", "--format", "csv"], 3),
    ];
    for (args, want) in matrix {
        let (code, _) = run_cli(args);
        expect(code == want, format!("{args:?} exited {code}, expected {want}"))?;
    }
    Ok("3 golden outputs, 9 exit codes".into())
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 14] = [
        ("1", "first-full two-colour values", criterion_1),
        ("2", "first-full three-colour distributions", criterion_2),
        ("3", "draw pmf examples", criterion_3),
        ("4", "negative distributions", criterion_4),
        ("5", "problem of points", criterion_5),
        ("6", "pointwise first-full equals automaton", criterion_6),
        ("7", "sequence oracle equals closed forms", criterion_7),
        ("8", "conditioning constructions", criterion_8),
        ("9a", "Vandermonde identities", criterion_9a),
        ("9b", "finite two-colour identities", criterion_9b),
        ("9c", "coin series identity at 200 terms", criterion_9c),
        ("9d", "Pólya series identity at 200 terms", criterion_9d),
        ("10", "single-tube closed forms", criterion_10),
        ("11", "CLI golden outputs and exit codes", criterion_11),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, title, f) in criteria {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS  {id:<3} {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {id:<3} {title}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
