//! Randomised and swept self-checks, as run by `urntubes check`.
//!
//! Every suite returns one [`IdentityReport`] per comparison. Comparisons
//! of whole distributions report the L1 distance between the two sides as
//! `lhs` against `rhs = 0`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::analysis::{
    check_binomial_vandermonde, check_firstfull_identity, check_multichoose_vandermonde, check_negative_identity,
    hypergeometric_via_conditioning, multiset_to_tuple, polya_via_conditioning, tuple_color, tuple_to_multiset,
    IdentityParams, IdentityReport,
};
use crate::dist::{Dist, NatDist};
use crate::draws::{hypergeometric_pmf, polya_pmf, DrawMode, Urn};
use crate::error::{Error, Result};
use crate::firstfull::{first_full, TubeConfig};
use crate::mmo::{first_full_via_mmo, firstfull_step_bound};
use crate::multiset::{Color, Multiset};
use crate::negative::{negative, negative_tail_bound, negative_via_mmo, single_tube_negative, Cutoff};
use crate::numeric::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Vandermonde,
    Firstfull,
    Negative,
    Conditioning,
    Corollaries,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Vandermonde,
        Suite::Firstfull,
        Suite::Negative,
        Suite::Conditioning,
        Suite::Corollaries,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Vandermonde => "vandermonde",
            Suite::Firstfull => "firstfull",
            Suite::Negative => "negative",
            Suite::Conditioning => "conditioning",
            Suite::Corollaries => "corollaries",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.to_string() == s)
            .ok_or_else(|| Error::parse(0, format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    pub trials: u64,
    /// Terms per series for the infinite-sum identities.
    pub truncation: u64,
    /// Largest accepted gap between a truncated series and its limit.
    pub tolerance: Rational,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0,
            trials: 100,
            truncation: 200,
            tolerance: Rational::ratio(1, 100),
        }
    }
}

/// The interior probabilities used wherever a result must not depend on `r`.
pub fn interior_rs() -> [Rational; 3] {
    [Rational::ratio(1, 3), Rational::ratio(1, 2), Rational::ratio(3, 5)]
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<IdentityReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    match suite {
        Suite::Vandermonde => (0..opts.trials).try_fold(Vec::new(), |mut out, _| {
            let psi = random_multiset(&mut rng, 4, 1, 12);
            let k = rng.gen_range(0..=psi.size());
            out.push(check_binomial_vandermonde(&psi, k)?);
            out.push(check_multichoose_vandermonde(&psi, rng.gen_range(0..=8))?);
            Ok(out)
        }),
        Suite::Firstfull => (0..opts.trials)
            .map(|_| {
                let inst = Instance::random(&mut rng, 4, 4, 8);
                firstfull_equivalence(inst.mode, &inst.urn, &inst.tubes)
            })
            .collect(),
        Suite::Negative => (0..opts.trials).try_fold(Vec::new(), |mut out, _| {
            let inst = Instance::random(&mut rng, 3, 3, 6);
            out.extend(negative_checks(&inst, inst.tubes.tubes().size() + 6)?);
            Ok(out)
        }),
        Suite::Conditioning => (0..opts.trials).try_fold(Vec::new(), |mut out, _| {
            let r = interior_rs().choose(&mut rng).expect("non-empty").clone();
            let len = rng.gen_range(1..=4);
            let ks: Vec<u64> = (0..len).map(|_| rng.gen_range(0..=6)).collect();
            let k = rng.gen_range(0..=ks.iter().sum::<u64>());
            out.push(hypergeometric_conditioning_check(&ks, &r, k)?);
            let len = rng.gen_range(1..=3);
            let ks: Vec<u64> = (0..len).map(|_| rng.gen_range(1..=4)).collect();
            let k = ks.iter().sum::<u64>() + rng.gen_range(0..=5);
            out.push(polya_conditioning_check(&ks, &r, k)?);
            Ok(out)
        }),
        Suite::Corollaries => corollary_sweep(opts.truncation, &opts.tolerance),
    }
}

/// A random drawing situation whose urn covers exactly the tube colours.
#[derive(Debug, Clone)]
pub struct Instance {
    pub mode: DrawMode,
    pub urn: Urn,
    pub tubes: TubeConfig,
}

impl Instance {
    /// Up to `colours` colours, tube lengths `1..=max_tube`, urn counts (or
    /// multinomial weights) up to `max_urn`; hypergeometric urns cover the tubes.
    pub fn random(rng: &mut impl Rng, colours: usize, max_tube: u64, max_urn: u64) -> Instance {
        let mode = *DrawMode::ALL.choose(rng).expect("non-empty");
        let len = rng.gen_range(1..=colours);
        let cs: Vec<Color> = (0..len).map(tuple_color).collect();
        let tubes = Multiset::from_counts(cs.iter().map(|c| (c.clone(), rng.gen_range(1..=max_tube))));
        let counts = Multiset::from_counts(cs.iter().map(|c| {
            let lo = if mode == DrawMode::Hypergeometric { tubes.count(c).max(1) } else { 1 };
            (c.clone(), rng.gen_range(lo..=max_urn.max(lo)))
        }));
        let urn = match mode {
            DrawMode::Multinomial => Urn::Distribution(crate::dist::flrn(&counts).expect("non-empty")),
            _ => Urn::Balls(counts),
        };
        Instance {
            mode,
            urn,
            tubes: TubeConfig::new(tubes).expect("non-empty"),
        }
    }

    pub fn describe(&self) -> serde_json::Value {
        let urn = match &self.urn {
            Urn::Distribution(d) => crate::parse::format_distribution(d),
            Urn::Balls(m) => m.to_string(),
        };
        json!({ "mode": self.mode.to_string(), "urn": urn, "tubes": self.tubes.tubes().to_string() })
    }
}

/// Sum of `|p(t) - q(t)|` over both supports.
pub fn l1_distance<T: Ord + Clone>(p: &Dist<T>, q: &Dist<T>) -> Rational {
    let mut keys: Vec<&T> = p.support().chain(q.support()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|t| {
            let d = p.prob(t) - q.prob(t);
            if d.is_negative() {
                -d
            } else {
                d
            }
        })
        .sum()
}

fn natdist_distance(p: &NatDist, q: &NatDist) -> Rational {
    let mut keys: Vec<u64> = p.entries().keys().chain(q.entries().keys()).copied().collect();
    keys.sort();
    keys.dedup();
    let body: Rational = keys
        .into_iter()
        .map(|k| {
            let d = p.prob(k) - q.prob(k);
            if d.is_negative() {
                -d
            } else {
                d
            }
        })
        .sum();
    let tail = p.residual() - q.residual();
    body + if tail.is_negative() { -tail } else { tail }
}

fn distance_report(identity: &str, params: serde_json::Value, distance: Rational, extra: bool, note: String) -> IdentityReport {
    IdentityReport {
        identity: identity.to_string(),
        params,
        holds: distance.is_zero() && extra,
        lhs: distance,
        rhs: Rational::zero(),
        note: Some(note),
    }
}

/// Pointwise first-full against the automaton run for `‖τ‖ - |X| + 1` steps.
pub fn firstfull_equivalence(mode: DrawMode, urn: &Urn, tubes: &TubeConfig) -> Result<IdentityReport> {
    let direct = first_full(mode, urn, tubes)?;
    let bound = firstfull_step_bound(tubes);
    let run = first_full_via_mmo(mode, urn, tubes)?;
    let via = Dist::normalize(run.outputs.clone()).unwrap_or_else(|_| direct.clone());
    let inst = Instance {
        mode,
        urn: urn.clone(),
        tubes: tubes.clone(),
    };
    let absorbed = run.residual.is_zero() && run.steps <= bound;
    Ok(distance_report(
        "firstfull-automaton",
        inst.describe(),
        l1_distance(&direct, &via) + &run.residual,
        absorbed,
        format!("residual {} after {} of {bound} steps", run.residual, run.steps),
    ))
}

/// Pointwise negative distribution against the automaton, tail bound
/// dominance, and the single-tube closed form where it applies.
pub fn negative_checks(inst: &Instance, k_max: u64) -> Result<Vec<IdentityReport>> {
    let tubes = inst.tubes.tubes();
    let direct = negative(inst.mode, &inst.urn, tubes, &Cutoff::KMax(k_max))?;
    let horizon = match inst.mode {
        DrawMode::Hypergeometric => direct.k_max(),
        _ => k_max,
    };
    let via = negative_via_mmo(inst.mode, &inst.urn, tubes, horizon)?;
    let mut out = vec![distance_report(
        "negative-automaton",
        inst.describe(),
        natdist_distance(&direct, &via),
        true,
        format!("entries up to k = {horizon}"),
    )];
    if inst.mode != DrawMode::Hypergeometric {
        let bound = negative_tail_bound(inst.mode, &inst.urn, tubes, k_max)?;
        out.push(IdentityReport {
            identity: "negative-tail-bound".into(),
            params: inst.describe(),
            holds: direct.residual() <= &bound,
            lhs: direct.residual().clone(),
            rhs: bound,
            note: Some(format!("residual beyond k = {k_max} against the union bound")),
        });
    }
    if let [(y, m)] = tubes.iter().collect::<Vec<_>>()[..] {
        let single_ok = match inst.mode {
            DrawMode::Multinomial => inst.urn.colors().len() > 1,
            _ => true,
        };
        if single_ok {
            let l1: Rational = (0..=k_max - m)
                .map(|k| {
                    let closed = single_tube_negative(inst.mode, &inst.urn, y, m, k)?;
                    let d = closed - direct.prob(m + k);
                    Ok(if d.is_negative() { -d } else { d })
                })
                .sum::<Result<Rational>>()?;
            out.push(distance_report("negative-single-tube", inst.describe(), l1, true, format!("k up to {k_max}")));
        }
    }
    Ok(out)
}

pub fn hypergeometric_conditioning_check(ks: &[u64], r: &Rational, k: u64) -> Result<IdentityReport> {
    let cond = hypergeometric_via_conditioning(ks, r, k)?;
    let hg = hypergeometric_pmf(&tuple_to_multiset(ks), k)?.map(|m| multiset_to_tuple(m, ks.len()));
    Ok(distance_report(
        "hypergeometric-via-conditioning",
        json!({ "ks": ks, "r": r.to_string(), "K": k }),
        l1_distance(&cond, &hg),
        true,
        "conditioned binomials against the hypergeometric draw".into(),
    ))
}

pub fn polya_conditioning_check(ks: &[u64], r: &Rational, k: u64) -> Result<IdentityReport> {
    let cond = polya_via_conditioning(ks, r, k, k)?;
    let shifted = cond.map(|t| t.iter().zip(ks).map(|(a, b)| a - b).collect::<Vec<u64>>());
    let base: u64 = ks.iter().sum();
    let pl = polya_pmf(&tuple_to_multiset(ks), k - base)?.map(|m| multiset_to_tuple(m, ks.len()));
    Ok(distance_report(
        "polya-via-conditioning",
        json!({ "ks": ks, "r": r.to_string(), "K": k }),
        l1_distance(&shifted, &pl),
        true,
        "conditioned negative binomials against the Pólya draw".into(),
    ))
}

/// Every two-colour identity over `n, m ≤ 4` and `N, M ≤ 8`, with `r`
/// ranging over the interior values (and the endpoints where allowed).
pub fn corollary_sweep(truncation: u64, tolerance: &Rational) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    let closed_rs: Vec<Rational> = std::iter::once(Rational::zero())
        .chain(interior_rs())
        .chain(std::iter::once(Rational::one()))
        .collect();
    for n in 1..=4 {
        for m in 1..=4 {
            for r in &closed_rs {
                let coin = IdentityParams::Coin { n, m, r: r.clone(), s: r.complement() };
                out.push(check_firstfull_identity(1, &coin)?);
                if r.is_positive() && *r < Rational::one() {
                    out.push(check_negative_identity(1, &coin, truncation, tolerance)?);
                }
            }
            for big_n in 1..=8 {
                for big_m in 1..=8 {
                    let urn = IdentityParams::Urn { n, m, big_n, big_m };
                    if big_n >= n && big_m >= m {
                        out.push(check_firstfull_identity(2, &urn)?);
                        out.push(check_negative_identity(2, &urn, truncation, tolerance)?);
                    }
                    out.push(check_firstfull_identity(3, &urn)?);
                    out.push(check_negative_identity(3, &urn, truncation, tolerance)?);
                }
            }
        }
    }
    Ok(out)
}

/// A random non-empty multiset over up to `colours` colours with size in `[min, max]`.
pub fn random_multiset(rng: &mut impl Rng, colours: usize, min: u64, max: u64) -> Multiset {
    loop {
        let len = rng.gen_range(1..=colours);
        let m = Multiset::from_counts((0..len).map(|i| (tuple_color(i), rng.gen_range(0..=max))));
        if (min..=max).contains(&m.size()) {
            return m;
        }
    }
}
