//! Negative distributions: the number of draws needed until every tube is
//! full, in the three drawing modes.
//!
//! The multinomial and Pólya versions have infinite support. They are
//! returned as a [`NatDist`] truncated at a cutoff, with the exact missing
//! mass as residual and [`negative_tail_bound`] as an upper bound on it.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dist::{flrn, Dist};
use crate::draws::{hypergeometric_prob, multinomial_prob, polya_prob, DrawMode, Urn};
use crate::error::{Error, Result};
use crate::mmo::{Mmo, Position, Step};
use crate::multiset::{multichoose_ext, Color, Multiset};
use crate::numeric::{binomial, Rational};

pub use crate::dist::NatDist;

/// Where to stop computing an infinite-support negative distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cutoff {
    /// Last `k` with an explicit entry.
    KMax(u64),
    /// Grow `k_max` until [`negative_tail_bound`] is at most this value.
    TailEps(Rational),
}

/// Largest `k_max` a tail-eps cutoff may select. Pólya tails decay like
/// `1/k`, so small urns can need tens of thousands of terms; those runs
/// are refused and the caller picks `k_max` instead.
pub const TAIL_K_LIMIT: u64 = 1_000;

/// Draws `φ ∈ M[k-1](X)` with `τ - 1x ≤ φ` and `φ(x) = τ(x) - 1`, written as
/// `(τ - 1x) + ψ` with `ψ` of size `k - ‖τ‖` over the other colours. For
/// the hypergeometric mode `caps` bounds `ψ` by what the urn has left.
fn completing_draws(
    colors: &[Color],
    tubes: &Multiset,
    x: &Color,
    k: u64,
    caps: Option<&Multiset>,
) -> Vec<Multiset> {
    let l = tubes.size();
    if k < l {
        return Vec::new();
    }
    let base = tubes.with_removed(x).expect("x is a tube colour");
    let others: Vec<Color> = colors.iter().filter(|c| *c != x).cloned().collect();
    let extra = k - l;
    let fill: Vec<Multiset> = match caps {
        Some(room) => {
            let room = Multiset::from_counts(others.iter().map(|c| (c.clone(), room.count(c))));
            room.submultisets_of_size(extra).collect()
        }
        None if others.is_empty() => {
            if extra == 0 {
                vec![Multiset::new()]
            } else {
                Vec::new()
            }
        }
        None => Multiset::multisets_of_size(&others, extra)
            .expect("non-empty colour set")
            .collect(),
    };
    fill.into_iter().map(|psi| base.add(&psi)).collect()
}

fn check_tubes(tubes: &Multiset) -> Result<()> {
    if tubes.is_empty() {
        return Err(Error::domain("at least one non-empty tube is required"));
    }
    Ok(())
}

fn covers(colors: &[Color], tubes: &Multiset, what: &str) -> Result<()> {
    match tubes.support().find(|c| !colors.contains(c)) {
        Some(c) => Err(Error::domain(format!("tube colour {c} does not occur in the {what}"))),
        None => Ok(()),
    }
}

/// Negative multinomial probability at `k`.
pub fn nmn_prob(omega: &Dist<Color>, tubes: &Multiset, k: u64) -> Rational {
    let colors: Vec<Color> = omega.support().cloned().collect();
    tubes
        .support()
        .map(|x| {
            let wx = omega.prob(x);
            completing_draws(&colors, tubes, x, k, None)
                .iter()
                .map(|phi| multinomial_prob(omega, phi) * &wx)
                .sum::<Rational>()
        })
        .sum()
}

/// Negative hypergeometric probability at `k`.
pub fn nhg_prob(urn: &Multiset, tubes: &Multiset, k: u64) -> Rational {
    let colors = urn.support_vec();
    let room = urn.sub(tubes).expect("υ ≥ τ");
    tubes
        .support()
        .map(|x| {
            completing_draws(&colors, tubes, x, k, Some(&room))
                .iter()
                .map(|phi| {
                    let rest = urn.sub(phi).expect("φ ≤ υ");
                    hypergeometric_prob(urn, phi) * flrn(&rest).expect("x remains").prob(x)
                })
                .sum::<Rational>()
        })
        .sum()
}

/// Negative Pólya probability at `k`.
pub fn npl_prob(urn: &Multiset, tubes: &Multiset, k: u64) -> Rational {
    let colors = urn.support_vec();
    tubes
        .support()
        .map(|x| {
            completing_draws(&colors, tubes, x, k, None)
                .iter()
                .map(|phi| polya_prob(urn, phi) * flrn(&urn.add(phi)).expect("non-empty").prob(x))
                .sum::<Rational>()
        })
        .sum()
}

/// Upper bound on the probability that the tubes are not all full after
/// `k` draws: `Σ_x P(fewer than τ(x) balls of colour x)`, clipped to 1.
pub fn negative_tail_bound(mode: DrawMode, urn: &Urn, tubes: &Multiset, k: u64) -> Result<Rational> {
    check_tubes(tubes)?;
    let bound: Rational = match mode {
        DrawMode::Multinomial => {
            let omega = urn.as_distribution(mode)?;
            covers(&urn.colors(), tubes, "distribution")?;
            tubes
                .iter()
                .map(|(x, len)| {
                    let p = omega.prob(x);
                    let s = p.complement();
                    (0..len.min(k + 1))
                        .map(|j| Rational::from(binomial(k, j)) * p.pow(j) * s.pow(k - j))
                        .sum::<Rational>()
                })
                .sum()
        }
        DrawMode::Polya => {
            let balls = urn.as_balls(mode)?;
            covers(&urn.colors(), tubes, "urn")?;
            let total = balls.size();
            let den = multichoose_ext(total, k);
            tubes
                .iter()
                .map(|(x, len)| {
                    let own = balls.count(x);
                    (0..len.min(k + 1))
                        .map(|j| {
                            let num = multichoose_ext(own, j) * multichoose_ext(total - own, k - j);
                            Rational::from_naturals(num, den.clone())
                        })
                        .sum::<Rational>()
                })
                .sum()
        }
        DrawMode::Hypergeometric => {
            return Err(Error::domain(
                "negative hypergeometric distributions have finite support; no tail bound needed",
            ))
        }
    };
    Ok(bound.min(Rational::one()))
}

/// Smallest `k ≥ ‖τ‖` whose tail bound is at most `eps`.
fn k_for_eps(mode: DrawMode, urn: &Urn, tubes: &Multiset, eps: &Rational) -> Result<u64> {
    if !eps.is_positive() {
        return Err(Error::domain("tail_eps must be positive"));
    }
    let bound = |k: u64| negative_tail_bound(mode, urn, tubes, k);
    let mut lo = tubes.size();
    let mut hi = TAIL_K_LIMIT.max(lo);
    let at_limit = bound(hi)?;
    if at_limit > *eps {
        return Err(Error::Resource(format!(
            "tail bound at k = {hi} is {:.6}, still above tail_eps {eps}; pass an explicit k_max",
            at_limit.approx()
        )));
    }
    if bound(lo)? <= *eps {
        return Ok(lo);
    }
    // bound(lo) > eps >= bound(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid)? <= *eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn resolve_cutoff(mode: DrawMode, urn: &Urn, tubes: &Multiset, cutoff: &Cutoff) -> Result<u64> {
    match cutoff {
        Cutoff::KMax(k) => Ok(*k),
        Cutoff::TailEps(eps) => k_for_eps(mode, urn, tubes, eps),
    }
}

fn collect(l: u64, k_max: u64, f: impl Fn(u64) -> Rational) -> Result<NatDist> {
    let entries: BTreeMap<u64, Rational> = (l..=k_max).map(|k| (k, f(k))).collect();
    NatDist::from_entries(entries, l, k_max.max(l))
}

/// Negative multinomial distribution of the number of draws until all tubes are full.
pub fn nmn(omega: &Dist<Color>, tubes: &Multiset, cutoff: &Cutoff) -> Result<NatDist> {
    check_tubes(tubes)?;
    let colors: Vec<Color> = omega.support().cloned().collect();
    covers(&colors, tubes, "distribution")?;
    let urn = Urn::Distribution(omega.clone());
    let k_max = resolve_cutoff(DrawMode::Multinomial, &urn, tubes, cutoff)?;
    collect(tubes.size(), k_max, |k| nmn_prob(omega, tubes, k))
}

/// Last `k` with positive negative-hypergeometric probability:
/// `max_x [τ(x) + Σ_{y≠x} υ(y)]`.
pub fn nhg_support_end(urn: &Multiset, tubes: &Multiset) -> u64 {
    let total = urn.size();
    tubes
        .iter()
        .map(|(x, len)| len + total - urn.count(x))
        .max()
        .unwrap_or(0)
}

/// Negative hypergeometric distribution; finite support, residual zero.
pub fn nhg(urn: &Multiset, tubes: &Multiset) -> Result<NatDist> {
    check_tubes(tubes)?;
    if !tubes.leq(urn) {
        return Err(Error::domain(format!("urn {urn} cannot fill tubes {tubes}")));
    }
    let end = nhg_support_end(urn, tubes);
    let nd = collect(tubes.size(), end, |k| nhg_prob(urn, tubes, k))?;
    debug_assert!(nd.residual().is_zero());
    Ok(nd)
}

/// Negative Pólya distribution of the number of draws until all tubes are full.
pub fn npl(urn: &Multiset, tubes: &Multiset, cutoff: &Cutoff) -> Result<NatDist> {
    check_tubes(tubes)?;
    covers(&urn.support_vec(), tubes, "urn")?;
    let u = Urn::Balls(urn.clone());
    let k_max = resolve_cutoff(DrawMode::Polya, &u, tubes, cutoff)?;
    collect(tubes.size(), k_max, |k| npl_prob(urn, tubes, k))
}

/// Negative distribution for any mode. The cutoff is ignored for the
/// hypergeometric mode, whose support is finite.
pub fn negative(mode: DrawMode, urn: &Urn, tubes: &Multiset, cutoff: &Cutoff) -> Result<NatDist> {
    match mode {
        DrawMode::Multinomial => nmn(urn.as_distribution(mode)?, tubes, cutoff),
        DrawMode::Hypergeometric => nhg(urn.as_balls(mode)?, tubes),
        DrawMode::Polya => npl(urn.as_balls(mode)?, tubes, cutoff),
    }
}

/// Automaton whose absorption time is the negative distribution. Positions
/// hold the urn (empty in multinomial mode) and the unfilled tube lengths;
/// the stage counter is the iteration index, so outputs carry no value.
pub fn negative_mmo(mode: DrawMode, urn: &Urn, tubes: &Multiset) -> Result<(Mmo<Position, ()>, Position)> {
    check_tubes(tubes)?;
    match mode {
        DrawMode::Multinomial => {
            let omega = urn.as_distribution(mode)?.clone();
            covers(&urn.colors(), tubes, "distribution")?;
            let start = Position {
                urn: Multiset::new(),
                tubes: tubes.clone(),
            };
            let mmo = Mmo::new(move |pos: &Position| negative_step(&pos.tubes, &omega, |_| Multiset::new()));
            Ok((mmo, start))
        }
        DrawMode::Hypergeometric | DrawMode::Polya => {
            let balls = urn.as_balls(mode)?.clone();
            covers(&balls.support_vec(), tubes, "urn")?;
            if mode == DrawMode::Hypergeometric && !tubes.leq(&balls) {
                return Err(Error::domain("urn cannot fill the tubes"));
            }
            let start = Position {
                urn: balls,
                tubes: tubes.clone(),
            };
            let mmo = Mmo::new(move |pos: &Position| {
                let draw = flrn(&pos.urn).expect("urn stays non-empty");
                negative_step(&pos.tubes, &draw, |x| match mode {
                    DrawMode::Hypergeometric => pos.urn.with_removed(x).expect("drawn colour present"),
                    _ => pos.urn.with_added(x),
                })
            })
            ;
            Ok((mmo, start))
        }
    }
}

/// Overflow into a full tube, fill the last missing ball, or shrink a tube.
fn negative_step(
    tubes: &Multiset,
    draw: &Dist<Color>,
    next_urn: impl Fn(&Color) -> Multiset,
) -> Dist<Step<Position, ()>> {
    let remaining = tubes.size();
    let entries = draw
        .iter()
        .map(|(x, p)| {
            let step = if tubes.count(x) == 0 {
                Step::Continue(Position {
                    urn: next_urn(x),
                    tubes: tubes.clone(),
                })
            } else if remaining == 1 {
                Step::Output(())
            } else {
                Step::Continue(Position {
                    urn: next_urn(x),
                    tubes: tubes.with_removed(x).expect("tube present"),
                })
            };
            (step, p.clone())
        })
        .collect::<Vec<_>>();
    let mut merged = BTreeMap::new();
    for (s, p) in entries {
        *merged.entry(s).or_insert_with(Rational::zero) += p;
    }
    Dist::from_map_unchecked(merged)
}

/// Negative distribution computed by running [`negative_mmo`] for `k_max`
/// steps; the mass absorbed at step `k` is the entry at `k`.
pub fn negative_via_mmo(mode: DrawMode, urn: &Urn, tubes: &Multiset, k_max: u64) -> Result<NatDist> {
    let (mmo, start) = negative_mmo(mode, urn, tubes)?;
    let profile = mmo.absorption_profile(&start, k_max as usize);
    let entries = profile
        .by_step
        .iter()
        .enumerate()
        .filter_map(|(i, out)| out.get(&()).map(|m| (i as u64 + 1, m.clone())))
        .collect();
    let nd = NatDist::from_entries(entries, tubes.size(), k_max.max(tubes.size()))?;
    debug_assert_eq!(nd.residual(), &profile.residual);
    Ok(nd)
}

/// One step of a negative automaton run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    pub step: u64,
    /// Mass absorbed at this step, i.e. the probability of `k = step`.
    pub absorbed: Rational,
    /// Mass still on positions after this step.
    pub continuing: Rational,
    /// Number of distinct positions after merging.
    pub positions: usize,
}

/// Step-by-step run of [`negative_mmo`] for at most `k_max` steps.
pub fn negative_trace(mode: DrawMode, urn: &Urn, tubes: &Multiset, k_max: u64) -> Result<Vec<TraceRow>> {
    let (mmo, start) = negative_mmo(mode, urn, tubes)?;
    let mut prev = Rational::zero();
    let rows = mmo
        .iterations(start)
        .skip(1)
        .take(k_max as usize)
        .enumerate()
        .map(|(i, state)| {
            let absorbed_total = state.outputs.get(&()).cloned().unwrap_or_default();
            let row = TraceRow {
                step: i as u64 + 1,
                absorbed: &absorbed_total - &prev,
                continuing: state.continuing_mass(),
                positions: state.positions.len(),
            };
            prev = absorbed_total;
            row
        })
        .collect();
    Ok(rows)
}

/// Closed forms for a single tube `m·y`, evaluated at `m + k`.
pub fn single_tube_negative(mode: DrawMode, urn: &Urn, y: &Color, m: u64, k: u64) -> Result<Rational> {
    if m == 0 {
        return Err(Error::domain("tube length must be at least 1"));
    }
    let weight = Rational::ratio(m, m + k);
    match mode {
        DrawMode::Multinomial => {
            let s = urn.as_distribution(mode)?.prob(y);
            if !s.is_positive() || s >= Rational::one() {
                return Err(Error::domain(format!("need 0 < ω({y}) < 1, got {s}")));
            }
            let bivariate = Rational::from(binomial(m + k, m)) * s.pow(m) * s.complement().pow(k);
            Ok(weight * bivariate)
        }
        DrawMode::Hypergeometric => {
            let balls = urn.as_balls(mode)?;
            let own = balls.count(y);
            if own < m {
                return Err(Error::domain(format!("urn holds {own} < {m} balls of colour {y}")));
            }
            let total = balls.size();
            if m + k > total {
                return Ok(Rational::zero());
            }
            let num = binomial(own, m) * binomial(total - own, k);
            Ok(weight * Rational::from_naturals(num, binomial(total, m + k)))
        }
        DrawMode::Polya => {
            let balls = urn.as_balls(mode)?;
            let own = balls.count(y);
            if own == 0 {
                return Err(Error::domain(format!("urn holds no balls of colour {y}")));
            }
            let total = balls.size();
            let num = multichoose_ext(own, m) * multichoose_ext(total - own, k);
            Ok(weight * Rational::from_naturals(num, multichoose_ext(total, m + k)))
        }
    }
}
