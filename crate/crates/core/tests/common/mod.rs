//! Brute-force oracles for the integration tests: walk the full tree of
//! draw sequences with plain counters, sharing no code with the library
//! beyond rational arithmetic.

#![allow(dead_code)]

use std::collections::BTreeMap;

use urntubes::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Weights stay fixed.
    Returned,
    /// Drawn ball leaves the urn.
    Removed,
    /// Drawn ball comes back with a copy.
    Doubled,
}

/// Urn as colour → weight. For `Returned` the weights are only normalised.
pub type Counts = BTreeMap<String, u64>;

fn draw_probs(urn: &Counts) -> Vec<(String, Rational)> {
    let total: u64 = urn.values().sum();
    urn.iter()
        .filter(|(_, &n)| n > 0)
        .map(|(c, &n)| (c.clone(), Rational::ratio(n, total)))
        .collect()
}

fn after_draw(mode: Mode, urn: &Counts, c: &str) -> Counts {
    let mut next = urn.clone();
    let n = next.get_mut(c).expect("drawn colour present");
    match mode {
        Mode::Returned => {}
        Mode::Removed => *n -= 1,
        Mode::Doubled => *n += 1,
    }
    next
}

/// Probability that each colour's tube is the first to fill.
pub fn first_full(mode: Mode, urn: &Counts, tubes: &Counts) -> BTreeMap<String, Rational> {
    let mut out = BTreeMap::new();
    walk_first(mode, urn, tubes, Rational::one(), &mut out);
    out
}

fn walk_first(mode: Mode, urn: &Counts, left: &Counts, p: Rational, out: &mut BTreeMap<String, Rational>) {
    for (c, q) in draw_probs(urn) {
        let w = &p * &q;
        let need = left.get(&c).copied().unwrap_or(0);
        if need == 1 {
            *out.entry(c).or_insert_with(Rational::zero) += w;
        } else {
            let mut next_left = left.clone();
            if need > 1 {
                *next_left.get_mut(&c).unwrap() -= 1;
            }
            walk_first(mode, &after_draw(mode, urn, &c), &next_left, w, out);
        }
    }
}

/// Probability that all tubes are full for the first time after `k`
/// draws, for every `k ≤ k_max`.
pub fn negative(mode: Mode, urn: &Counts, tubes: &Counts, k_max: u64) -> BTreeMap<u64, Rational> {
    let mut out = BTreeMap::new();
    walk_negative(mode, urn, tubes, 0, k_max, Rational::one(), &mut out);
    out
}

fn walk_negative(
    mode: Mode,
    urn: &Counts,
    left: &Counts,
    k: u64,
    k_max: u64,
    p: Rational,
    out: &mut BTreeMap<u64, Rational>,
) {
    if k == k_max {
        return;
    }
    let remaining: u64 = left.values().sum();
    for (c, q) in draw_probs(urn) {
        let w = &p * &q;
        let need = left.get(&c).copied().unwrap_or(0);
        if need == 1 && remaining == 1 {
            *out.entry(k + 1).or_insert_with(Rational::zero) += w;
            continue;
        }
        let mut next_left = left.clone();
        if need > 0 {
            *next_left.get_mut(&c).unwrap() -= 1;
        }
        walk_negative(mode, &after_draw(mode, urn, &c), &next_left, k + 1, k_max, w, out);
    }
}

/// Distribution of the counts drawn in `k` steps, keyed by sorted `(colour, count)` lists.
pub fn draws(mode: Mode, urn: &Counts, k: u64) -> BTreeMap<Vec<(String, u64)>, Rational> {
    let mut out = BTreeMap::new();
    walk_draws(mode, urn, k, &BTreeMap::new(), Rational::one(), &mut out);
    out
}

fn walk_draws(
    mode: Mode,
    urn: &Counts,
    k: u64,
    drawn: &Counts,
    p: Rational,
    out: &mut BTreeMap<Vec<(String, u64)>, Rational>,
) {
    if k == 0 {
        let key: Vec<(String, u64)> = drawn.iter().map(|(c, n)| (c.clone(), *n)).collect();
        *out.entry(key).or_insert_with(Rational::zero) += p;
        return;
    }
    for (c, q) in draw_probs(urn) {
        let mut next = drawn.clone();
        *next.entry(c.clone()).or_insert(0) += 1;
        walk_draws(mode, &after_draw(mode, urn, &c), k - 1, &next, &p * &q, out);
    }
}

pub fn counts(pairs: &[(&str, u64)]) -> Counts {
    pairs.iter().filter(|(_, n)| *n > 0).map(|(c, n)| (c.to_string(), *n)).collect()
}

/// Plain `C(n, k)` over u128, for small arguments.
pub fn choose(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}
