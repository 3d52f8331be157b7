//! Multinomial, hypergeometric and Pólya draw distributions on multisets,
//! their (negative) binomial special cases, and a sequence-level oracle.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dist::{flrn, Dist, NatDist};
use crate::error::{Error, Result};
use crate::multiset::{mbinom, mmultichoose, multichoose, Color, Multiset};
use crate::numeric::{binomial, Rational};

/// How a drawn ball is treated: returned (0), removed (-1) or doubled (+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DrawMode {
    Multinomial,
    Hypergeometric,
    Polya,
}

impl DrawMode {
    pub const ALL: [DrawMode; 3] = [DrawMode::Multinomial, DrawMode::Hypergeometric, DrawMode::Polya];
}

impl fmt::Display for DrawMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DrawMode::Multinomial => "multinomial",
            DrawMode::Hypergeometric => "hypergeometric",
            DrawMode::Polya => "polya",
        })
    }
}

impl FromStr for DrawMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "multinomial" | "mn" | "0" => Ok(DrawMode::Multinomial),
            "hypergeometric" | "hg" | "-1" => Ok(DrawMode::Hypergeometric),
            "polya" | "pólya" | "pl" | "+1" => Ok(DrawMode::Polya),
            other => Err(Error::parse(0, format!("unknown draw mode {other:?}"))),
        }
    }
}

/// An urn in either representation: a colour distribution (multinomial
/// mode) or a multiset of balls (hypergeometric and Pólya modes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Urn {
    Distribution(Dist<Color>),
    Balls(Multiset),
}

impl Urn {
    pub fn colors(&self) -> Vec<Color> {
        match self {
            Urn::Distribution(d) => d.support().cloned().collect(),
            Urn::Balls(m) => m.support_vec(),
        }
    }

    pub(crate) fn as_distribution(&self, mode: DrawMode) -> Result<&Dist<Color>> {
        match self {
            Urn::Distribution(d) => Ok(d),
            Urn::Balls(_) => Err(Error::domain(format!("{mode} mode needs a distribution urn"))),
        }
    }

    pub(crate) fn as_balls(&self, mode: DrawMode) -> Result<&Multiset> {
        match self {
            Urn::Balls(m) => Ok(m),
            Urn::Distribution(_) => Err(Error::domain(format!("{mode} mode needs a multiset urn"))),
        }
    }
}

/// `mn[‖φ‖](ω)(φ) = coefm(φ) · ∏ ω(x)^φ(x)`.
pub fn multinomial_prob(omega: &Dist<Color>, phi: &Multiset) -> Rational {
    let mut p = Rational::from(phi.coefm());
    for (c, n) in phi.iter() {
        let w = omega.prob(c);
        if w.is_zero() {
            return Rational::zero();
        }
        p *= &w.pow(n);
    }
    p
}

/// `hg[‖φ‖](υ)(φ) = mbinom(υ, φ) / C(‖υ‖, ‖φ‖)`; zero unless `φ ≤ υ`.
pub fn hypergeometric_prob(urn: &Multiset, phi: &Multiset) -> Rational {
    match mbinom(urn, phi) {
        Ok(num) => Rational::from_naturals(num, binomial(urn.size(), phi.size())),
        Err(_) => Rational::zero(),
    }
}

/// `pl[‖φ‖](υ)(φ) = mmultichoose(υ, φ) / ⦅‖υ‖, ‖φ‖⦆`; zero outside the urn's support.
/// Panics on an empty urn.
pub fn polya_prob(urn: &Multiset, phi: &Multiset) -> Rational {
    let den = multichoose(urn.size(), phi.size()).expect("Pólya draw from an empty urn");
    match mmultichoose(urn, phi) {
        Ok(num) => Rational::from_naturals(num, den),
        Err(_) => Rational::zero(),
    }
}

/// Multinomial distribution of `k`-draws with replacement from `omega`.
pub fn multinomial_pmf(omega: &Dist<Color>, k: u64) -> Dist<Multiset> {
    let colors: Vec<Color> = omega.support().cloned().collect();
    let draws = Multiset::multisets_of_size(&colors, k).expect("distribution support is non-empty");
    Dist::from_map_unchecked(draws.map(|phi| {
        let p = multinomial_prob(omega, &phi);
        (phi, p)
    }).collect())
}

/// Hypergeometric distribution of `k`-draws without replacement.
pub fn hypergeometric_pmf(urn: &Multiset, k: u64) -> Result<Dist<Multiset>> {
    if k > urn.size() {
        return Err(Error::domain(format!(
            "cannot draw {k} balls from an urn of size {}",
            urn.size()
        )));
    }
    let total = binomial(urn.size(), k);
    let entries: BTreeMap<_, _> = urn
        .submultisets_of_size(k)
        .map(|phi| {
            let num = mbinom(urn, &phi).expect("enumerated below the urn");
            (phi, Rational::from_naturals(num, total.clone()))
        })
        .collect();
    Ok(Dist::from_map_unchecked(entries))
}

/// Pólya distribution of `k`-draws where each drawn ball is returned with a copy.
pub fn polya_pmf(urn: &Multiset, k: u64) -> Result<Dist<Multiset>> {
    if urn.is_empty() {
        return Err(Error::domain("Pólya draws need a non-empty urn"));
    }
    let total = multichoose(urn.size(), k)?;
    let colors = urn.support_vec();
    let entries: BTreeMap<_, _> = Multiset::multisets_of_size(&colors, k)?
        .map(|phi| {
            let num = mmultichoose(urn, &phi).expect("enumerated inside the support");
            (phi, Rational::from_naturals(num, total.clone()))
        })
        .collect();
    Ok(Dist::from_map_unchecked(entries))
}

/// Draw distribution for any mode.
pub fn draw_pmf(mode: DrawMode, urn: &Urn, k: u64) -> Result<Dist<Multiset>> {
    match mode {
        DrawMode::Multinomial => Ok(multinomial_pmf(urn.as_distribution(mode)?, k)),
        DrawMode::Hypergeometric => hypergeometric_pmf(urn.as_balls(mode)?, k),
        DrawMode::Polya => polya_pmf(urn.as_balls(mode)?, k),
    }
}

fn check_probability(r: &Rational, what: &str) -> Result<()> {
    if r.is_probability() {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} {r} is outside [0,1]")))
    }
}

/// `bn[K](r)(k) = C(K, k) · r^k · (1 - r)^(K - k)`.
pub fn binomial_pmf(k_total: u64, r: &Rational) -> Result<Dist<u64>> {
    check_probability(r, "success probability")?;
    let s = r.complement();
    let entries = (0..=k_total)
        .map(|k| {
            let p = Rational::from(binomial(k_total, k)) * r.pow(k) * s.pow(k_total - k);
            (k, p)
        })
        .collect();
    Ok(Dist::from_map_unchecked(entries))
}

/// Single negative binomial probability `⦅m, i⦆ · s^m · (1 - s)^i` at `m + i`.
pub fn negbinomial_prob(m: u64, s: &Rational, i: u64) -> Rational {
    Rational::from(multichoose(m, i).expect("m ≥ 1")) * s.pow(m) * s.complement().pow(i)
}

/// Negative binomial: number of trials until the `m`-th success, with
/// entries on `[m, k_max]` and the exact remaining mass as residual.
pub fn negbinomial_pmf(m: u64, s: &Rational, k_max: u64) -> Result<NatDist> {
    if m == 0 {
        return Err(Error::domain("negative binomial needs m ≥ 1"));
    }
    check_probability(s, "success probability")?;
    if s.is_zero() {
        return Err(Error::domain("success probability 0 never completes"));
    }
    if k_max < m {
        return Err(Error::domain(format!("k_max {k_max} is below m = {m}")));
    }
    let entries = if s.is_one() {
        BTreeMap::from([(m, Rational::one())])
    } else {
        (0..=k_max - m).map(|i| (m + i, negbinomial_prob(m, s, i))).collect()
    };
    NatDist::from_entries(entries, m, k_max)
}

/// Enumeration bound for [`sequence_oracle`].
pub const SEQUENCE_LIMIT: u64 = 10_000_000;

/// Draw distribution computed by summing stepwise probabilities over every
/// length-`k` colour sequence, grouped by the multiset it accumulates to.
pub fn sequence_oracle(mode: DrawMode, urn: &Urn, k: u64) -> Result<Dist<Multiset>> {
    let colors = urn.colors();
    let count = (colors.len() as u64).checked_pow(u32::try_from(k).unwrap_or(u32::MAX));
    if count.is_none_or(|c| c > SEQUENCE_LIMIT) {
        return Err(Error::Resource(format!(
            "{} colours and {k} draws exceed {SEQUENCE_LIMIT} sequences",
            colors.len()
        )));
    }
    let start = match mode {
        DrawMode::Multinomial => {
            urn.as_distribution(mode)?;
            Multiset::new()
        }
        DrawMode::Hypergeometric => {
            let u = urn.as_balls(mode)?;
            if k > u.size() {
                return Err(Error::domain("draw larger than the urn"));
            }
            u.clone()
        }
        DrawMode::Polya => {
            let u = urn.as_balls(mode)?;
            if u.is_empty() {
                return Err(Error::domain("Pólya draws need a non-empty urn"));
            }
            u.clone()
        }
    };
    let mut out = BTreeMap::new();
    let mut drawn = Vec::with_capacity(k as usize);
    walk_sequences(mode, urn, &colors, &start, k, Rational::one(), &mut drawn, &mut out);
    Ok(Dist::from_map_unchecked(out))
}

#[allow(clippy::too_many_arguments)]
fn walk_sequences(
    mode: DrawMode,
    urn: &Urn,
    colors: &[Color],
    state: &Multiset,
    remaining: u64,
    weight: Rational,
    drawn: &mut Vec<Color>,
    out: &mut BTreeMap<Multiset, Rational>,
) {
    if remaining == 0 {
        *out.entry(Multiset::acc(drawn.iter())).or_insert_with(Rational::zero) += weight;
        return;
    }
    let step = match mode {
        DrawMode::Multinomial => match urn {
            Urn::Distribution(d) => d.clone(),
            Urn::Balls(_) => unreachable!("checked by caller"),
        },
        DrawMode::Hypergeometric | DrawMode::Polya => flrn(state).expect("urn stays non-empty"),
    };
    for c in colors {
        let p = step.prob(c);
        if p.is_zero() {
            continue;
        }
        let next = match mode {
            DrawMode::Multinomial => state.clone(),
            DrawMode::Hypergeometric => state.with_removed(c).expect("positive probability"),
            DrawMode::Polya => state.with_added(c),
        };
        drawn.push(c.clone());
        walk_sequences(mode, urn, colors, &next, remaining - 1, &weight * &p, drawn, out);
        drawn.pop();
    }
}
