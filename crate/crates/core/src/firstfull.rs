//! First-full distributions: which colour's tube fills first.
//!
//! Each probability is a sum over the draws `φ ≺ τ` that leave exactly one
//! ball missing in tube `x`, weighted by the probability of the draw and
//! of then drawing `x`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dist::{flrn, Dist};
use crate::draws::{hypergeometric_prob, multinomial_prob, polya_prob, DrawMode, Urn};
use crate::error::{Error, Result};
use crate::multiset::{Color, Multiset};
use crate::numeric::Rational;

/// A non-empty multiset of tubes; the colour space is its support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct TubeConfig(Multiset);

impl TubeConfig {
    pub fn new(tubes: Multiset) -> Result<Self> {
        if tubes.is_empty() {
            return Err(Error::domain("at least one tube is required"));
        }
        Ok(TubeConfig(tubes))
    }

    pub fn tubes(&self) -> &Multiset {
        &self.0
    }

    pub fn colors(&self) -> Vec<Color> {
        self.0.support_vec()
    }
}

/// Draws `φ` with `φ ≺ τ` and `φ(x) = τ(x) - 1`, sorted.
pub fn almost_full_draws(tubes: &Multiset, x: &Color) -> Vec<Multiset> {
    let mut out = vec![Multiset::single(x.clone(), tubes.count(x) - 1)];
    for (y, len) in tubes.iter() {
        if y == x {
            continue;
        }
        out = out
            .into_iter()
            .flat_map(|phi| {
                (0..len).map(move |n| {
                    let mut next = phi.clone();
                    next.insert(y.clone(), n);
                    next
                })
            })
            .collect();
    }
    out.sort();
    out
}

fn same_support(a: &[Color], tubes: &TubeConfig, what: &str) -> Result<()> {
    if a != tubes.colors().as_slice() {
        return Err(Error::domain(format!(
            "{what} colours {{{}}} differ from tube colours {{{}}}",
            join(a),
            join(&tubes.colors())
        )));
    }
    Ok(())
}

fn join(cs: &[Color]) -> String {
    cs.iter().map(Color::as_str).collect::<Vec<_>>().join(",")
}

fn first_full_with(
    tubes: &TubeConfig,
    weight: impl Fn(&Multiset, &Color) -> Rational,
) -> Dist<Color> {
    let entries: BTreeMap<Color, Rational> = tubes
        .colors()
        .into_iter()
        .map(|x| {
            let p = almost_full_draws(tubes.tubes(), &x)
                .iter()
                .map(|phi| weight(phi, &x))
                .sum();
            (x, p)
        })
        .collect();
    Dist::from_map_unchecked(entries)
}

/// Multinomial first-full: balls are returned after each draw.
pub fn mnff(omega: &Dist<Color>, tubes: &TubeConfig) -> Result<Dist<Color>> {
    let colors: Vec<Color> = omega.support().cloned().collect();
    same_support(&colors, tubes, "distribution")?;
    Ok(first_full_with(tubes, |phi, x| multinomial_prob(omega, phi) * omega.prob(x)))
}

/// Hypergeometric first-full: drawn balls leave the urn; needs `υ ≥ τ`.
pub fn hgff(urn: &Multiset, tubes: &TubeConfig) -> Result<Dist<Color>> {
    same_support(&urn.support_vec(), tubes, "urn")?;
    if !tubes.tubes().leq(urn) {
        return Err(Error::domain(format!("urn {urn} cannot fill tubes {}", tubes.tubes())));
    }
    Ok(first_full_with(tubes, |phi, x| {
        let rest = urn.sub(phi).expect("φ ≺ τ ≤ υ");
        hypergeometric_prob(urn, phi) * flrn(&rest).expect("non-empty").prob(x)
    }))
}

/// Pólya first-full: each drawn ball is returned with an extra copy.
pub fn plff(urn: &Multiset, tubes: &TubeConfig) -> Result<Dist<Color>> {
    same_support(&urn.support_vec(), tubes, "urn")?;
    Ok(first_full_with(tubes, |phi, x| {
        let grown = urn.add(phi);
        polya_prob(urn, phi) * flrn(&grown).expect("non-empty").prob(x)
    }))
}

/// First-full distribution for any mode.
pub fn first_full(mode: DrawMode, urn: &Urn, tubes: &TubeConfig) -> Result<Dist<Color>> {
    match mode {
        DrawMode::Multinomial => mnff(urn.as_distribution(mode)?, tubes),
        DrawMode::Hypergeometric => hgff(urn.as_balls(mode)?, tubes),
        DrawMode::Polya => plff(urn.as_balls(mode)?, tubes),
    }
}

/// Fair division of an interrupted race to `target` wins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointsShare {
    /// Chances of players `A` and `B` to win if play continued.
    pub rho: Dist<Color>,
    /// `rho(A) · stake`.
    pub share: Rational,
}

/// Problem of points: `A` wins a round with probability `p_a`, the game
/// ends at `target` wins, and play stopped at `wins_a : wins_b`.
pub fn points_share(
    target: u64,
    wins_a: u64,
    wins_b: u64,
    p_a: &Rational,
    stake: &Rational,
) -> Result<PointsShare> {
    if wins_a >= target || wins_b >= target {
        return Err(Error::domain("a player has already reached the target"));
    }
    if !p_a.is_positive() || *p_a >= Rational::one() {
        return Err(Error::domain(format!("win probability {p_a} must lie in (0,1)")));
    }
    let a = Color::new("A").expect("label");
    let b = Color::new("B").expect("label");
    let omega = Dist::from_pairs([(a.clone(), p_a.clone()), (b.clone(), p_a.complement())])?;
    let tubes = TubeConfig::new(Multiset::from_counts([
        (a.clone(), target - wins_a),
        (b, target - wins_b),
    ]))?;
    let rho = mnff(&omega, &tubes)?;
    let share = rho.prob(&a) * stake;
    Ok(PointsShare { rho, share })
}

/// The table of shares for every interrupted score `0 ≤ a, b < target`,
/// indexed `[a][b]`.
pub fn points_grid(target: u64, p_a: &Rational, stake: &Rational) -> Result<Vec<Vec<PointsShare>>> {
    (0..target)
        .map(|a| (0..target).map(|b| points_share(target, a, b, p_a, stake)).collect())
        .collect()
}
