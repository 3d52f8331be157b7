//! Conditioning constructions and checkers for the two-colour identities
//! that fall out of the first-full and negative distributions.
//!
//! Tuples `(n_1, …, n_ℓ)` are identified with multisets over the colours
//! `c1, …, cℓ` by [`tuple_to_multiset`] and [`multiset_to_tuple`].

use serde::Serialize;

use crate::dist::{tensor_all, Dist, Predicate};
use crate::draws::{binomial_pmf, negbinomial_pmf};
use crate::error::{Error, Result};
use crate::multiset::{mbinom, mmultichoose, multichoose_ext, Color, Multiset};
use crate::numeric::{binomial, Rational};

/// Indicator of `n_1 + … + n_ℓ = K` on `ℓ`-tuples.
pub fn sum_predicate(total: u64, len: usize) -> Result<Predicate<Vec<u64>>> {
    if len == 0 {
        return Err(Error::domain("sum predicate needs ℓ ≥ 1"));
    }
    Ok(Predicate::indicator(move |t: &Vec<u64>| {
        t.len() == len && t.iter().sum::<u64>() == total
    }))
}

/// Colour standing for tuple position `i` (zero based).
pub fn tuple_color(i: usize) -> Color {
    Color::new(format!("c{}", i + 1)).expect("valid label")
}

pub fn tuple_to_multiset(t: &[u64]) -> Multiset {
    Multiset::from_counts(t.iter().enumerate().map(|(i, &n)| (tuple_color(i), n)))
}

pub fn multiset_to_tuple(m: &Multiset, len: usize) -> Vec<u64> {
    (0..len).map(|i| m.count(&tuple_color(i))).collect()
}

fn check_interior(r: &Rational) -> Result<()> {
    if !r.is_positive() || *r >= Rational::one() {
        return Err(Error::domain(format!("r = {r} must lie in (0,1)")));
    }
    Ok(())
}

/// Parallel binomials `bn[k_i](r)` conditioned on their sum being `K`.
/// The result is the hypergeometric draw of size `K` from `Σ k_i·c_i`.
pub fn hypergeometric_via_conditioning(ks: &[u64], r: &Rational, total: u64) -> Result<Dist<Vec<u64>>> {
    check_interior(r)?;
    if total > ks.iter().sum::<u64>() {
        return Err(Error::domain(format!("K = {total} exceeds Σk_i")));
    }
    let factors = ks.iter().map(|&k| binomial_pmf(k, r)).collect::<Result<Vec<_>>>()?;
    tensor_all(&factors).condition(&sum_predicate(total, ks.len())?)
}

/// Parallel negative binomials `nbn[k_i](r)` conditioned on their sum being
/// `K`. Each factor is truncated at `k_max ≥ K`; its tail mass sits on a
/// `None` outcome, which the predicate rejects, so the truncation is exact.
/// The entry at `(k_i + n_i)_i` is the Pólya probability of `Σ n_i·c_i` for
/// a draw of size `K - Σk_i` from the urn `Σ k_i·c_i`.
pub fn polya_via_conditioning(ks: &[u64], r: &Rational, total: u64, k_max: u64) -> Result<Dist<Vec<u64>>> {
    check_interior(r)?;
    if ks.contains(&0) {
        return Err(Error::domain("every k_i must be at least 1"));
    }
    if total < ks.iter().sum::<u64>() {
        return Err(Error::domain(format!("K = {total} is below Σk_i")));
    }
    if k_max < total {
        return Err(Error::domain(format!("truncation {k_max} is below K = {total}")));
    }
    let factors = ks
        .iter()
        .map(|&k| {
            let nd = negbinomial_pmf(k, r, k_max)?;
            let mut pairs: Vec<(Option<u64>, Rational)> =
                nd.entries().iter().map(|(&n, p)| (Some(n), p.clone())).collect();
            pairs.push((None, nd.residual().clone()));
            Dist::from_pairs(pairs)
        })
        .collect::<Result<Vec<_>>>()?;
    let len = ks.len();
    let pred = Predicate::indicator(move |t: &Vec<Option<u64>>| {
        t.len() == len && t.iter().try_fold(0u64, |acc, n| n.map(|n| acc + n)) == Some(total)
    });
    let conditioned = tensor_all(&factors).condition(&pred)?;
    Ok(conditioned.map(|t| t.iter().map(|n| n.expect("sentinel rejected")).collect()))
}

/// Parameters of the two-colour identities, for tubes `n·a + m·b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum IdentityParams {
    /// A coin with `P(a) = r`, `P(b) = s`.
    Coin { n: u64, m: u64, r: Rational, s: Rational },
    /// An urn with `N` balls of colour `a` and `M` of colour `b`.
    Urn {
        n: u64,
        m: u64,
        #[serde(rename = "N")]
        big_n: u64,
        #[serde(rename = "M")]
        big_m: u64,
    },
}

/// Both sides of an identity and whether it held.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub params: serde_json::Value,
    pub lhs: Rational,
    pub rhs: Rational,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl IdentityReport {
    fn exact(identity: &str, params: serde_json::Value, lhs: Rational, rhs: Rational) -> Self {
        let holds = lhs == rhs;
        IdentityReport {
            identity: identity.to_string(),
            params,
            lhs,
            rhs,
            holds,
            note: None,
        }
    }
}

fn mc(n: u64, m: u64) -> Rational {
    Rational::from(multichoose_ext(n, m))
}

fn bin(n: u64, k: u64) -> Rational {
    Rational::from(binomial(n, k))
}

fn coin(params: &IdentityParams, open: bool) -> Result<(u64, u64, &Rational, &Rational)> {
    match params {
        IdentityParams::Coin { n, m, r, s } => {
            if *n == 0 || *m == 0 {
                return Err(Error::domain("n and m must be positive"));
            }
            if (r + s) != Rational::one() {
                return Err(Error::domain(format!("r + s = {} ≠ 1", r + s)));
            }
            if open {
                check_interior(r)?;
            } else if !r.is_probability() || !s.is_probability() {
                return Err(Error::domain("r and s must lie in [0,1]"));
            }
            Ok((*n, *m, r, s))
        }
        IdentityParams::Urn { .. } => Err(Error::domain("this identity takes n, m, r, s")),
    }
}

fn urn(params: &IdentityParams, covering: bool) -> Result<(u64, u64, u64, u64)> {
    match *params {
        IdentityParams::Urn { n, m, big_n, big_m } => {
            if n == 0 || m == 0 {
                return Err(Error::domain("n and m must be positive"));
            }
            if covering && (big_n < n || big_m < m) {
                return Err(Error::domain("need N ≥ n and M ≥ m"));
            }
            if big_n == 0 || big_m == 0 {
                return Err(Error::domain("need N > 0 and M > 0"));
            }
            Ok((n, m, big_n, big_m))
        }
        IdentityParams::Coin { .. } => Err(Error::domain("this identity takes n, m, N, M")),
    }
}

fn to_json(params: &IdentityParams) -> serde_json::Value {
    serde_json::to_value(params).expect("params serialize")
}

/// Checks item 1 (coin), 2 (urn, drawn balls removed) or 3 (urn, Pólya) of
/// the identities stating that a two-colour first-full distribution sums to 1.
pub fn check_firstfull_identity(item: u8, params: &IdentityParams) -> Result<IdentityReport> {
    let json = to_json(params);
    match item {
        1 => {
            let (n, m, r, s) = coin(params, false)?;
            let left: Rational = (0..m).map(|j| mc(n, j) * s.pow(j)).sum::<Rational>() * r.pow(n)
                + (0..n).map(|i| mc(m, i) * r.pow(i)).sum::<Rational>() * s.pow(m);
            Ok(IdentityReport::exact("firstfull-multinomial", json, left, Rational::one()))
        }
        2 => {
            let (n, m, big_n, big_m) = urn(params, true)?;
            let left: Rational = (0..m)
                .map(|j| mc(n, j) * bin(big_n - n + big_m - j, big_n - n))
                .chain((0..n).map(|i| mc(m, i) * bin(big_n - i + big_m - m, big_m - m)))
                .sum();
            Ok(IdentityReport::exact("firstfull-hypergeometric", json, left, bin(big_n + big_m, big_n)))
        }
        3 => {
            let (n, m, big_n, big_m) = urn(params, false)?;
            let total = big_n + big_m;
            let left = Rational::from_integer(n) * mc(big_n, n) * (0..m).map(|j| mc(big_m, j) / mc(n + j, total)).sum::<Rational>()
                + Rational::from_integer(m) * mc(big_m, m) * (0..n).map(|i| mc(big_n, i) / mc(i + m, total)).sum::<Rational>();
            Ok(IdentityReport::exact("firstfull-polya", json, left, Rational::from_integer(total)))
        }
        _ => Err(Error::domain(format!("no identity item {item}; expected 1, 2 or 3"))),
    }
}

/// Checks item 1, 2 or 3 of the identities stating that a two-colour
/// negative distribution sums to 1. Item 2 is a finite sum and is checked
/// exactly. Items 1 and 3 are series: the first `truncation` terms of each
/// inner sum are added and the check passes when the partial sums never
/// decrease, stay at or below the right-hand side, and end less than
/// `tolerance` below it.
pub fn check_negative_identity(
    item: u8,
    params: &IdentityParams,
    truncation: u64,
    tolerance: &Rational,
) -> Result<IdentityReport> {
    let json = to_json(params);
    let (name, terms, rhs): (&str, Vec<Rational>, Rational) = match item {
        1 => {
            let (n, m, r, s) = coin(params, true)?;
            let terms = (0..truncation).map(|i| mc(n, m + i) * s.pow(i) + mc(m, n + i) * r.pow(i)).collect();
            let rhs = (r.pow(n) * s.pow(m)).recip()?;
            ("negative-multinomial", terms, rhs)
        }
        2 => {
            let (n, m, big_n, big_m) = urn(params, true)?;
            let left: Rational = (0..=big_m - m)
                .map(|j| mc(n, m + j) * bin(big_n - n + big_m - m - j, big_n - n))
                .chain((0..=big_n - n).map(|i| mc(m, n + i) * bin(big_n - n - i + big_m - m, big_m - m)))
                .sum();
            return Ok(IdentityReport::exact("negative-hypergeometric", json, left, bin(big_n + big_m, big_n)));
        }
        3 => {
            let (n, m, big_n, big_m) = urn(params, false)?;
            let total = big_n + big_m;
            let wa = Rational::from_integer(n) * mc(big_n, n);
            let wb = Rational::from_integer(m) * mc(big_m, m);
            let terms = (0..truncation)
                .map(|t| {
                    &wa * mc(big_m, m + t) / mc(n + m + t, total) + &wb * mc(big_n, n + t) / mc(n + t + m, total)
                })
                .collect();
            ("negative-polya", terms, Rational::from_integer(total))
        }
        _ => return Err(Error::domain(format!("no identity item {item}; expected 1, 2 or 3"))),
    };
    let mut partial = Rational::zero();
    let mut monotone = true;
    for t in &terms {
        let next = &partial + t;
        monotone &= next >= partial;
        partial = next;
    }
    let gap = &rhs - &partial;
    let holds = monotone && !gap.is_negative() && gap < *tolerance;
    Ok(IdentityReport {
        identity: name.to_string(),
        params: json,
        note: Some(format!(
            "partial sum of {truncation} terms per series; gap {gap} (~{:.6}) vs tolerance {tolerance}; monotone: {monotone}",
            gap.approx()
        )),
        lhs: partial,
        rhs,
        holds,
    })
}

/// `Σ_{φ ≤_K ψ} (ψ choose φ) = C(‖ψ‖, K)`.
pub fn check_binomial_vandermonde(psi: &Multiset, k: u64) -> Result<IdentityReport> {
    if k > psi.size() {
        return Err(Error::domain(format!("K = {k} exceeds ‖ψ‖ = {}", psi.size())));
    }
    let left: Rational = psi
        .submultisets_of_size(k)
        .map(|phi| Rational::from(mbinom(psi, &phi).expect("φ ≤ ψ")))
        .sum();
    let params = serde_json::json!({ "psi": psi.to_string(), "K": k });
    Ok(IdentityReport::exact("vandermonde", params, left, bin(psi.size(), k)))
}

/// `Σ_{φ ∈ M[K](supp ψ)} ⦅ψ, φ⦆ = ⦅‖ψ‖, K⦆`.
pub fn check_multichoose_vandermonde(psi: &Multiset, k: u64) -> Result<IdentityReport> {
    let left: Rational = Multiset::multisets_of_size(&psi.support_vec(), k)?
        .map(|phi| Rational::from(mmultichoose(psi, &phi).expect("same support")))
        .sum();
    let params = serde_json::json!({ "psi": psi.to_string(), "K": k });
    Ok(IdentityReport::exact("multichoose-vandermonde", params, left, mc(psi.size(), k)))
}
