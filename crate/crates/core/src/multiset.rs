//! Finite multisets over colour labels: urns, tubes and draws.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{binomial, factorial};

/// A colour label: ASCII letters, digits and underscores, starting with a letter.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Color(String);

impl Color {
    pub fn new(label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if !is_label(&label) {
            return Err(Error::domain(format!("invalid colour label {label:?}")));
        }
        Ok(Color(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_label(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b) if b.is_ascii_alphabetic())
        && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Color {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Color::new(s)
    }
}

impl Serialize for Color {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Color::new(s).map_err(serde::de::Error::custom)
    }
}

/// Result of comparing two multisets pointwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub leq: bool,
    pub lt: bool,
    pub fully_below: bool,
}

/// Finite multiset; zero counts are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<Color, u64>", into = "BTreeMap<Color, u64>")]
pub struct Multiset {
    entries: BTreeMap<Color, u64>,
}

impl TryFrom<BTreeMap<Color, u64>> for Multiset {
    type Error = Error;
    fn try_from(map: BTreeMap<Color, u64>) -> Result<Self> {
        if map.values().any(|&c| c == 0) {
            return Err(Error::domain("zero count in multiset"));
        }
        Ok(Multiset { entries: map })
    }
}

impl From<Multiset> for BTreeMap<Color, u64> {
    fn from(m: Multiset) -> Self {
        m.entries
    }
}

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sums the given pairs; zero counts are dropped.
    pub fn from_counts<I: IntoIterator<Item = (Color, u64)>>(pairs: I) -> Self {
        let mut m = Multiset::new();
        for (c, n) in pairs {
            m.insert(c, n);
        }
        m
    }

    pub fn single(color: Color, count: u64) -> Self {
        Self::from_counts([(color, count)])
    }

    /// Adds `count` copies of `color`.
    pub fn insert(&mut self, color: Color, count: u64) {
        if count > 0 {
            *self.entries.entry(color).or_insert(0) += count;
        }
    }

    /// Removes one copy of `color`; fails if absent.
    pub fn remove_one(&mut self, color: &Color) -> Result<()> {
        match self.entries.get_mut(color) {
            Some(n) if *n > 1 => {
                *n -= 1;
                Ok(())
            }
            Some(_) => {
                self.entries.remove(color);
                Ok(())
            }
            None => Err(Error::domain(format!("colour {color} not present"))),
        }
    }

    pub fn with_added(&self, color: &Color) -> Multiset {
        let mut m = self.clone();
        m.insert(color.clone(), 1);
        m
    }

    pub fn with_removed(&self, color: &Color) -> Result<Multiset> {
        let mut m = self.clone();
        m.remove_one(color)?;
        Ok(m)
    }

    pub fn count(&self, color: &Color) -> u64 {
        self.entries.get(color).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Colours with a positive count, in label order.
    pub fn support(&self) -> impl Iterator<Item = &Color> + '_ {
        self.entries.keys()
    }

    pub fn support_vec(&self) -> Vec<Color> {
        self.entries.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Color, u64)> + '_ {
        self.entries.iter().map(|(c, &n)| (c, n))
    }

    /// Number of elements, counted with multiplicity.
    pub fn size(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Product of the factorials of the counts.
    pub fn facto(&self) -> BigUint {
        self.entries
            .values()
            .fold(BigUint::one(), |acc, &n| acc * factorial(n))
    }

    /// Multinomial coefficient: number of sequences accumulating to `self`.
    pub fn coefm(&self) -> BigUint {
        factorial(self.size()) / self.facto()
    }

    pub fn add(&self, other: &Multiset) -> Multiset {
        let mut m = self.clone();
        for (c, n) in other.iter() {
            m.insert(c.clone(), n);
        }
        m
    }

    /// Pointwise difference; requires `other ≤ self`.
    pub fn sub(&self, other: &Multiset) -> Result<Multiset> {
        if !other.leq(self) {
            return Err(Error::domain(format!("cannot subtract {other} from {self}")));
        }
        let mut m = Multiset::new();
        for (c, n) in self.iter() {
            m.insert(c.clone(), n - other.count(c));
        }
        Ok(m)
    }

    /// Multiplies every count by `k`.
    pub fn scale(&self, k: u64) -> Multiset {
        Multiset::from_counts(self.iter().map(|(c, n)| (c.clone(), n * k)))
    }

    pub fn leq(&self, other: &Multiset) -> bool {
        self.iter().all(|(c, n)| n <= other.count(c))
    }

    pub fn relate(&self, other: &Multiset) -> Relation {
        let leq = self.leq(other);
        let lt = leq && self != other;
        let fully_below = self.support().all(|c| other.count(c) > 0)
            && other.iter().all(|(c, n)| self.count(c) < n);
        Relation {
            leq,
            lt,
            fully_below,
        }
    }

    /// Accumulates a sequence of colours into a multiset.
    pub fn acc<'a, I: IntoIterator<Item = &'a Color>>(seq: I) -> Multiset {
        Multiset::from_counts(seq.into_iter().map(|c| (c.clone(), 1)))
    }

    /// All `φ ≤ self` with `‖φ‖ = k`, in canonical order.
    pub fn submultisets_of_size(&self, k: u64) -> Submultisets {
        let colors = self.support_vec();
        let caps = self.entries.values().copied().collect();
        Submultisets::new(colors, caps, k)
    }

    /// All multisets of size `k` over `support`, in canonical order.
    pub fn multisets_of_size(support: &[Color], k: u64) -> Result<Submultisets> {
        if support.is_empty() && k > 0 {
            return Err(Error::domain("no multisets of positive size over an empty support"));
        }
        let mut colors = support.to_vec();
        colors.sort();
        colors.dedup();
        let caps = vec![k; colors.len()];
        Ok(Submultisets::new(colors, caps, k))
    }
}

/// Multiset binomial: product of `C(ψ(x), φ(x))`; requires `φ ≤ ψ`.
pub fn mbinom(psi: &Multiset, phi: &Multiset) -> Result<BigUint> {
    if !phi.leq(psi) {
        return Err(Error::domain(format!("{phi} is not below {psi}")));
    }
    Ok(psi
        .iter()
        .fold(BigUint::one(), |acc, (c, n)| acc * binomial(n, phi.count(c))))
}

/// Multichoose `⦅n, m⦆ = C(n+m-1, m)`; the number of size-`m` multisets over `n` elements.
pub fn multichoose(n: u64, m: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::domain("multichoose needs n ≥ 1"));
    }
    Ok(multichoose_ext(n, m))
}

/// Multichoose extended to `n = 0` by `⦅0, 0⦆ = 1` and `⦅0, m⦆ = 0`.
pub fn multichoose_ext(n: u64, m: u64) -> BigUint {
    if n == 0 {
        return if m == 0 { BigUint::one() } else { BigUint::default() };
    }
    binomial(n + m - 1, m)
}

/// Product of `⦅ψ(x), φ(x)⦆` over the support of `ψ`; requires `supp φ ⊆ supp ψ`.
pub fn mmultichoose(psi: &Multiset, phi: &Multiset) -> Result<BigUint> {
    if let Some(c) = phi.support().find(|c| psi.count(c) == 0) {
        return Err(Error::domain(format!("colour {c} of {phi} is outside the support of {psi}")));
    }
    Ok(psi
        .iter()
        .fold(BigUint::one(), |acc, (c, n)| acc * multichoose_ext(n, phi.count(c))))
}

impl fmt::Display for Multiset {
    /// Text form `2a+3b`; the empty multiset prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, n)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{n}{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Enumerates count vectors bounded by per-colour caps with a fixed total,
/// in descending lexicographic order (greedy on the first colour).
#[derive(Debug, Clone)]
pub struct Submultisets {
    colors: Vec<Color>,
    caps: Vec<u64>,
    current: Option<Vec<u64>>,
}

impl Submultisets {
    fn new(colors: Vec<Color>, caps: Vec<u64>, total: u64) -> Self {
        let mut counts = vec![0; caps.len()];
        let current = fill_greedy(&mut counts, &caps, 0, total).then_some(counts);
        Submultisets {
            colors,
            caps,
            current,
        }
    }

    fn advance(&mut self) {
        let Some(counts) = self.current.as_mut() else {
            return;
        };
        let n = counts.len();
        let mut suffix_sum = 0;
        let mut suffix_cap = 0u64;
        for i in (0..n).rev() {
            if counts[i] > 0 && suffix_cap > suffix_sum {
                counts[i] -= 1;
                let ok = fill_greedy(counts, &self.caps, i + 1, suffix_sum + 1);
                debug_assert!(ok);
                return;
            }
            suffix_sum += counts[i];
            suffix_cap = suffix_cap.saturating_add(self.caps[i]);
        }
        self.current = None;
    }
}

fn fill_greedy(counts: &mut [u64], caps: &[u64], from: usize, mut remaining: u64) -> bool {
    for i in from..counts.len() {
        counts[i] = caps[i].min(remaining);
        remaining -= counts[i];
    }
    remaining == 0
}

impl Iterator for Submultisets {
    type Item = Multiset;

    fn next(&mut self) -> Option<Multiset> {
        let counts = self.current.as_ref()?;
        let m = Multiset::from_counts(self.colors.iter().cloned().zip(counts.iter().copied()));
        self.advance();
        Some(m)
    }
}

/// Convenience for tests and examples: `ms("2a+3b")`. Panics on bad input.
pub fn ms(text: &str) -> Multiset {
    crate::parse::parse_multiset(text).expect("valid multiset literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Color {
        Color::new(s).unwrap()
    }

    #[test]
    fn labels() {
        assert!(Color::new("R").is_ok());
        assert!(Color::new("x_1").is_ok());
        assert!(Color::new("1x").is_err());
        assert!(Color::new("").is_err());
        assert!(Color::new("a-b").is_err());
    }

    #[test]
    fn sizes_and_coefficients() {
        assert_eq!(ms("3R+6B").size(), 9);
        assert_eq!(Multiset::new().size(), 0);
        assert_eq!(ms("2a+3b+5c").size(), 10);
        assert_eq!(ms("2a+3b").facto(), BigUint::from(12u32));
        assert_eq!(Multiset::new().facto(), BigUint::one());
        assert_eq!(ms("1a+1b+1c").facto(), BigUint::one());
        assert_eq!(ms("3a+1b").coefm(), BigUint::from(4u32));
        assert_eq!(Multiset::new().coefm(), BigUint::one());
        assert_eq!(ms("2a+2b").coefm(), BigUint::from(6u32));
    }

    #[test]
    fn binomials_of_multisets() {
        assert_eq!(mbinom(&ms("4a+6b"), &ms("1a+2b")).unwrap(), BigUint::from(60u32));
        let psi = ms("3a+2c");
        assert_eq!(mbinom(&psi, &psi).unwrap(), BigUint::one());
        assert_eq!(mbinom(&psi, &Multiset::new()).unwrap(), BigUint::one());
        assert!(mbinom(&ms("1a"), &ms("2a")).is_err());
    }

    #[test]
    fn multichoose_values() {
        assert_eq!(multichoose(3, 2).unwrap(), BigUint::from(6u32));
        assert_eq!(multichoose(7, 0).unwrap(), BigUint::one());
        assert_eq!(multichoose(10, 3).unwrap(), BigUint::from(220u32));
        assert!(multichoose(0, 3).is_err());
        assert_eq!(mmultichoose(&ms("4a+6b"), &ms("3b")).unwrap(), BigUint::from(56u32));
        assert_eq!(mmultichoose(&ms("4a+6b"), &Multiset::new()).unwrap(), BigUint::one());
        assert_eq!(mmultichoose(&ms("1a+1b"), &ms("2a")).unwrap(), BigUint::one());
        assert!(mmultichoose(&ms("1a"), &ms("1b")).is_err());
    }

    #[test]
    fn accumulation() {
        let seq = [c("a"), c("a"), c("b"), c("a")];
        assert_eq!(Multiset::acc(&seq), ms("3a+1b"));
        assert_eq!(Multiset::acc(&[]), Multiset::new());
        assert_eq!(Multiset::acc(&[c("b"), c("a")]), ms("1a+1b"));
    }

    #[test]
    fn add_and_sub() {
        assert_eq!(ms("3a+3b").sub(&ms("2a+3b")).unwrap(), ms("1a"));
        assert_eq!(ms("2a").add(&ms("3b")), ms("2a+3b"));
        let phi = ms("2a+1c");
        assert_eq!(phi.sub(&phi).unwrap(), Multiset::new());
        assert!(ms("1a").sub(&ms("1b")).is_err());
    }

    #[test]
    fn relations() {
        let r = ms("2a+3b").relate(&ms("3a+3b"));
        assert_eq!((r.leq, r.lt, r.fully_below), (true, true, false));
        let r = ms("2a+2b").relate(&ms("3a+3b"));
        assert_eq!((r.leq, r.lt, r.fully_below), (true, true, true));
        let phi = ms("1a+4b");
        let r = phi.relate(&phi);
        assert_eq!((r.leq, r.lt, r.fully_below), (true, false, false));
        // colours of ψ absent from φ count as zero
        assert!(ms("1a").relate(&ms("2a+1b")).fully_below);
        assert!(!ms("1c").relate(&ms("2a+1b")).fully_below);
    }

    #[test]
    fn submultiset_enumeration() {
        let got: Vec<_> = ms("4a+6b").submultisets_of_size(3).collect();
        assert_eq!(got, vec![ms("3a"), ms("2a+1b"), ms("1a+2b"), ms("3b")]);
        let got: Vec<_> = ms("4a+6b").submultisets_of_size(0).collect();
        assert_eq!(got, vec![Multiset::new()]);
        assert_eq!(ms("1a+1b").submultisets_of_size(3).count(), 0);
        let total: BigUint = ms("4a+6b")
            .submultisets_of_size(3)
            .map(|phi| mbinom(&ms("4a+6b"), &phi).unwrap())
            .sum();
        assert_eq!(total, BigUint::from(120u32));
    }

    #[test]
    fn multiset_enumeration() {
        let abc = [c("a"), c("b"), c("c")];
        assert_eq!(Multiset::multisets_of_size(&abc, 2).unwrap().count(), 6);
        let only: Vec<_> = Multiset::multisets_of_size(&[c("a")], 5).unwrap().collect();
        assert_eq!(only, vec![ms("5a")]);
        assert_eq!(Multiset::multisets_of_size(&[c("a"), c("b")], 7).unwrap().count(), 8);
        assert!(Multiset::multisets_of_size(&[], 1).is_err());
        assert_eq!(Multiset::multisets_of_size(&[], 0).unwrap().count(), 1);
    }

    #[test]
    fn json_form_is_sorted() {
        let m = ms("3b+2a");
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"a":2,"b":3}"#);
        let back: Multiset = serde_json::from_str(r#"{"a":2,"b":3}"#).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Multiset>(r#"{"a":0}"#).is_err());
    }
}
