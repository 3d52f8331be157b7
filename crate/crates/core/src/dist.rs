//! Finite distributions with exact probabilities, and predicates over them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiset::{Color, Multiset};
use crate::numeric::Rational;

/// Finite distribution; probabilities are positive and sum to exactly one.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dist<T: Ord> {
    entries: BTreeMap<T, Rational>,
}

impl<T: Ord + Clone> Dist<T> {
    /// Point mass at `t`.
    pub fn point(t: T) -> Self {
        Dist {
            entries: BTreeMap::from([(t, Rational::one())]),
        }
    }

    /// Builds a distribution from `(outcome, probability)` pairs. Repeated
    /// outcomes are merged, zeros dropped; the total must be exactly 1.
    pub fn from_pairs<I: IntoIterator<Item = (T, Rational)>>(pairs: I) -> Result<Self> {
        let entries = merge(pairs)?;
        let total: Rational = entries.values().sum();
        if !total.is_one() {
            return Err(Error::domain(format!("probabilities sum to {total}")));
        }
        Ok(Dist { entries })
    }

    /// Normalises non-negative weights with positive total.
    pub fn normalize<I: IntoIterator<Item = (T, Rational)>>(weights: I) -> Result<Self> {
        let entries = merge(weights)?;
        let total: Rational = entries.values().sum();
        if total.is_zero() {
            return Err(Error::domain("weights have zero total"));
        }
        Ok(Dist {
            entries: entries.into_iter().map(|(t, w)| (t, w / &total)).collect(),
        })
    }

    /// Uniform over the distinct given outcomes.
    pub fn uniform<I: IntoIterator<Item = T>>(items: I) -> Result<Self> {
        Self::normalize(items.into_iter().map(|t| (t, Rational::one())))
    }

    /// Used internally where the total is already known to be one.
    pub(crate) fn from_map_unchecked(entries: BTreeMap<T, Rational>) -> Self {
        let d = Dist {
            entries: entries.into_iter().filter(|(_, p)| !p.is_zero()).collect(),
        };
        debug_assert!(d.total().is_one(), "distribution does not sum to one");
        d
    }

    pub fn prob(&self, t: &T) -> Rational {
        self.entries.get(t).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Rational)> + '_ {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &T> + '_ {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.entries.values().sum()
    }

    /// Push-forward along `f`; outcomes that collide are merged.
    pub fn map<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> U) -> Dist<U> {
        let mut out = BTreeMap::new();
        for (t, p) in &self.entries {
            *out.entry(f(t)).or_insert_with(Rational::zero) += p;
        }
        Dist::from_map_unchecked(out)
    }

    /// Joint distribution of independent `self` and `other`.
    pub fn tensor<U: Ord + Clone>(&self, other: &Dist<U>) -> Dist<(T, U)> {
        let mut out = BTreeMap::new();
        for (a, p) in &self.entries {
            for (b, q) in &other.entries {
                out.insert((a.clone(), b.clone()), p * q);
            }
        }
        Dist::from_map_unchecked(out)
    }

    /// `self ⊗ ... ⊗ self` with `k ≥ 1` factors, as tuples.
    pub fn tensor_pow(&self, k: usize) -> Result<Dist<Vec<T>>> {
        if k == 0 {
            return Err(Error::domain("tensor power needs at least one factor"));
        }
        Ok(tensor_all(&vec![self.clone(); k]))
    }

    /// Expected value of `p`.
    pub fn validity(&self, p: &Predicate<T>) -> Rational {
        self.entries.iter().map(|(t, w)| w * p.eval(t)).sum()
    }

    /// Bayesian update `t ↦ ω(t)·p(t) / (ω ⊨ p)`.
    pub fn condition(&self, p: &Predicate<T>) -> Result<Dist<T>> {
        let v = self.validity(p);
        if v.is_zero() {
            return Err(Error::Conditioning("predicate has zero validity".into()));
        }
        let entries = self
            .entries
            .iter()
            .map(|(t, w)| (t.clone(), w * p.eval(t) / &v))
            .collect();
        Ok(Dist::from_map_unchecked(entries))
    }
}

/// Joint distribution of independent factors, outcomes as tuples.
pub fn tensor_all<T: Ord + Clone>(factors: &[Dist<T>]) -> Dist<Vec<T>> {
    let mut acc: BTreeMap<Vec<T>, Rational> = BTreeMap::from([(Vec::new(), Rational::one())]);
    for f in factors {
        let mut next = BTreeMap::new();
        for (prefix, p) in &acc {
            for (t, q) in f.iter() {
                let mut v = prefix.clone();
                v.push(t.clone());
                next.insert(v, p * q);
            }
        }
        acc = next;
    }
    Dist::from_map_unchecked(acc)
}

fn merge<T: Ord, I: IntoIterator<Item = (T, Rational)>>(pairs: I) -> Result<BTreeMap<T, Rational>> {
    let mut entries: BTreeMap<T, Rational> = BTreeMap::new();
    for (t, p) in pairs {
        if p.is_negative() {
            return Err(Error::domain(format!("negative probability {p}")));
        }
        *entries.entry(t).or_insert_with(Rational::zero) += p;
    }
    entries.retain(|_, p| !p.is_zero());
    Ok(entries)
}

/// Frequentist learning: normalise an urn into a colour distribution.
pub fn flrn(urn: &Multiset) -> Result<Dist<Color>> {
    if urn.is_empty() {
        return Err(Error::domain("cannot learn from an empty multiset"));
    }
    let size = urn.size();
    Ok(Dist::from_map_unchecked(
        urn.iter()
            .map(|(c, n)| (c.clone(), Rational::ratio(n, size)))
            .collect(),
    ))
}

impl<T: Ord + fmt::Debug> fmt::Debug for Dist<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (t, p) in &self.entries {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{p}|{t:?}>")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct OutcomeJson<'a, T: Serialize> {
    outcome: &'a T,
    num: String,
    den: String,
    approx: f64,
}

impl<T: Ord + Serialize> Serialize for Dist<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let outcomes: Vec<_> = self
            .entries
            .iter()
            .map(|(t, p)| OutcomeJson {
                outcome: t,
                num: p.numer().to_string(),
                den: p.denom().to_string(),
                approx: p.approx(),
            })
            .collect();
        let total: Rational = self.entries.values().sum();
        let mut st = s.serialize_struct("Dist", 2)?;
        st.serialize_field("outcomes", &outcomes)?;
        st.serialize_field("total", &total.to_string())?;
        st.end()
    }
}

/// A fuzzy predicate: a total function into `[0, 1]`.
pub struct Predicate<T> {
    f: Arc<dyn Fn(&T) -> Rational + Send + Sync>,
}

impl<T> Clone for Predicate<T> {
    fn clone(&self) -> Self {
        Predicate { f: Arc::clone(&self.f) }
    }
}

impl<T> Predicate<T> {
    pub fn new(f: impl Fn(&T) -> Rational + Send + Sync + 'static) -> Self {
        Predicate { f: Arc::new(f) }
    }

    pub fn indicator(f: impl Fn(&T) -> bool + Send + Sync + 'static) -> Self {
        Predicate::new(move |t| if f(t) { Rational::one() } else { Rational::zero() })
    }

    pub fn constant(r: Rational) -> Result<Self> {
        if !r.is_probability() {
            return Err(Error::domain(format!("predicate value {r} outside [0,1]")));
        }
        Ok(Predicate::new(move |_| r.clone()))
    }

    /// Evaluates the predicate. Panics if the wrapped function leaves `[0, 1]`.
    pub fn eval(&self, t: &T) -> Rational {
        let r = (self.f)(t);
        assert!(r.is_probability(), "predicate value {r} outside [0,1]");
        r
    }
}

impl<T: 'static> Predicate<T> {
    /// Pointwise product `p & q`.
    pub fn and(&self, other: &Predicate<T>) -> Predicate<T> {
        let (p, q) = (self.clone(), other.clone());
        Predicate::new(move |t| p.eval(t) * q.eval(t))
    }
}

/// Distribution on the naturals given by explicit entries plus an exact
/// residual mass for everything beyond `k_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatDist {
    entries: BTreeMap<u64, Rational>,
    residual: Rational,
    k_min: u64,
    k_max: u64,
}

impl NatDist {
    /// Takes entries on `[k_min, k_max]`; the residual is `1 - Σ entries`.
    pub fn from_entries(entries: BTreeMap<u64, Rational>, k_min: u64, k_max: u64) -> Result<Self> {
        if entries.values().any(Rational::is_negative) {
            return Err(Error::domain("negative entry"));
        }
        if entries.keys().any(|&k| k > k_max) {
            return Err(Error::domain("entry beyond k_max"));
        }
        let entries: BTreeMap<u64, Rational> =
            entries.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        let total: Rational = entries.values().sum();
        let residual = total.complement();
        if residual.is_negative() {
            return Err(Error::domain(format!("entries sum to {total} > 1")));
        }
        Ok(NatDist {
            entries,
            residual,
            k_min,
            k_max,
        })
    }

    pub fn prob(&self, k: u64) -> Rational {
        self.entries.get(&k).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> &BTreeMap<u64, Rational> {
        &self.entries
    }

    pub fn residual(&self) -> &Rational {
        &self.residual
    }

    pub fn k_min(&self) -> u64 {
        self.k_min
    }

    pub fn k_max(&self) -> u64 {
        self.k_max
    }

    /// Sum of the explicit entries with `k ≤ upto`.
    pub fn mass_upto(&self, upto: u64) -> Rational {
        self.entries.range(..=upto).map(|(_, p)| p).sum()
    }

    /// Same distribution with entries beyond `k_max` folded into the residual.
    pub fn truncate(&self, k_max: u64) -> NatDist {
        let entries = self.entries.range(..=k_max).map(|(k, p)| (*k, p.clone())).collect();
        NatDist::from_entries(entries, self.k_min, k_max.min(self.k_max))
            .expect("truncation keeps mass below one")
    }
}

impl Serialize for NatDist {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let outcomes: Vec<_> = self
            .entries
            .iter()
            .map(|(k, p)| OutcomeJson {
                outcome: k,
                num: p.numer().to_string(),
                den: p.denom().to_string(),
                approx: p.approx(),
            })
            .collect();
        let mut st = s.serialize_struct("NatDist", 5)?;
        st.serialize_field("outcomes", &outcomes)?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("k_min", &self.k_min)?;
        st.serialize_field("k_max", &self.k_max)?;
        st.serialize_field("total", "1/1")?;
        st.end()
    }
}
