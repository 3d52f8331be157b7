//! Markov models with output: kernels `P -> D(P + O)` iterated until the
//! mass is absorbed into outputs, plus the first-full automata.
//!
//! Iteration merges equal positions after every step, so the work per step
//! is proportional to the number of distinct reachable positions rather
//! than to the number of draw sequences.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::dist::{flrn, Dist};
use crate::draws::{DrawMode, Urn};
use crate::error::{Error, Result};
use crate::firstfull::TubeConfig;
use crate::multiset::{Color, Multiset};
use crate::numeric::Rational;

/// One outcome of a kernel: move to a new position or stop with an output.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Step<P, O> {
    Continue(P),
    Output(O),
}

type Kernel<P, O> = dyn Fn(&P) -> Dist<Step<P, O>> + Send + Sync;

/// A Markov model with output given by its one-step kernel.
pub struct Mmo<P: Ord, O: Ord> {
    kernel: Arc<Kernel<P, O>>,
}

impl<P: Ord, O: Ord> Clone for Mmo<P, O> {
    fn clone(&self) -> Self {
        Mmo {
            kernel: Arc::clone(&self.kernel),
        }
    }
}

/// Output mass collected by [`Mmo::run_to_absorption`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Absorption<O: Ord> {
    pub outputs: BTreeMap<O, Rational>,
    /// Mass still on positions when the run stopped.
    pub residual: Rational,
    /// Number of steps taken.
    pub steps: usize,
}

impl<O: Ord + Clone> Absorption<O> {
    /// The output distribution, available once the residual is zero.
    pub fn distribution(&self) -> Option<Dist<O>> {
        self.residual
            .is_zero()
            .then(|| Dist::from_map_unchecked(self.outputs.clone()))
    }
}

/// Output mass by the step at which it was emitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsorptionProfile<O: Ord> {
    /// `by_step[n - 1]` holds the outputs emitted at step `n`.
    pub by_step: Vec<BTreeMap<O, Rational>>,
    pub residual: Rational,
}

/// Mass on positions and on outputs after some number of steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmoState<P: Ord, O: Ord> {
    pub positions: BTreeMap<P, Rational>,
    pub outputs: BTreeMap<O, Rational>,
}

impl<P: Ord + Clone, O: Ord + Clone> MmoState<P, O> {
    fn start(p: P) -> Self {
        MmoState {
            positions: BTreeMap::from([(p, Rational::one())]),
            outputs: BTreeMap::new(),
        }
    }

    pub fn continuing_mass(&self) -> Rational {
        self.positions.values().sum()
    }

    pub fn to_dist(&self) -> Dist<Step<P, O>> {
        let entries = self
            .positions
            .iter()
            .map(|(p, m)| (Step::Continue(p.clone()), m.clone()))
            .chain(self.outputs.iter().map(|(o, m)| (Step::Output(o.clone()), m.clone())))
            .collect();
        Dist::from_map_unchecked(entries)
    }
}

impl<P: Ord + Clone, O: Ord + Clone> Mmo<P, O> {
    pub fn new(kernel: impl Fn(&P) -> Dist<Step<P, O>> + Send + Sync + 'static) -> Self {
        Mmo {
            kernel: Arc::new(kernel),
        }
    }

    /// One application of the kernel.
    pub fn step(&self, p: &P) -> Dist<Step<P, O>> {
        (self.kernel)(p)
    }

    /// Advances a state by one step; returns the output mass emitted in it.
    fn advance(&self, state: &mut MmoState<P, O>) -> BTreeMap<O, Rational> {
        let mut next = BTreeMap::new();
        let mut emitted: BTreeMap<O, Rational> = BTreeMap::new();
        for (p, m) in &state.positions {
            for (s, q) in self.step(p).iter() {
                let w = m * q;
                match s {
                    Step::Continue(p2) => {
                        *next.entry(p2.clone()).or_insert_with(Rational::zero) += w;
                    }
                    Step::Output(o) => {
                        *emitted.entry(o.clone()).or_insert_with(Rational::zero) += w;
                    }
                }
            }
        }
        for (o, w) in &emitted {
            *state.outputs.entry(o.clone()).or_insert_with(Rational::zero) += w;
        }
        state.positions = next;
        emitted
    }

    /// The successive states `c⁰(start), c¹(start), ...`.
    pub fn iterations(&self, start: P) -> Iterations<P, O> {
        Iterations {
            mmo: self.clone(),
            state: Some(MmoState::start(start)),
        }
    }

    /// `cⁿ(start)`: outputs are frozen, continuation mass moves through the kernel.
    pub fn iterate(&self, start: &P, n: usize) -> Dist<Step<P, O>> {
        let mut state = MmoState::start(start.clone());
        for _ in 0..n {
            if state.positions.is_empty() {
                break;
            }
            self.advance(&mut state);
        }
        state.to_dist()
    }

    /// Same as [`iterate`](Self::iterate) but follows every path separately
    /// and only merges at the end. Exponential; for cross-checking.
    pub fn iterate_unmerged(&self, start: &P, n: usize) -> Dist<Step<P, O>> {
        let mut paths: Vec<(Step<P, O>, Rational)> = vec![(Step::Continue(start.clone()), Rational::one())];
        for _ in 0..n {
            let mut next = Vec::with_capacity(paths.len() * 2);
            for (s, m) in paths {
                match s {
                    Step::Continue(p) => {
                        for (s2, q) in self.step(&p).iter() {
                            next.push((s2.clone(), &m * q));
                        }
                    }
                    out @ Step::Output(_) => next.push((out, m)),
                }
            }
            paths = next;
        }
        let mut merged = BTreeMap::new();
        for (s, m) in paths {
            *merged.entry(s).or_insert_with(Rational::zero) += m;
        }
        Dist::from_map_unchecked(merged)
    }

    /// Iterates until no mass remains on positions or `max_steps` is reached.
    pub fn run_to_absorption(&self, start: &P, max_steps: usize) -> Absorption<O> {
        let mut state = MmoState::start(start.clone());
        let mut steps = 0;
        while steps < max_steps && !state.positions.is_empty() {
            self.advance(&mut state);
            steps += 1;
        }
        Absorption {
            residual: state.continuing_mass(),
            outputs: state.outputs,
            steps,
        }
    }

    /// Like [`run_to_absorption`](Self::run_to_absorption) but records at which step each output mass appeared.
    pub fn absorption_profile(&self, start: &P, max_steps: usize) -> AbsorptionProfile<O> {
        let mut state = MmoState::start(start.clone());
        let mut by_step = Vec::new();
        while by_step.len() < max_steps && !state.positions.is_empty() {
            by_step.push(self.advance(&mut state));
        }
        AbsorptionProfile {
            by_step,
            residual: state.continuing_mass(),
        }
    }
}

/// Iterator over successive [`MmoState`]s; stops after absorption.
pub struct Iterations<P: Ord, O: Ord> {
    mmo: Mmo<P, O>,
    state: Option<MmoState<P, O>>,
}

impl<P: Ord + Clone, O: Ord + Clone> Iterator for Iterations<P, O> {
    type Item = MmoState<P, O>;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.state.take()?;
        if !current.positions.is_empty() {
            let mut next = current.clone();
            self.mmo.advance(&mut next);
            self.state = Some(next);
        }
        Some(current)
    }
}

/// Position of the first-full automata. The multinomial automaton keeps
/// the urn empty: its urn is a fixed distribution held by the kernel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Position {
    pub urn: Multiset,
    pub tubes: Multiset,
}

/// Builds the first-full automaton for `mode` and its start position.
pub fn firstfull_mmo(mode: DrawMode, urn: &Urn, tubes: &TubeConfig) -> Result<(Mmo<Position, Color>, Position)> {
    let colors = tubes.colors();
    match mode {
        DrawMode::Multinomial => {
            let omega = urn.as_distribution(mode)?.clone();
            if omega.support().cloned().collect::<Vec<_>>() != colors {
                return Err(Error::domain("distribution support must equal the tube colours"));
            }
            let start = Position {
                urn: Multiset::new(),
                tubes: tubes.tubes().clone(),
            };
            let mmo = Mmo::new(move |pos: &Position| {
                step_tubes(&pos.tubes, &omega, |_| Multiset::new())
            });
            Ok((mmo, start))
        }
        DrawMode::Hypergeometric | DrawMode::Polya => {
            let balls = urn.as_balls(mode)?.clone();
            if balls.support_vec() != colors {
                return Err(Error::domain("urn support must equal the tube colours"));
            }
            if mode == DrawMode::Hypergeometric && !tubes.tubes().leq(&balls) {
                return Err(Error::domain("urn cannot fill the tubes"));
            }
            let start = Position {
                urn: balls,
                tubes: tubes.tubes().clone(),
            };
            let mmo = Mmo::new(move |pos: &Position| {
                let draw = flrn(&pos.urn).expect("urn stays non-empty");
                step_tubes(&pos.tubes, &draw, |x| match mode {
                    DrawMode::Hypergeometric => pos.urn.with_removed(x).expect("drawn colour present"),
                    _ => pos.urn.with_added(x),
                })
            });
            Ok((mmo, start))
        }
    }
}

/// Shared first-full step: a tube longer than one shrinks, a tube of length
/// one fills and emits its colour.
fn step_tubes(
    tubes: &Multiset,
    draw: &Dist<Color>,
    next_urn: impl Fn(&Color) -> Multiset,
) -> Dist<Step<Position, Color>> {
    let entries = draw
        .iter()
        .map(|(x, p)| {
            let step = if tubes.count(x) > 1 {
                Step::Continue(Position {
                    urn: next_urn(x),
                    tubes: tubes.with_removed(x).expect("tube present"),
                })
            } else {
                Step::Output(x.clone())
            };
            (step, p.clone())
        })
        .collect();
    Dist::from_map_unchecked(entries)
}

/// Number of steps after which a first-full automaton has absorbed all mass:
/// `‖τ‖ - |X| + 1`.
pub fn firstfull_step_bound(tubes: &TubeConfig) -> usize {
    (tubes.tubes().size() - tubes.colors().len() as u64 + 1) as usize
}

/// Runs the first-full automaton to absorption.
pub fn first_full_via_mmo(mode: DrawMode, urn: &Urn, tubes: &TubeConfig) -> Result<Absorption<Color>> {
    let (mmo, start) = firstfull_mmo(mode, urn, tubes)?;
    Ok(mmo.run_to_absorption(&start, firstfull_step_bound(tubes)))
}
