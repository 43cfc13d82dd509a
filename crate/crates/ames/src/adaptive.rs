//! Budget-increase drivers: searching for the virtual budget that
//! exhausts the real one, either by restarting the baseline method, by
//! warm-starting the local search, or by jumping straight to the next
//! budget at which the solution can change.

use crate::election::{Election, ElectionError};
use crate::mes::mes;
use crate::rational::Ratio;
use crate::search::{ames_tie_consistent, SearchError};
use crate::solution::EqualSharesSolution;
use crate::stability::is_stable;
use num::{BigInt, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdaptiveError {
    #[error("solution is not stable for the current budget")]
    NotStable,
    #[error("unknown completion strategy {0:?}")]
    UnknownStrategy(String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Election(#[from] ElectionError),
}

/// The smallest total budget strictly above the current one at which
/// `solution` stops being stable, or `None` if it is stable for every
/// larger budget.
///
/// For each project and each contributor count t above its current one,
/// an approver must be topped up by y = max{0, X_i + cost/t − b/n}
/// before their capacity reaches cost/t, unless their largest current
/// payment already qualifies them (then y = 0, independent of budget).
/// The t-th smallest y is the per-voter raise at which (p, t) becomes a
/// witness; the minimum over all pairs gives the answer.
pub fn next_unstable_budget(
    solution: &EqualSharesSolution,
    election: &Election,
) -> Result<Option<Ratio>, AdaptiveError> {
    if is_stable(solution, election).is_err() {
        return Err(AdaptiveError::NotStable);
    }
    let n = election.num_voters();
    let loads = solution.loads(election);
    let mut max_payment: Vec<Option<Ratio>> = vec![None; n];
    for (p, supporters) in solution.iter() {
        let price = election.cost(p) / BigInt::from(supporters.len());
        for &i in supporters {
            if max_payment[i].as_ref().map_or(true, |z| price > *z) {
                max_payment[i] = Some(price.clone());
            }
        }
    }
    let eps = election.epsilon();
    let mut best: Option<Ratio> = None;
    for p in 0..election.num_projects() {
        let approvers = election.approvers(p);
        for t in solution.supporter_count(p) + 1..=approvers.len() {
            let threshold = election.cost(p) / BigInt::from(t);
            let mut ys: Vec<Ratio> = approvers
                .iter()
                .map(|&i| {
                    let qualifies = max_payment[i]
                        .as_ref()
                        .map_or(false, |z| z - eps >= threshold);
                    if qualifies {
                        Ratio::zero()
                    } else {
                        (&loads[i] + &threshold - election.share()).max(Ratio::zero())
                    }
                })
                .collect();
            ys.sort();
            let z = &ys[t - 1];
            if z.is_zero() {
                // t approvers already have the capacity: contradicts the
                // stability precondition
                return Err(AdaptiveError::NotStable);
            }
            if best.as_ref().map_or(true, |b| z < b) {
                best = Some(z.clone());
            }
        }
    }
    Ok(best.map(|z| election.budget() + z * BigInt::from(n)))
}

/// Work log for one evaluated virtual budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    pub virtual_budget: Ratio,
    pub steps_performed: usize,
    pub outcome_cost: Ratio,
    pub projects: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CompletionResult {
    pub real_budget: Ratio,
    pub virtual_budget: Ratio,
    pub strategy: &'static str,
    pub iterations: Vec<IterationRecord>,
    pub final_outcome: Vec<usize>,
    /// The equal-shares solution behind the outcome; absent for the
    /// baseline strategy, which produces unequal payments.
    pub final_solution: Option<EqualSharesSolution>,
    pub exhaustive: bool,
}

/// A rule for raising a virtual budget until the real one is exhausted.
/// `step` is the per-voter increment between considered budgets.
pub trait CompletionStrategy: Sync {
    fn name(&self) -> &'static str;
    fn complete(&self, election: &Election, step: &Ratio)
        -> Result<CompletionResult, AdaptiveError>;
}

struct RestartMes;
struct AdaptiveAmes;
struct SkipAmes;

static STRATEGIES: &[&dyn CompletionStrategy] = &[&RestartMes, &AdaptiveAmes, &SkipAmes];

pub fn strategies() -> &'static [&'static dyn CompletionStrategy] {
    STRATEGIES
}

pub fn strategy(name: &str) -> Option<&'static dyn CompletionStrategy> {
    STRATEGIES.iter().copied().find(|s| s.name() == name)
}

/// Runs the named strategy with per-voter increment `step` (1 if `None`).
pub fn complete(
    election: &Election,
    name: &str,
    step: Option<Ratio>,
) -> Result<CompletionResult, AdaptiveError> {
    let s = strategy(name).ok_or_else(|| AdaptiveError::UnknownStrategy(name.to_string()))?;
    let step = step.unwrap_or_else(|| Ratio::from(BigInt::from(1)));
    s.complete(election, &step)
}

fn record(
    election: &Election,
    virtual_budget: &Ratio,
    steps: usize,
    outcome: &[usize],
) -> IterationRecord {
    IterationRecord {
        virtual_budget: virtual_budget.clone(),
        steps_performed: steps,
        outcome_cost: election.total_cost(outcome),
        projects: outcome
            .iter()
            .map(|&p| election.project(p).id.clone())
            .collect(),
    }
}

impl CompletionStrategy for RestartMes {
    fn name(&self) -> &'static str {
        "restart-mes"
    }

    fn complete(
        &self,
        election: &Election,
        step: &Ratio,
    ) -> Result<CompletionResult, AdaptiveError> {
        let real = election.budget().clone();
        let grid = step * BigInt::from(election.num_voters());
        let mut virt = real.clone();
        let mut iterations = Vec::new();
        let mut last: Option<(Ratio, Vec<usize>)> = None;
        loop {
            let scaled = election.with_budget(virt.clone())?;
            let (w, _) = mes(&scaled);
            if election.total_cost(&w) > real {
                break;
            }
            iterations.push(record(election, &virt, w.len(), &w));
            let exhausted = election.is_exhaustive(&w);
            last = Some((virt.clone(), w));
            if exhausted {
                break;
            }
            virt += &grid;
        }
        // at the real budget itself the outcome is priceable, so feasible
        let (virtual_budget, final_outcome) = last.expect("first iteration is feasible");
        let exhaustive = election.is_exhaustive(&final_outcome);
        Ok(CompletionResult {
            real_budget: real,
            virtual_budget,
            strategy: self.name(),
            iterations,
            final_outcome,
            final_solution: None,
            exhaustive,
        })
    }
}

fn adaptive_loop(
    election: &Election,
    step: &Ratio,
    skip: bool,
    name: &'static str,
) -> Result<CompletionResult, AdaptiveError> {
    let real = election.budget().clone();
    let grid = step * BigInt::from(election.num_voters());
    let mut virt = real.clone();
    let mut iterations = Vec::new();
    let mut current = EqualSharesSolution::empty();
    let mut accepted: Option<(Ratio, EqualSharesSolution)> = None;
    loop {
        let scaled = election.with_budget(virt.clone())?;
        let (next, trace) = ames_tie_consistent(&scaled, &current)?;
        let outcome = next.outcome();
        if election.total_cost(&outcome) > real {
            // overshot the real budget: walk the grid interval between
            // the last feasible budget and this one, keeping the largest
            // feasible point
            let (mut lo_budget, mut lo_solution) =
                accepted.expect("first iteration is feasible");
            let mut hi = virt.clone();
            while &hi - &lo_budget > grid {
                let gap_steps = ((&hi - &lo_budget) / &grid).floor().to_integer();
                let mid = &lo_budget + &grid * Ratio::from(gap_steps / BigInt::from(2));
                let scaled = election.with_budget(mid.clone())?;
                let (sol, mid_trace) = ames_tie_consistent(&scaled, &lo_solution)?;
                let out = sol.outcome();
                if election.total_cost(&out) <= real {
                    iterations.push(record(election, &mid, mid_trace.len(), &out));
                    lo_budget = mid;
                    lo_solution = sol;
                } else {
                    hi = mid;
                }
            }
            accepted = Some((lo_budget, lo_solution));
            break;
        }
        iterations.push(record(election, &virt, trace.len(), &outcome));
        let exhausted = election.is_exhaustive(&outcome);
        accepted = Some((virt.clone(), next.clone()));
        current = next;
        if exhausted {
            break;
        }
        if skip {
            let scaled = election.with_budget(virt.clone())?;
            match next_unstable_budget(&current, &scaled)? {
                None => break, // stable at every larger budget
                Some(target) => {
                    // next grid point at or beyond the target
                    let k = ((&target - &virt) / &grid).ceil();
                    virt += &grid * k.max(Ratio::from(BigInt::from(1)));
                }
            }
        } else {
            virt += &grid;
        }
    }
    let (virtual_budget, final_solution) = accepted.expect("first iteration is feasible");
    let final_outcome = final_solution.outcome();
    let exhaustive = election.is_exhaustive(&final_outcome);
    Ok(CompletionResult {
        real_budget: real,
        virtual_budget,
        strategy: name,
        iterations,
        final_outcome,
        final_solution: Some(final_solution),
        exhaustive,
    })
}

impl CompletionStrategy for AdaptiveAmes {
    fn name(&self) -> &'static str {
        "adaptive-ames"
    }

    fn complete(
        &self,
        election: &Election,
        step: &Ratio,
    ) -> Result<CompletionResult, AdaptiveError> {
        adaptive_loop(election, step, false, self.name())
    }
}

impl CompletionStrategy for SkipAmes {
    fn name(&self) -> &'static str {
        "skip-ames"
    }

    fn complete(
        &self,
        election: &Election,
        step: &Ratio,
    ) -> Result<CompletionResult, AdaptiveError> {
        adaptive_loop(election, step, true, self.name())
    }
}
