//! Greedy local search over equal-shares solutions. Each step picks the
//! cheapest realizable price improvement, reassigns the project to its
//! qualified approvers, and drops projects that newly stretched voters can
//! no longer afford. The variant with project-dependent capacities also
//! resolves priority ties, trading a project for an equally priced one of
//! higher priority.

use crate::election::Election;
use crate::rational::Ratio;
use crate::solution::{lex_compare, EqualSharesSolution, LexOrdering, SolutionError};
use crate::stability::{CapacityMode, CapacityScan};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
}

/// A project dropped during a step, with the voters whose withdrawal
/// forced the drop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Removal {
    pub project: usize,
    pub old_price: Ratio,
    pub voters: Vec<usize>,
}

/// One local-search move: `project` is (re)assigned to `supporters`, each
/// paying `price` = cost/t, removing `removed` from the solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateStep {
    pub project: usize,
    pub t: usize,
    pub price: Ratio,
    pub supporters: Vec<usize>,
    pub removed: Vec<Removal>,
}

#[derive(Debug, Clone, Default)]
pub struct UpdateTrace {
    pub steps: Vec<UpdateStep>,
}

impl UpdateTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// The capacity of `voter` with respect to candidate `p`: the base
/// capacity, or the voter's largest payment on a strictly lower-priority
/// selected project if that is bigger.
pub fn project_capacity(
    voter: usize,
    p: usize,
    solution: &EqualSharesSolution,
    election: &Election,
) -> Ratio {
    let mut cap = solution.capacities(election).swap_remove(voter);
    for (q, supporters) in solution.iter() {
        if election.outranks(p, q) && supporters.binary_search(&voter).is_ok() {
            let price = election.cost(q) / num::BigInt::from(supporters.len());
            if price > cap {
                cap = price;
            }
        }
    }
    cap
}

fn removals_for(
    scan: &CapacityScan,
    solution: &EqualSharesSolution,
    election: &Election,
    target: usize,
    price: &Ratio,
    supporters: &[usize],
) -> Vec<Removal> {
    let mut removed: Vec<Removal> = Vec::new();
    for &i in supporters {
        if solution.contains(target) && solution.supporters(target).binary_search(&i).is_ok() {
            continue; // already paying for the target, price only drops
        }
        let slack = election.share() - &scan.loads[i];
        if *price <= slack {
            continue;
        }
        // Drop the project this voter pays the most for, resolving ties
        // towards the lowest-priority one.
        let mut victim: Option<(usize, Ratio)> = None;
        for (q, qsup) in solution.iter() {
            if q == target || qsup.binary_search(&i).is_err() {
                continue;
            }
            let qprice = election.cost(q) / num::BigInt::from(qsup.len());
            let better = match &victim {
                None => true,
                Some((vq, vprice)) => {
                    qprice > *vprice || (qprice == *vprice && election.outranks(*vq, q))
                }
            };
            if better {
                victim = Some((q, qprice));
            }
        }
        let (q, qprice) = victim.expect("stretched voter must pay for some project");
        match removed.iter_mut().find(|r| r.project == q) {
            Some(r) => r.voters.push(i),
            None => removed.push(Removal {
                project: q,
                old_price: qprice,
                voters: vec![i],
            }),
        }
    }
    removed
}

fn find_step(
    solution: &EqualSharesSolution,
    election: &Election,
    mode: CapacityMode,
) -> Option<UpdateStep> {
    let scan = CapacityScan::new(election, solution, mode);
    let witness = scan.best_witness()?;
    let removed = removals_for(
        &scan,
        solution,
        election,
        witness.project,
        &witness.price,
        &witness.voters,
    );
    Some(UpdateStep {
        project: witness.project,
        t: witness.t,
        price: witness.price,
        supporters: witness.voters,
        removed,
    })
}

/// The next greedy step from `solution`, or `None` if it is stable.
pub fn find_greedy_step(solution: &EqualSharesSolution, election: &Election) -> Option<UpdateStep> {
    find_step(solution, election, CapacityMode::Plain)
}

/// Applies a step produced by [`find_greedy_step`] on the same solution.
/// The result must again be priceable; anything else is a bug upstream.
pub fn apply_update(
    solution: &EqualSharesSolution,
    step: &UpdateStep,
    election: &Election,
) -> Result<EqualSharesSolution, SearchError> {
    let mut next = solution.clone();
    for removal in &step.removed {
        if !next.contains(removal.project) {
            return Err(SearchError::InternalInvariantViolation(format!(
                "removal of a project not in the solution: {}",
                election.project(removal.project).id
            )));
        }
        next.remove(removal.project);
    }
    next.insert(step.project, step.supporters.clone());
    next.validate(election).map_err(|e| {
        SearchError::InternalInvariantViolation(format!("step result not priceable: {e}"))
    })?;
    Ok(next)
}

fn run(
    election: &Election,
    start: &EqualSharesSolution,
    mode: CapacityMode,
) -> Result<(EqualSharesSolution, UpdateTrace), SearchError> {
    start.validate(election)?;
    let mut current = start.clone();
    let mut trace = UpdateTrace::default();
    while let Some(step) = find_step(&current, election, mode) {
        let next = apply_update(&current, &step, election)?;
        if cfg!(debug_assertions) {
            // steps never worsen the sorted price profile; plain steps
            // strictly improve it, tie-consistent swaps may keep it equal
            // while trading towards higher priority
            let ord = lex_compare(&next, &current, election);
            match mode {
                CapacityMode::Plain => debug_assert_eq!(ord, LexOrdering::Better),
                CapacityMode::Lexicographic => debug_assert_ne!(ord, LexOrdering::Worse),
            }
        }
        trace.steps.push(step);
        current = next;
    }
    Ok((current, trace))
}

/// Runs the local search to a stable solution, starting from `start`.
pub fn ames(
    election: &Election,
    start: &EqualSharesSolution,
) -> Result<(EqualSharesSolution, UpdateTrace), SearchError> {
    run(election, start, CapacityMode::Plain)
}

/// Like [`ames`] but with project-dependent capacities, so the result is
/// also stable under equal-price swaps towards higher-priority projects.
pub fn ames_tie_consistent(
    election: &Election,
    start: &EqualSharesSolution,
) -> Result<(EqualSharesSolution, UpdateTrace), SearchError> {
    run(election, start, CapacityMode::Lexicographic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::stability::{is_lex_stable, is_stable};
    use crate::testkit::{
        partial_start_solution, example1, example1_full_solution, random_election,
        random_solution, rng, tie_example, tie_example_split_solution,
    };

    #[test]
    fn worked_run_from_weakly_stable_start() {
        let e = example1();
        let start = partial_start_solution(&e);
        let (result, trace) = ames(&e, &start).unwrap();
        assert_eq!(result, example1_full_solution(&e));

        let ids: Vec<&str> = trace
            .steps
            .iter()
            .map(|s| e.project(s.project).id.as_str())
            .collect();
        assert_eq!(ids, ["p1", "p2", "p3", "p4", "p5"]);
        let prices: Vec<Ratio> = trace.steps.iter().map(|s| s.price.clone()).collect();
        assert_eq!(
            prices,
            vec![int(2), int(2), int(2), ratio(7, 3), ratio(10, 3)]
        );
        assert!(trace.steps.iter().all(|s| s.t == 3));

        // step 3 drops p4: voter 2 cannot pay 2 for p3 from slack 2/3
        let step3 = &trace.steps[2];
        assert_eq!(step3.removed.len(), 1);
        assert_eq!(step3.removed[0].project, e.index_of("p4").unwrap());
        assert_eq!(step3.removed[0].old_price, int(7));
        assert_eq!(step3.removed[0].voters, vec![2]);
        for s in [&trace.steps[0], &trace.steps[1], &trace.steps[3], &trace.steps[4]] {
            assert!(s.removed.is_empty());
        }
    }

    #[test]
    fn scratch_run_tie_example_budget_5() {
        let e = tie_example();
        let (result, trace) = ames(&e, &EqualSharesSolution::empty()).unwrap();
        assert_eq!(result, tie_example_split_solution(&e));
        assert_eq!(trace.len(), 2);
        assert_eq!(e.project(trace.steps[0].project).id, "p1");
        assert_eq!(e.project(trace.steps[1].project).id, "p3");
    }

    #[test]
    fn scratch_run_tie_example_budget_6() {
        let e = tie_example().with_budget(int(6)).unwrap();
        let (result, _) = ames(&e, &EqualSharesSolution::empty()).unwrap();
        assert_eq!(
            result.outcome(),
            vec![e.index_of("p1").unwrap(), e.index_of("p2").unwrap()]
        );
        assert_eq!(result.supporters(e.index_of("p2").unwrap()), &[0, 1]);
    }

    #[test]
    fn plain_search_keeps_stale_tie_at_budget_6() {
        let e = tie_example().with_budget(int(6)).unwrap();
        let split = tie_example_split_solution(&e);
        let (result, trace) = ames(&e, &split).unwrap();
        assert!(trace.is_empty());
        assert_eq!(result, split);
    }

    #[test]
    fn tie_consistent_search_trades_up_at_budget_6() {
        let e = tie_example().with_budget(int(6)).unwrap();
        let split = tie_example_split_solution(&e);
        let (result, trace) = ames_tie_consistent(&e, &split).unwrap();
        assert_eq!(trace.len(), 1);
        let step = &trace.steps[0];
        assert_eq!(e.project(step.project).id, "p2");
        assert_eq!((step.t, step.price.clone()), (2, int(2)));
        assert_eq!(step.removed.len(), 1);
        assert_eq!(e.project(step.removed[0].project).id, "p3");
        assert_eq!(step.removed[0].old_price, int(2));
        assert_eq!(
            result.outcome(),
            vec![e.index_of("p1").unwrap(), e.index_of("p2").unwrap()]
        );
    }

    #[test]
    fn project_capacity_matches_scan() {
        let mut r = rng(11);
        for _ in 0..40 {
            let e = random_election(&mut r);
            let s = random_solution(&e, &mut r);
            let scan = CapacityScan::new(&e, &s, CapacityMode::Lexicographic);
            for p in 0..e.num_projects() {
                for i in 0..e.num_voters() {
                    assert_eq!(&project_capacity(i, p, &s, &e), scan.capacity_for(i, p));
                }
            }
        }
    }

    #[test]
    fn random_runs_terminate_stable() {
        let mut r = rng(7);
        for _ in 0..60 {
            let e = random_election(&mut r);
            let s = random_solution(&e, &mut r);
            let (plain, _) = ames(&e, &s).unwrap();
            assert!(is_stable(&plain, &e).is_ok());
            let (lex, _) = ames_tie_consistent(&e, &s).unwrap();
            assert!(is_lex_stable(&lex, &e).is_ok());
            assert!(is_stable(&lex, &e).is_ok());
        }
    }
}
