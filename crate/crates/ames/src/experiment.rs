//! Top-up experiment: raise every voter's budget by one unit per run and
//! measure how much the outcome moves under warm-started search.

use crate::election::Election;
use crate::rational::{display, Ratio};
use crate::search::ames_tie_consistent;
use crate::search::SearchError;
use crate::solution::EqualSharesSolution;
use num::BigInt;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct ExperimentRecord {
    pub run: usize,
    pub per_voter_budget: Ratio,
    pub outcome_size: usize,
    /// Number of projects whose per-voter price changed since the
    /// previous run (projects outside the outcome price at infinity).
    pub change_metric: usize,
    pub millis: u128,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub records: Vec<ExperimentRecord>,
    pub mean_outcome_size: Ratio,
    pub mean_change_metric: Ratio,
}

fn price_changes(a: &EqualSharesSolution, b: &EqualSharesSolution, m: usize) -> usize {
    (0..m)
        .filter(|&p| a.supporter_count(p) != b.supporter_count(p))
        .count()
}

pub const DEFAULT_RUNS: usize = 50;

/// For i = 1..runs, computes the solution at per-voter budget b/n + i by
/// warm-starting the tie-consistent search from the previous solution.
pub fn experiment_topup(
    election: &Election,
    runs: usize,
) -> Result<ExperimentReport, SearchError> {
    let n = BigInt::from(election.num_voters());
    let m = election.num_projects();
    let (mut previous, _) = ames_tie_consistent(election, &EqualSharesSolution::empty())?;
    let mut records = Vec::with_capacity(runs);
    for run in 1..=runs {
        let budget = election.budget() + Ratio::from(BigInt::from(run)) * &n;
        let scaled = election
            .with_budget(budget.clone())
            .expect("budget only grows");
        let started = Instant::now();
        let (solution, _) = ames_tie_consistent(&scaled, &previous)?;
        let millis = started.elapsed().as_millis();
        records.push(ExperimentRecord {
            run,
            per_voter_budget: budget / &n,
            outcome_size: solution.outcome().len(),
            change_metric: price_changes(&solution, &previous, m),
            millis,
        });
        previous = solution;
    }
    let count = BigInt::from(records.len().max(1));
    let sum_size: BigInt = records.iter().map(|r| BigInt::from(r.outcome_size)).sum();
    let sum_change: BigInt = records.iter().map(|r| BigInt::from(r.change_metric)).sum();
    Ok(ExperimentReport {
        records,
        mean_outcome_size: Ratio::new(sum_size, count.clone()),
        mean_change_metric: Ratio::new(sum_change, count),
    })
}

/// CSV with one row per run and a trailing summary row carrying the two
/// averages as exact rationals.
pub fn report_to_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("run,virtual_per_voter_budget,outcome_size,change_metric,millis\n");
    for r in &report.records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.run,
            display(&r.per_voter_budget),
            r.outcome_size,
            r.change_metric,
            r.millis
        ));
    }
    let total_millis: u128 = report.records.iter().map(|r| r.millis).sum();
    out.push_str(&format!(
        "summary,,{},{},{}\n",
        display(&report.mean_outcome_size),
        display(&report.mean_change_metric),
        total_millis
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::testkit::{example1, tie_example};

    #[test]
    fn saturated_election_never_changes() {
        let e = example1();
        let report = experiment_topup(&e, 5).unwrap();
        assert!(report.records.iter().all(|r| r.change_metric == 0));
        assert!(report.records.iter().all(|r| r.outcome_size == 5));
        assert_eq!(report.mean_change_metric, int(0));
        assert_eq!(report.mean_outcome_size, int(5));
    }

    #[test]
    fn tie_example_change_profile() {
        // base solution {p1,p3}; at total budget 7 the tie-consistent
        // search swaps p3 for p2 (two prices change), at 9 p3 returns,
        // after that nothing moves
        let e = tie_example();
        let report = experiment_topup(&e, 3).unwrap();
        let changes: Vec<usize> = report.records.iter().map(|r| r.change_metric).collect();
        assert_eq!(changes, vec![2, 1, 0]);
        assert_eq!(report.records[0].per_voter_budget, ratio(7, 2));
    }

    #[test]
    fn csv_shape_and_determinism_modulo_timing() {
        let e = tie_example();
        let a = report_to_csv(&experiment_topup(&e, 3).unwrap());
        let b = report_to_csv(&experiment_topup(&e, 3).unwrap());
        let strip = |s: &str| {
            s.lines()
                .map(|l| l.rsplit_once(',').unwrap().0.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(a.lines().count(), 5); // header, 3 runs, summary
        assert!(a.starts_with("run,virtual_per_voter_budget,outcome_size,change_metric,millis\n"));
        assert!(a.lines().last().unwrap().starts_with("summary,"));
    }

    #[test]
    fn change_metric_bounded_by_outcome_sizes() {
        let e = tie_example();
        let report = experiment_topup(&e, 4).unwrap();
        let mut prev_size = 2; // |{p1,p3}| at the base budget
        for r in &report.records {
            assert!(r.change_metric <= r.outcome_size + prev_size);
            prev_size = r.outcome_size;
        }
    }
}
