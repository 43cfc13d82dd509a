//! Election data model: projects, approval ballots, budgets, tie-break
//! order, and the payment-gap constant `ε`.

use crate::rational::{abs_diff, Ratio};
use num::{BigInt, Signed};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ElectionError {
    #[error("project {0} is approved by no voter")]
    UnapprovedProject(String),
    #[error("voter {voter} approves unknown project {id}")]
    UnknownProjectInBallot { voter: usize, id: String },
    #[error("project {0} has non-positive cost")]
    NonPositiveCost(String),
    #[error("budget must be positive")]
    NonPositiveBudget,
    #[error("an election needs at least one voter")]
    NoVoters,
    #[error("an election needs at least one project")]
    NoProjects,
    #[error("duplicate project id {0}")]
    DuplicateProjectId(String),
    #[error("priority order must mention every project exactly once")]
    BadPriorityOrder,
}

/// A proposed project. `priority` is a tie-break rank over `1..=m`;
/// a smaller rank means higher priority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Project {
    pub id: String,
    pub cost: Ratio,
    pub priority: usize,
}

/// An approval election. Immutable once built; `new` enforces every
/// invariant, so a constructed election is always valid.
///
/// Voters are `0..n` indices, projects are `0..m` indices into `projects`.
#[derive(Debug, Clone)]
pub struct Election {
    projects: Vec<Project>,
    /// Per-voter sorted list of approved project indices.
    ballots: Vec<Vec<usize>>,
    /// Per-project sorted list of approving voters (derived from ballots).
    approvers: Vec<Vec<usize>>,
    budget: Ratio,
    /// b/n, the virtual budget of each voter.
    share: Ratio,
    /// Minimum positive gap between two values of K = {cost(p)/i}.
    epsilon: Ratio,
}

impl Election {
    /// Builds and validates an election. `ballots[i]` lists the project ids
    /// approved by voter `i`. Projects get priority ranks `1..=m` in input
    /// order; use [`Election::with_priority_order`] to override.
    pub fn new(
        projects: Vec<(String, Ratio)>,
        ballots: Vec<Vec<String>>,
        budget: Ratio,
    ) -> Result<Self, ElectionError> {
        let projects = projects
            .into_iter()
            .enumerate()
            .map(|(i, (id, cost))| Project {
                id,
                cost,
                priority: i + 1,
            })
            .collect();
        Self::from_projects(projects, ballots, budget)
    }

    pub fn from_projects(
        projects: Vec<Project>,
        ballots: Vec<Vec<String>>,
        budget: Ratio,
    ) -> Result<Self, ElectionError> {
        if ballots.is_empty() {
            return Err(ElectionError::NoVoters);
        }
        if projects.is_empty() {
            return Err(ElectionError::NoProjects);
        }
        if !budget.is_positive() {
            return Err(ElectionError::NonPositiveBudget);
        }
        let mut index = HashMap::new();
        for (i, p) in projects.iter().enumerate() {
            if !p.cost.is_positive() {
                return Err(ElectionError::NonPositiveCost(p.id.clone()));
            }
            if index.insert(p.id.clone(), i).is_some() {
                return Err(ElectionError::DuplicateProjectId(p.id.clone()));
            }
        }
        let mut ranks: Vec<usize> = projects.iter().map(|p| p.priority).collect();
        ranks.sort_unstable();
        if ranks != (1..=projects.len()).collect::<Vec<_>>() {
            return Err(ElectionError::BadPriorityOrder);
        }

        let mut indexed_ballots = Vec::with_capacity(ballots.len());
        let mut approvers = vec![Vec::new(); projects.len()];
        for (voter, ballot) in ballots.iter().enumerate() {
            let mut approved = Vec::with_capacity(ballot.len());
            for id in ballot {
                let &p = index
                    .get(id.as_str())
                    .ok_or_else(|| ElectionError::UnknownProjectInBallot {
                        voter,
                        id: id.clone(),
                    })?;
                approved.push(p);
            }
            approved.sort_unstable();
            approved.dedup();
            for &p in &approved {
                approvers[p].push(voter);
            }
            indexed_ballots.push(approved);
        }
        for (p, voters) in approvers.iter().enumerate() {
            if voters.is_empty() {
                return Err(ElectionError::UnapprovedProject(projects[p].id.clone()));
            }
        }

        let n = indexed_ballots.len();
        let share = &budget / BigInt::from(n);
        let epsilon = compute_epsilon(&projects, n);
        Ok(Election {
            projects,
            ballots: indexed_ballots,
            approvers,
            budget,
            share,
            epsilon,
        })
    }

    /// Same election with a different budget. ε is unaffected by the budget,
    /// so it is carried over unchanged.
    pub fn with_budget(&self, budget: Ratio) -> Result<Self, ElectionError> {
        if !budget.is_positive() {
            return Err(ElectionError::NonPositiveBudget);
        }
        let mut e = self.clone();
        e.share = &budget / BigInt::from(e.ballots.len());
        e.budget = budget;
        Ok(e)
    }

    /// Reassigns priority ranks so that `order[0]` gets the highest priority.
    pub fn with_priority_order(&self, order: &[String]) -> Result<Self, ElectionError> {
        if order.len() != self.projects.len() {
            return Err(ElectionError::BadPriorityOrder);
        }
        let mut e = self.clone();
        let mut seen = vec![false; e.projects.len()];
        for (rank0, id) in order.iter().enumerate() {
            let p = self.index_of(id).ok_or(ElectionError::BadPriorityOrder)?;
            if seen[p] {
                return Err(ElectionError::BadPriorityOrder);
            }
            seen[p] = true;
            e.projects[p].priority = rank0 + 1;
        }
        Ok(e)
    }

    pub fn num_voters(&self) -> usize {
        self.ballots.len()
    }

    pub fn num_projects(&self) -> usize {
        self.projects.len()
    }

    pub fn projects(&self) -> &[Project] {
        &self.projects
    }

    pub fn project(&self, p: usize) -> &Project {
        &self.projects[p]
    }

    pub fn cost(&self, p: usize) -> &Ratio {
        &self.projects[p].cost
    }

    pub fn priority(&self, p: usize) -> usize {
        self.projects[p].priority
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.projects.iter().position(|p| p.id == id)
    }

    pub fn ballot(&self, voter: usize) -> &[usize] {
        &self.ballots[voter]
    }

    pub fn approves(&self, voter: usize, p: usize) -> bool {
        self.ballots[voter].binary_search(&p).is_ok()
    }

    pub fn approvers(&self, p: usize) -> &[usize] {
        &self.approvers[p]
    }

    pub fn budget(&self) -> &Ratio {
        &self.budget
    }

    /// Per-voter virtual budget b/n.
    pub fn share(&self) -> &Ratio {
        &self.share
    }

    /// Minimum positive gap between two distinct values of
    /// K = {cost(p)/i : p ∈ P, i ∈ [n]}. If all quotients coincide
    /// (degenerate K), the single value itself is returned; it is then
    /// vacuously a valid payment-gap bound.
    pub fn epsilon(&self) -> &Ratio {
        &self.epsilon
    }

    pub fn total_cost(&self, outcome: &[usize]) -> Ratio {
        outcome.iter().map(|&p| &self.projects[p].cost).sum()
    }

    /// cost(W) ≤ b
    pub fn is_feasible(&self, outcome: &[usize]) -> bool {
        self.total_cost(outcome) <= self.budget
    }

    /// Feasible and no further project fits within the budget.
    pub fn is_exhaustive(&self, outcome: &[usize]) -> bool {
        let total = self.total_cost(outcome);
        if total > self.budget {
            return false;
        }
        let slack = &self.budget - total;
        (0..self.projects.len())
            .filter(|p| !outcome.contains(p))
            .all(|p| self.projects[p].cost > slack)
    }

    /// True iff `a` beats `b` on ties: strictly higher priority (smaller rank).
    pub fn outranks(&self, a: usize, b: usize) -> bool {
        self.projects[a].priority < self.projects[b].priority
    }
}

fn compute_epsilon(projects: &[Project], n: usize) -> Ratio {
    let mut quotients: Vec<Ratio> = Vec::with_capacity(projects.len() * n);
    for p in projects {
        for i in 1..=n {
            quotients.push(&p.cost / BigInt::from(i));
        }
    }
    quotients.sort_unstable();
    quotients.dedup();
    if quotients.len() == 1 {
        return quotients.pop().unwrap();
    }
    quotients
        .windows(2)
        .map(|w| abs_diff(&w[1], &w[0]))
        .min()
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::testkit::{example1, tie_example, unit_cost_election};

    #[test]
    fn example1_is_valid() {
        let e = example1();
        assert_eq!(e.num_voters(), 3);
        assert_eq!(e.num_projects(), 5);
        assert_eq!(e.budget(), &int(35));
    }

    #[test]
    fn unapproved_project_is_rejected() {
        let err = Election::new(
            vec![("p1".into(), int(1)), ("p5".into(), int(2))],
            vec![vec!["p1".into()]],
            int(10),
        )
        .unwrap_err();
        assert_eq!(err, ElectionError::UnapprovedProject("p5".into()));
    }

    #[test]
    fn zero_cost_is_rejected() {
        let err = Election::new(
            vec![("p1".into(), int(0))],
            vec![vec!["p1".into()]],
            int(10),
        )
        .unwrap_err();
        assert_eq!(err, ElectionError::NonPositiveCost("p1".into()));
    }

    #[test]
    fn unknown_ballot_entry_is_rejected() {
        let err = Election::new(
            vec![("p1".into(), int(1))],
            vec![vec!["p1".into()], vec!["nope".into()]],
            int(10),
        )
        .unwrap_err();
        assert_eq!(
            err,
            ElectionError::UnknownProjectInBallot {
                voter: 1,
                id: "nope".into()
            }
        );
    }

    #[test]
    fn epsilon_example1() {
        // Oracle: enumerate K by hand.
        // K = {6,3,2, 7,7/2,7/3, 10,5,10/3}; min pairwise gap is 7/2 - 10/3.
        assert_eq!(example1().epsilon(), &ratio(1, 6));
    }

    #[test]
    fn epsilon_tie_example() {
        // K = {1, 1/2, 4, 2}; min gap 1/2.
        assert_eq!(tie_example().epsilon(), &ratio(1, 2));
    }

    #[test]
    fn epsilon_unit_costs() {
        for n in 2..=7 {
            let e = unit_cost_election(n, 3, 2);
            assert_eq!(e.epsilon(), &ratio(1, (n * (n - 1)) as i64));
        }
    }

    #[test]
    fn epsilon_degenerate_k() {
        // Single voter, single project: K = {cost}, ε defined as that value.
        let e = Election::new(
            vec![("p1".into(), int(4))],
            vec![vec!["p1".into()]],
            int(10),
        )
        .unwrap();
        assert_eq!(e.epsilon(), &int(4));
    }

    #[test]
    fn feasibility_and_exhaustiveness() {
        let e = example1();
        let all: Vec<usize> = (0..5).collect();
        assert!(e.is_feasible(&all));
        assert!(e.is_exhaustive(&all));
        let four: Vec<usize> = (0..4).collect(); // cost 25, p5 (10) fits
        assert!(e.is_feasible(&four));
        assert!(!e.is_exhaustive(&four));
        assert!(e.is_feasible(&[]));
        assert!(!e.is_exhaustive(&[]));
    }

    #[test]
    fn priority_override() {
        let e = tie_example();
        let order = vec!["p3".to_string(), "p2".to_string(), "p1".to_string()];
        let e2 = e.with_priority_order(&order).unwrap();
        assert_eq!(e2.priority(e2.index_of("p3").unwrap()), 1);
        assert_eq!(e2.priority(e2.index_of("p1").unwrap()), 3);
    }
}
