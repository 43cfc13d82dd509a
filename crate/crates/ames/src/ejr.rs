//! Brute-force oracle for extended justified representation, intended as
//! desk-scale ground truth rather than a scalable checker.

use crate::election::Election;
use crate::rational::Ratio;
use num::BigInt;
use thiserror::Error;

pub const DEFAULT_PROJECT_LIMIT: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EjrError {
    #[error("{0} projects exceed the oracle limit")]
    TooLarge(usize),
}

/// A cohesive group left underrepresented: every voter in `group`
/// approves all of `projects`, the group can afford them, yet nobody in
/// it gets utility `required`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EjrViolation {
    pub projects: Vec<usize>,
    pub group: Vec<usize>,
    pub max_utility: usize,
    pub required: usize,
}

/// Enumerates nonempty project sets T by increasing size, then
/// lexicographically by priority order. Calls `f` with each T (as indices
/// into `by_priority`-resolved project ids) until it returns true.
fn enumerate_subsets(
    by_priority: &[usize],
    limit: usize,
    mut f: impl FnMut(&[usize]) -> bool,
) -> bool {
    let m = by_priority.len();
    let mut subset: Vec<usize> = Vec::with_capacity(limit);
    for size in 1..=m {
        if combinations(by_priority, size, &mut subset, 0, &mut f) {
            return true;
        }
    }
    false
}

fn combinations(
    items: &[usize],
    size: usize,
    acc: &mut Vec<usize>,
    from: usize,
    f: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if acc.len() == size {
        return f(acc);
    }
    for k in from..items.len() {
        acc.push(items[k]);
        if combinations(items, size, acc, k + 1, f) {
            return true;
        }
        acc.pop();
    }
    false
}

fn priority_order(election: &Election) -> Vec<usize> {
    let mut order: Vec<usize> = (0..election.num_projects()).collect();
    order.sort_by_key(|&p| election.priority(p));
    order
}

/// The maximal candidate group for T: all voters approving every project
/// in T. Any T-cohesive group is a subset of it, so it is the only group
/// that needs checking.
fn common_approvers(election: &Election, t: &[usize]) -> Vec<usize> {
    (0..election.num_voters())
        .filter(|&i| t.iter().all(|&p| election.approves(i, p)))
        .collect()
}

fn is_cohesive(election: &Election, t: &[usize], group_size: usize) -> bool {
    let cost: Ratio = t.iter().map(|&p| election.cost(p).clone()).sum();
    Ratio::from(BigInt::from(group_size)) * election.budget()
        >= cost * BigInt::from(election.num_voters())
}

/// Checks W for extended justified representation by enumerating every
/// nonempty T ⊆ P. Returns the first violation in enumeration order.
pub fn ejr_check(
    election: &Election,
    w: &[usize],
    limit: usize,
) -> Result<Option<EjrViolation>, EjrError> {
    let m = election.num_projects();
    if m > limit {
        return Err(EjrError::TooLarge(m));
    }
    let utilities: Vec<usize> = (0..election.num_voters())
        .map(|i| w.iter().filter(|&&p| election.approves(i, p)).count())
        .collect();
    let order = priority_order(election);
    let mut violation = None;
    enumerate_subsets(&order, m, |t| {
        // Any violating group consists of common approvers of T whose
        // utility is below |T|; the set of all such voters is the maximal
        // violating candidate, so it is the only group to check.
        let group: Vec<usize> = common_approvers(election, t)
            .into_iter()
            .filter(|&i| utilities[i] < t.len())
            .collect();
        if group.is_empty() || !is_cohesive(election, t, group.len()) {
            return false;
        }
        let max_utility = group.iter().map(|&i| utilities[i]).max().unwrap();
        let mut projects = t.to_vec();
        projects.sort_unstable();
        violation = Some(EjrViolation {
            projects,
            group,
            max_utility,
            required: t.len(),
        });
        true
    });
    Ok(violation)
}

/// All cohesive (T, maximal group) pairs, in enumeration order.
pub fn cohesive_groups(
    election: &Election,
    limit: usize,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>, EjrError> {
    let m = election.num_projects();
    if m > limit {
        return Err(EjrError::TooLarge(m));
    }
    let order = priority_order(election);
    let mut out = Vec::new();
    enumerate_subsets(&order, m, |t| {
        let group = common_approvers(election, t);
        if !group.is_empty() && is_cohesive(election, t, group.len()) {
            let mut projects = t.to_vec();
            projects.sort_unstable();
            out.push((projects, group));
        }
        false
    });
    Ok(out)
}
