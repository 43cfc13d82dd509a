//! Baseline method of equal shares for approval ballots. Used for the
//! restart completion strategy and as a cross-check for the local search.

use crate::election::Election;
use crate::rational::{Price, Ratio};
use crate::solution::LoadDistribution;
use num::{BigInt, Zero};

/// Minimal per-voter share ρ with Σ_{i approving p} min{ρ, b/n − X_i} =
/// cost(p); infinite when even full remaining budgets cannot cover the
/// cost. `remaining[i]` is b/n − X_i.
pub fn rho(p: usize, remaining: &[Ratio], election: &Election) -> Price {
    let mut caps: Vec<&Ratio> = election
        .approvers(p)
        .iter()
        .map(|&i| &remaining[i])
        .collect();
    caps.sort();
    let total: Ratio = caps.iter().copied().sum();
    let cost = election.cost(p);
    if total < *cost {
        return Price::Infinite;
    }
    // Walk the segments on which the set of budget-capped voters is fixed:
    // after the k smallest budgets are exhausted, ρ = (cost − prefix_k)/(a−k).
    let mut prefix = Ratio::zero();
    for (k, cap) in caps.iter().enumerate() {
        let payers = BigInt::from(caps.len() - k);
        let candidate = (cost - &prefix) / payers;
        if candidate <= **cap {
            return Price::Finite(candidate);
        }
        prefix += *cap;
    }
    // total >= cost guarantees some segment admits a solution
    unreachable!("rho segment walk failed");
}

/// Runs the method of equal shares: repeatedly funds the project with the
/// smallest finite ρ (ties by priority), approvers paying min{ρ, remaining}.
/// The result is priceable but in general not an equal-shares solution.
pub fn mes(election: &Election) -> (Vec<usize>, LoadDistribution) {
    let n = election.num_voters();
    let m = election.num_projects();
    let mut remaining: Vec<Ratio> = vec![election.share().clone(); n];
    let mut selected: Vec<bool> = vec![false; m];
    let mut w = Vec::new();
    let mut loads = LoadDistribution::default();
    loop {
        let mut best: Option<(Ratio, usize)> = None;
        for p in 0..m {
            if selected[p] {
                continue;
            }
            if let Price::Finite(r) = rho(p, &remaining, election) {
                let better = match &best {
                    None => true,
                    Some((br, bp)) => r < *br || (r == *br && election.outranks(p, *bp)),
                };
                if better {
                    best = Some((r, p));
                }
            }
        }
        let Some((r, p)) = best else { break };
        for &i in election.approvers(p) {
            let pay = r.clone().min(remaining[i].clone());
            if !pay.is_zero() {
                remaining[i] -= &pay;
                loads.set(i, p, pay);
            }
        }
        selected[p] = true;
        w.push(p);
    }
    w.sort_unstable();
    (w, loads)
}
