//! Shared fixtures and seeded random instance generators for tests.

use crate::election::Election;
use crate::rational::{int, Ratio};
use crate::solution::EqualSharesSolution;
use num::BigInt;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Three voters who all approve five projects with costs 6, 6, 6, 7, 10
/// and a total budget of 35.
pub fn example1() -> Election {
    let projects = vec![
        ("p1".to_string(), int(6)),
        ("p2".to_string(), int(6)),
        ("p3".to_string(), int(6)),
        ("p4".to_string(), int(7)),
        ("p5".to_string(), int(10)),
    ];
    let all: Vec<String> = projects.iter().map(|(id, _)| id.clone()).collect();
    Election::new(projects, vec![all.clone(), all.clone(), all], int(35)).unwrap()
}

/// The exhaustive outcome on [`example1`]: every project shared by all
/// three voters.
pub fn example1_full_solution(e: &Election) -> EqualSharesSolution {
    let mut supporters = BTreeMap::new();
    for p in 0..e.num_projects() {
        supporters.insert(p, vec![0, 1, 2]);
    }
    EqualSharesSolution::from_supporters(supporters)
}

/// A weakly stable but unstable solution on [`example1`]: voters 0 and 1
/// split p1, p2, p3 while voter 2 buys p4 alone.
pub fn partial_start_solution(e: &Election) -> EqualSharesSolution {
    let mut supporters = BTreeMap::new();
    for id in ["p1", "p2", "p3"] {
        supporters.insert(e.index_of(id).unwrap(), vec![0, 1]);
    }
    supporters.insert(e.index_of("p4").unwrap(), vec![2]);
    EqualSharesSolution::from_supporters(supporters)
}

/// Two voters, three projects, budget 5. Voter 0 approves p1 (cost 1) and
/// p2 (cost 4); voter 1 approves p2 and p3 (cost 2). Priority order is
/// p1, p2, p3.
pub fn tie_example() -> Election {
    Election::new(
        vec![
            ("p1".to_string(), int(1)),
            ("p2".to_string(), int(4)),
            ("p3".to_string(), int(2)),
        ],
        vec![
            vec!["p1".to_string(), "p2".to_string()],
            vec!["p2".to_string(), "p3".to_string()],
        ],
        int(5),
    )
    .unwrap()
}

/// The outcome {p1, p3} on [`tie_example`], each bought alone.
pub fn tie_example_split_solution(e: &Election) -> EqualSharesSolution {
    let mut supporters = BTreeMap::new();
    supporters.insert(e.index_of("p1").unwrap(), vec![0]);
    supporters.insert(e.index_of("p3").unwrap(), vec![1]);
    EqualSharesSolution::from_supporters(supporters)
}

/// `n` voters all approving `m` unit-cost projects with budget `budget`.
pub fn unit_cost_election(n: usize, m: usize, budget: i64) -> Election {
    let projects: Vec<(String, Ratio)> =
        (1..=m).map(|j| (format!("p{j}"), int(1))).collect();
    let all: Vec<String> = projects.iter().map(|(id, _)| id.clone()).collect();
    Election::new(projects, vec![all; n], int(budget)).unwrap()
}

/// A small random election: up to 8 voters and 8 projects, integer costs
/// in 1..=10, non-empty random ballots, budget drawn between 1 and the
/// total cost. Deterministic in the rng.
pub fn random_election(rng: &mut ChaCha8Rng) -> Election {
    loop {
        let n = rng.gen_range(1..=8usize);
        let m = rng.gen_range(1..=8usize);
        let projects: Vec<(String, Ratio)> = (1..=m)
            .map(|j| (format!("p{j}"), int(rng.gen_range(1..=10i64))))
            .collect();
        let ids: Vec<String> = projects.iter().map(|(id, _)| id.clone()).collect();
        let mut ballots = Vec::with_capacity(n);
        for _ in 0..n {
            let mut ballot: Vec<String> = ids
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect();
            if ballot.is_empty() {
                ballot.push(ids[rng.gen_range(0..m)].clone());
            }
            ballots.push(ballot);
        }
        // every project must appear on some ballot
        let covered = (0..m).all(|j| ballots.iter().any(|b| b.contains(&ids[j])));
        if !covered {
            continue;
        }
        let total_cost: Ratio = projects.iter().map(|(_, c)| c.clone()).sum();
        let max = total_cost.to_integer();
        let hi: i64 = max.try_into().unwrap_or(80);
        let budget = int(rng.gen_range(1..=hi.max(1)));
        return Election::new(projects, ballots, budget).unwrap();
    }
}

/// A random priceable equal-shares solution on `e`: projects are visited
/// in random order and bought by a random supporter set whenever every
/// chosen supporter can still afford the resulting share.
pub fn random_solution(e: &Election, rng: &mut ChaCha8Rng) -> EqualSharesSolution {
    let mut solution = EqualSharesSolution::empty();
    let mut loads = vec![Ratio::from(BigInt::from(0)); e.num_voters()];
    let mut order: Vec<usize> = (0..e.num_projects()).collect();
    order.shuffle(rng);
    for p in order {
        if rng.gen_bool(0.3) {
            continue;
        }
        let mut approvers = e.approvers(p).to_vec();
        approvers.shuffle(rng);
        let keep = rng.gen_range(1..=approvers.len());
        let mut chosen: Vec<usize> = approvers.into_iter().take(keep).collect();
        chosen.sort_unstable();
        let price = e.cost(p) / BigInt::from(chosen.len());
        if chosen.iter().all(|&i| &loads[i] + &price <= *e.share()) {
            for &i in &chosen {
                loads[i] += &price;
            }
            solution.insert(p, chosen);
        }
    }
    solution
}

/// A fresh deterministic rng for a named test.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
