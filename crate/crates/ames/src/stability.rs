//! Stability predicates, the near-linear stability verifier, and
//! stability certificates for untrusted-computation consumers.

use crate::election::Election;
use crate::rational::Ratio;
use crate::solution::{EqualSharesSolution, SolutionError};
use num::{BigInt, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

/// Evidence that a solution is unstable: `t` voters (all approving
/// `project`, all with capacity at least cost/t) can share the project at
/// per-voter price cost/t, with t exceeding the current supporter count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstabilityWitness {
    pub project: usize,
    pub t: usize,
    pub voters: Vec<usize>,
    pub price: Ratio,
}

/// Which capacity notion a scan uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CapacityMode {
    /// κ_i as in Eq-style capacities: max{z_i − ε, b/n − X_i}.
    Plain,
    /// Project-dependent capacities: a voter may fully withdraw from a
    /// strictly lower-priority project when considering a candidate.
    Lexicographic,
}

/// Precomputed per-solution capacity state shared by the stability checks
/// and the greedy search. In lexicographic mode, voters whose largest
/// payment exceeds their base capacity form a second list sorted by that
/// payment; per candidate project the two sorted lists are merged, which
/// keeps a scan at O(n) per project.
pub(crate) struct CapacityScan<'a> {
    election: &'a Election,
    solution: &'a EqualSharesSolution,
    pub kappa: Vec<Ratio>,
    pub loads: Vec<Ratio>,
    /// For voters with z_i > κ_i: (z_i, priority rank of the
    /// lowest-priority project on which the voter pays z_i).
    bump: Vec<Option<(Ratio, usize)>>,
    /// All voters, non-increasing base capacity.
    base_order: Vec<usize>,
    /// Bumpable voters, non-increasing z.
    bump_order: Vec<usize>,
}

impl<'a> CapacityScan<'a> {
    pub fn new(
        election: &'a Election,
        solution: &'a EqualSharesSolution,
        mode: CapacityMode,
    ) -> Self {
        let n = election.num_voters();
        let mut loads = vec![Ratio::zero(); n];
        // (z_i, lowest-priority rank attaining it)
        let mut z: Vec<Option<(Ratio, usize)>> = vec![None; n];
        for (p, voters) in solution.iter() {
            let price = election.cost(p) / BigInt::from(voters.len());
            let rank = election.priority(p);
            for &i in voters {
                loads[i] += &price;
                match &mut z[i] {
                    Some((best, best_rank)) => {
                        if price > *best {
                            *best = price.clone();
                            *best_rank = rank;
                        } else if price == *best && rank > *best_rank {
                            *best_rank = rank;
                        }
                    }
                    slot => *slot = Some((price.clone(), rank)),
                }
            }
        }
        let eps = election.epsilon();
        let mut kappa = Vec::with_capacity(n);
        let mut bump: Vec<Option<(Ratio, usize)>> = vec![None; n];
        for i in 0..n {
            let slack = election.share() - &loads[i];
            let k = match &z[i] {
                Some((zi, _)) => (zi - eps).max(slack),
                None => slack,
            };
            if mode == CapacityMode::Lexicographic {
                if let Some((zi, rank)) = &z[i] {
                    if *zi > k {
                        bump[i] = Some((zi.clone(), *rank));
                    }
                }
            }
            kappa.push(k);
        }
        let mut base_order: Vec<usize> = (0..n).collect();
        base_order.sort_by(|&a, &b| kappa[b].cmp(&kappa[a]).then(a.cmp(&b)));
        let mut bump_order: Vec<usize> = (0..n).filter(|&i| bump[i].is_some()).collect();
        bump_order.sort_by(|&a, &b| {
            let za = &bump[a].as_ref().unwrap().0;
            let zb = &bump[b].as_ref().unwrap().0;
            zb.cmp(za).then(a.cmp(&b))
        });
        CapacityScan {
            election,
            solution,
            kappa,
            loads,
            bump,
            base_order,
            bump_order,
        }
    }

    fn bump_active(&self, voter: usize, candidate_rank: usize) -> bool {
        matches!(&self.bump[voter], Some((_, rank)) if *rank > candidate_rank)
    }

    /// Capacity of `voter` with respect to candidate project `p`.
    pub fn capacity_for(&self, voter: usize, p: usize) -> &Ratio {
        match &self.bump[voter] {
            Some((z, rank)) if *rank > self.election.priority(p) => z,
            _ => &self.kappa[voter],
        }
    }

    /// Visits the capacities of p's approvers in non-increasing order,
    /// merging the base and bumped lists.
    fn for_each_approver_capacity(&self, p: usize, mut f: impl FnMut(&Ratio)) {
        let rank = self.election.priority(p);
        let mut bi = 0;
        let mut zi = 0;
        loop {
            while zi < self.bump_order.len() && !self.bump_active(self.bump_order[zi], rank) {
                zi += 1;
            }
            while bi < self.base_order.len() && self.bump_active(self.base_order[bi], rank) {
                bi += 1;
            }
            let take_bump = match (self.bump_order.get(zi), self.base_order.get(bi)) {
                (None, None) => break,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (Some(&z), Some(&b)) => self.bump[z].as_ref().unwrap().0 >= self.kappa[b],
            };
            let voter = if take_bump {
                let v = self.bump_order[zi];
                zi += 1;
                v
            } else {
                let v = self.base_order[bi];
                bi += 1;
                v
            };
            if self.election.approves(voter, p) {
                let value = if take_bump {
                    &self.bump[voter].as_ref().unwrap().0
                } else {
                    &self.kappa[voter]
                };
                f(value);
            }
        }
    }

    /// α(p): the maximum t such that the t-th largest capacity among p's
    /// approvers is at least cost(p)/t. The predicate is not monotone in t,
    /// so the whole prefix is scanned.
    pub fn alpha(&self, p: usize) -> Option<usize> {
        let cost = self.election.cost(p);
        let mut best = None;
        let mut t = 0usize;
        self.for_each_approver_capacity(p, |cap| {
            t += 1;
            if cap * BigInt::from(t) >= *cost {
                best = Some(t);
            }
        });
        best
    }

    /// For each project, the maximal witness count t_p > |N_p(X)| together
    /// with the resulting price cost(p)/t_p; `None` where no witness exists.
    pub fn candidates(&self) -> Vec<Option<(usize, Ratio)>> {
        (0..self.election.num_projects())
            .map(|p| {
                let t = self.alpha(p)?;
                if t > self.solution.supporter_count(p) {
                    Some((t, self.election.cost(p) / BigInt::from(t)))
                } else {
                    None
                }
            })
            .collect()
    }

    /// All approvers of `p` whose capacity (w.r.t. `p`) is at least `price`.
    pub fn qualified_approvers(&self, p: usize, price: &Ratio) -> Vec<usize> {
        self.election
            .approvers(p)
            .iter()
            .copied()
            .filter(|&i| self.capacity_for(i, p) >= price)
            .collect()
    }

    /// Picks the best witness: minimal resulting price, ties by project
    /// priority. The witness count is the maximal one for that project.
    pub fn best_witness(&self) -> Option<InstabilityWitness> {
        let mut best: Option<(usize, usize, Ratio)> = None;
        for (p, cand) in self.candidates().into_iter().enumerate() {
            if let Some((t, price)) = cand {
                let better = match &best {
                    None => true,
                    Some((bp, _, bprice)) => {
                        price < *bprice || (price == *bprice && self.election.outranks(p, *bp))
                    }
                };
                if better {
                    best = Some((p, t, price));
                }
            }
        }
        best.map(|(project, t, price)| {
            let voters = self.qualified_approvers(project, &price);
            debug_assert_eq!(voters.len(), t);
            InstabilityWitness {
                project,
                t,
                voters,
                price,
            }
        })
    }
}

/// Stability per Definition-style semantics: no project can attain a
/// supporter count above its current one with enough capacity.
/// `Err` carries the best witness.
pub fn is_stable(
    solution: &EqualSharesSolution,
    election: &Election,
) -> Result<(), InstabilityWitness> {
    let scan = CapacityScan::new(election, solution, CapacityMode::Plain);
    match scan.best_witness() {
        None => Ok(()),
        Some(w) => Err(w),
    }
}

/// Weak stability: like [`is_stable`] but only projects outside W may
/// witness instability.
pub fn is_weakly_stable(solution: &EqualSharesSolution, election: &Election) -> bool {
    let scan = CapacityScan::new(election, solution, CapacityMode::Plain);
    (0..election.num_projects())
        .filter(|&p| !solution.contains(p))
        .all(|p| scan.alpha(p).is_none())
}

/// Lexicographic stability: stability under project-dependent capacities
/// that let a voter fully withdraw from strictly lower-priority projects.
pub fn is_lex_stable(
    solution: &EqualSharesSolution,
    election: &Election,
) -> Result<(), InstabilityWitness> {
    let scan = CapacityScan::new(election, solution, CapacityMode::Lexicographic);
    match scan.best_witness() {
        None => Ok(()),
        Some(w) => Err(w),
    }
}

/// Auxiliary data that lets an untrusted party's solution be checked in
/// time linear in the input: the solution itself plus the capacities
/// sorted non-increasing and the payment-gap constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityCertificate {
    pub selected: Vec<usize>,
    pub supporters: BTreeMap<usize, Vec<usize>>,
    /// (voter, κ) pairs sorted by capacity, non-increasing.
    pub capacities: Vec<(usize, Ratio)>,
    pub epsilon: Ratio,
}

impl StabilityCertificate {
    pub fn solution(&self) -> EqualSharesSolution {
        EqualSharesSolution::from_supporters(self.supporters.clone())
    }
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum CertificateReject {
    #[error("capacity of voter {0} does not match the solution")]
    BadCapacity(usize),
    #[error("capacity list is not non-increasing at position {0}")]
    NotSorted(usize),
    #[error("solution is unstable: project {} with t={}", .0.project, .0.t)]
    Unstable(InstabilityWitness),
    #[error("malformed solution: {0}")]
    MalformedSolution(String),
}

/// Decides stability of `(W, supporters)` and emits the certificate that
/// lets anyone re-check the verdict without sorting. Runs in
/// O(n log n + mn). Invariant violations are errors, not instability.
pub fn verify(
    solution: &EqualSharesSolution,
    election: &Election,
) -> Result<(Result<(), InstabilityWitness>, StabilityCertificate), SolutionError> {
    solution.validate(election)?;
    let scan = CapacityScan::new(election, solution, CapacityMode::Plain);
    let verdict = match scan.best_witness() {
        None => Ok(()),
        Some(w) => Err(w),
    };
    let capacities = scan
        .base_order
        .iter()
        .map(|&i| (i, scan.kappa[i].clone()))
        .collect();
    let cert = StabilityCertificate {
        selected: solution.outcome(),
        supporters: solution.iter().map(|(p, v)| (p, v.to_vec())).collect(),
        capacities,
        epsilon: election.epsilon().clone(),
    };
    Ok((verdict, cert))
}

/// Checks an untrusted certificate in O(mn): capacities must recompute
/// from the solution, be listed non-increasing, and witness no instability.
/// No sorting is performed.
pub fn verify_certificate(
    cert: &StabilityCertificate,
    election: &Election,
) -> Result<(), CertificateReject> {
    let n = election.num_voters();
    let solution = cert.solution();
    if let Err(e) = solution.validate(election) {
        return Err(CertificateReject::MalformedSolution(e.to_string()));
    }
    if cert.selected != solution.outcome() {
        return Err(CertificateReject::MalformedSolution(
            "selected projects disagree with supporter map".into(),
        ));
    }
    if &cert.epsilon != election.epsilon() {
        return Err(CertificateReject::MalformedSolution(
            "epsilon does not match the election".into(),
        ));
    }
    if cert.capacities.len() != n {
        return Err(CertificateReject::MalformedSolution(
            "capacity list does not cover all voters".into(),
        ));
    }
    let mut seen = vec![false; n];
    for (voter, _) in &cert.capacities {
        if *voter >= n || seen[*voter] {
            return Err(CertificateReject::MalformedSolution(
                "capacity list does not cover all voters".into(),
            ));
        }
        seen[*voter] = true;
    }
    let expected = solution.capacities(election);
    for (voter, kappa) in &cert.capacities {
        if kappa != &expected[*voter] {
            return Err(CertificateReject::BadCapacity(*voter));
        }
    }
    for (pos, pair) in cert.capacities.windows(2).enumerate() {
        if pair[0].1 < pair[1].1 {
            return Err(CertificateReject::NotSorted(pos + 1));
        }
    }
    // α scan over the certificate's own order.
    for p in 0..election.num_projects() {
        let cost = election.cost(p);
        let mut t = 0usize;
        let mut alpha = None;
        for (voter, kappa) in &cert.capacities {
            if election.approves(*voter, p) {
                t += 1;
                if kappa * BigInt::from(t) >= *cost {
                    alpha = Some(t);
                }
            }
        }
        let current = solution.supporter_count(p);
        if let Some(t) = alpha {
            if t > current {
                let price = cost / BigInt::from(t);
                let voters = cert
                    .capacities
                    .iter()
                    .filter(|(v, k)| election.approves(*v, p) && k >= &price)
                    .map(|(v, _)| *v)
                    .collect();
                return Err(CertificateReject::Unstable(InstabilityWitness {
                    project: p,
                    t,
                    voters,
                    price,
                }));
            }
        }
    }
    Ok(())
}
