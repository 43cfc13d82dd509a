//! JSON wire formats. Rationals travel as exact [numerator, denominator]
//! pairs, never as floats.

use crate::adaptive::CompletionResult;
use crate::election::Election;
use crate::rational::{from_pair, to_pair, NumberError, Ratio};
use crate::search::UpdateTrace;
use crate::stability::StabilityCertificate;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WireError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Number(#[from] NumberError),
    #[error("unknown project id {0:?}")]
    UnknownProject(String),
}

type Pair = (i128, i128);

#[derive(Serialize, Deserialize)]
struct CertificateWire {
    projects_selected: Vec<String>,
    supporters: BTreeMap<String, Vec<usize>>,
    /// [voter, numerator, denominator] triples, in capacity order.
    capacities: Vec<(usize, i128, i128)>,
    epsilon: Pair,
}

pub fn certificate_to_json(
    cert: &StabilityCertificate,
    election: &Election,
) -> Result<String, WireError> {
    let id = |p: &usize| election.project(*p).id.clone();
    let mut capacities = Vec::with_capacity(cert.capacities.len());
    for (voter, kappa) in &cert.capacities {
        let (n, d) = to_pair(kappa)?;
        capacities.push((*voter, n, d));
    }
    let wire = CertificateWire {
        projects_selected: cert.selected.iter().map(id).collect(),
        supporters: cert
            .supporters
            .iter()
            .map(|(p, v)| (id(p), v.clone()))
            .collect(),
        capacities,
        epsilon: to_pair(&cert.epsilon)?,
    };
    Ok(serde_json::to_string_pretty(&wire)?)
}

pub fn certificate_from_json(
    text: &str,
    election: &Election,
) -> Result<StabilityCertificate, WireError> {
    let wire: CertificateWire = serde_json::from_str(text)?;
    let resolve = |id: &str| {
        election
            .index_of(id)
            .ok_or_else(|| WireError::UnknownProject(id.to_string()))
    };
    let mut selected = Vec::with_capacity(wire.projects_selected.len());
    for id in &wire.projects_selected {
        selected.push(resolve(id)?);
    }
    let mut supporters = BTreeMap::new();
    for (id, voters) in &wire.supporters {
        supporters.insert(resolve(id)?, voters.clone());
    }
    let mut capacities = Vec::with_capacity(wire.capacities.len());
    for (voter, n, d) in wire.capacities {
        capacities.push((voter, from_pair(n, d)?));
    }
    Ok(StabilityCertificate {
        selected,
        supporters,
        capacities,
        epsilon: from_pair(wire.epsilon.0, wire.epsilon.1)?,
    })
}

#[derive(Serialize, Deserialize)]
struct RemovalWire {
    project: String,
    old_price: Pair,
}

#[derive(Serialize, Deserialize)]
struct StepWire {
    project: String,
    t: usize,
    price: Pair,
    removed: Vec<RemovalWire>,
    new_supporters: Vec<usize>,
}

pub fn trace_to_json(trace: &UpdateTrace, election: &Election) -> Result<String, WireError> {
    let mut steps = Vec::with_capacity(trace.steps.len());
    for s in &trace.steps {
        let mut removed = Vec::with_capacity(s.removed.len());
        for r in &s.removed {
            removed.push(RemovalWire {
                project: election.project(r.project).id.clone(),
                old_price: to_pair(&r.old_price)?,
            });
        }
        steps.push(StepWire {
            project: election.project(s.project).id.clone(),
            t: s.t,
            price: to_pair(&s.price)?,
            removed,
            new_supporters: s.supporters.clone(),
        });
    }
    Ok(serde_json::to_string_pretty(&steps)?)
}

#[derive(Serialize, Deserialize)]
struct IterationWire {
    virtual_budget: Pair,
    steps_performed: usize,
    outcome_cost: Pair,
    projects: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CompletionWire {
    real_budget: Pair,
    virtual_budget: Pair,
    strategy: String,
    iterations: Vec<IterationWire>,
    final_outcome: Vec<String>,
    exhaustive: bool,
}

pub fn completion_to_json(
    result: &CompletionResult,
    election: &Election,
) -> Result<String, WireError> {
    let mut iterations = Vec::with_capacity(result.iterations.len());
    for it in &result.iterations {
        iterations.push(IterationWire {
            virtual_budget: to_pair(&it.virtual_budget)?,
            steps_performed: it.steps_performed,
            outcome_cost: to_pair(&it.outcome_cost)?,
            projects: it.projects.clone(),
        });
    }
    let wire = CompletionWire {
        real_budget: to_pair(&result.real_budget)?,
        virtual_budget: to_pair(&result.virtual_budget)?,
        strategy: result.strategy.to_string(),
        iterations,
        final_outcome: result
            .final_outcome
            .iter()
            .map(|&p| election.project(p).id.clone())
            .collect(),
        exhaustive: result.exhaustive,
    };
    Ok(serde_json::to_string_pretty(&wire)?)
}

/// Outcome plus payments, used by the plain `run` and `mes` commands.
pub fn outcome_to_json(
    outcome: &[usize],
    payments: &[(usize, usize, Ratio)],
    election: &Election,
) -> Result<String, WireError> {
    #[derive(Serialize)]
    struct PaymentWire {
        voter: usize,
        project: String,
        amount: Pair,
    }
    #[derive(Serialize)]
    struct OutcomeWire {
        outcome: Vec<String>,
        total_cost: Pair,
        payments: Vec<PaymentWire>,
    }
    let mut wire_payments = Vec::with_capacity(payments.len());
    for (voter, p, amount) in payments {
        wire_payments.push(PaymentWire {
            voter: *voter,
            project: election.project(*p).id.clone(),
            amount: to_pair(amount)?,
        });
    }
    let wire = OutcomeWire {
        outcome: outcome
            .iter()
            .map(|&p| election.project(p).id.clone())
            .collect(),
        total_cost: to_pair(&election.total_cost(outcome))?,
        payments: wire_payments,
    };
    Ok(serde_json::to_string_pretty(&wire)?)
}
