//! Reader and writer for the Pabulib .pb text format: three
//! semicolon-delimited sections (META, PROJECTS, VOTES), each keyword on
//! its own line followed by a header row.

use crate::election::{Election, ElectionError};
use crate::rational::{display, parse_decimal, Ratio};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PabulibError {
    #[error("missing section {0}")]
    MissingSection(&'static str),
    #[error("unsupported vote type {0:?}")]
    UnsupportedVoteType(String),
    #[error("malformed row at line {0}")]
    MalformedRow(usize),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error(transparent)]
    Election(#[from] ElectionError),
}

/// A parsed file: the election plus everything the model does not
/// interpret, preserved for round-tripping.
#[derive(Debug, Clone)]
pub struct PabulibFile {
    pub election: Election,
    /// META key/value pairs verbatim.
    pub metadata: BTreeMap<String, String>,
    /// Uninterpreted per-project columns: project id -> (column, value).
    pub project_extras: BTreeMap<String, Vec<(String, String)>>,
    /// Voter ids in ballot order.
    pub voter_ids: Vec<String>,
}

enum Section {
    Meta,
    Projects,
    Votes,
}

pub fn parse_pabulib(text: &str) -> Result<PabulibFile, PabulibError> {
    let mut metadata = BTreeMap::new();
    let mut projects: Vec<(String, Ratio)> = Vec::new();
    let mut project_extras = BTreeMap::new();
    let mut voter_ids: Vec<String> = Vec::new();
    let mut ballots: Vec<Vec<String>> = Vec::new();

    let mut section: Option<Section> = None;
    let mut header: Option<Vec<String>> = None;
    let mut seen = (false, false, false);

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        match line.trim() {
            "META" => {
                section = Some(Section::Meta);
                seen.0 = true;
                header = None;
                continue;
            }
            "PROJECTS" => {
                section = Some(Section::Projects);
                seen.1 = true;
                header = None;
                continue;
            }
            "VOTES" => {
                section = Some(Section::Votes);
                seen.2 = true;
                header = None;
                continue;
            }
            _ => {}
        }
        let fields: Vec<&str> = line.split(';').collect();
        let Some(section) = &section else {
            return Err(PabulibError::MalformedRow(lineno));
        };
        let Some(cols) = &header else {
            header = Some(fields.iter().map(|s| s.trim().to_string()).collect());
            continue;
        };
        if fields.len() != cols.len() {
            return Err(PabulibError::MalformedRow(lineno));
        }
        let row: BTreeMap<&str, &str> = cols
            .iter()
            .map(String::as_str)
            .zip(fields.iter().map(|s| s.trim()))
            .collect();
        match section {
            Section::Meta => {
                let key = row.get("key").ok_or(PabulibError::MalformedRow(lineno))?;
                let value = row.get("value").ok_or(PabulibError::MalformedRow(lineno))?;
                metadata.insert(key.to_string(), value.to_string());
            }
            Section::Projects => {
                let id = row
                    .get("project_id")
                    .ok_or(PabulibError::MalformedRow(lineno))?
                    .to_string();
                let cost = row.get("cost").ok_or(PabulibError::MalformedRow(lineno))?;
                let cost = parse_decimal(cost).map_err(|_| PabulibError::MalformedRow(lineno))?;
                if projects.iter().any(|(pid, _)| pid == &id) {
                    return Err(PabulibError::DuplicateId(id));
                }
                let extras: Vec<(String, String)> = cols
                    .iter()
                    .filter(|c| c.as_str() != "project_id" && c.as_str() != "cost")
                    .map(|c| (c.clone(), row[c.as_str()].to_string()))
                    .collect();
                project_extras.insert(id.clone(), extras);
                projects.push((id, cost));
            }
            Section::Votes => {
                let id = row
                    .get("voter_id")
                    .ok_or(PabulibError::MalformedRow(lineno))?
                    .to_string();
                let vote = row.get("vote").ok_or(PabulibError::MalformedRow(lineno))?;
                if voter_ids.contains(&id) {
                    return Err(PabulibError::DuplicateId(id));
                }
                let ballot: Vec<String> = vote
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect();
                voter_ids.push(id);
                ballots.push(ballot);
            }
        }
    }

    if !seen.0 {
        return Err(PabulibError::MissingSection("META"));
    }
    if !seen.1 {
        return Err(PabulibError::MissingSection("PROJECTS"));
    }
    if !seen.2 {
        return Err(PabulibError::MissingSection("VOTES"));
    }
    match metadata.get("vote_type").map(String::as_str) {
        Some("approval") => {}
        Some(other) => return Err(PabulibError::UnsupportedVoteType(other.to_string())),
        None => return Err(PabulibError::UnsupportedVoteType("missing".to_string())),
    }
    let budget = metadata
        .get("budget")
        .ok_or(PabulibError::MissingSection("META budget"))?;
    let budget =
        parse_decimal(budget).map_err(|_| PabulibError::UnsupportedVoteType(budget.clone()))?;

    let election = Election::new(projects, ballots, budget)?;
    Ok(PabulibFile {
        election,
        metadata,
        project_extras,
        voter_ids,
    })
}

/// Writes the file back out; `parse_pabulib(serialize(f))` yields the
/// same election.
pub fn serialize_pabulib(file: &PabulibFile) -> String {
    let mut out = String::new();
    out.push_str("META\nkey;value\n");
    let mut metadata = file.metadata.clone();
    metadata.insert("vote_type".into(), "approval".into());
    metadata.insert("budget".into(), display(file.election.budget()));
    metadata.insert(
        "num_projects".into(),
        file.election.num_projects().to_string(),
    );
    metadata.insert("num_votes".into(), file.election.num_voters().to_string());
    for (k, v) in &metadata {
        out.push_str(&format!("{k};{v}\n"));
    }
    out.push_str("PROJECTS\nproject_id;cost\n");
    for p in file.election.projects() {
        out.push_str(&format!("{};{}\n", p.id, display(&p.cost)));
    }
    out.push_str("VOTES\nvoter_id;vote\n");
    for (i, vid) in file.voter_ids.iter().enumerate() {
        let ballot: Vec<&str> = file
            .election
            .ballot(i)
            .iter()
            .map(|&p| file.election.project(p).id.as_str())
            .collect();
        out.push_str(&format!("{};{}\n", vid, ballot.join(",")));
    }
    out
}
