//! Adaptive equal-shares participatory budgeting: exact-arithmetic
//! elections, stability checking with certificates, a greedy local search
//! over equal-shares solutions, and budget-completion strategies.

pub mod adaptive;
pub mod ejr;
pub mod election;
pub mod experiment;
pub mod mes;
pub mod pabulib;
pub mod rational;
pub mod search;
pub mod serialize;
pub mod solution;
pub mod stability;

pub mod testkit;
