//! Experiment runner behind the `fracwalk` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or unusable paths; exit code 1.
    #[error("config error: {0}")]
    Config(String),
    /// Non-finite values or non-converged quadrature; exit code 2.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<fracwalk::Error> for CliError {
    fn from(e: fracwalk::Error) -> Self {
        use fracwalk::Error as E;
        match e {
            E::NonFinite { .. }
            | E::Quadrature { .. }
            | E::KernelConvergence(_)
            | E::MissingRow { .. }
            | E::IndexOutOfMesh { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
