//! Command-line front end for the `affhecke` library: the element and
//! construction-word grammars, and the regression-corpus runner.
//!
//! Exit-code contract shared by every subcommand: 0 on success, 1 when a
//! verified identity fails (a mismatch, not a bug), 2 on usage or syntax
//! errors, 3 when a bounded search gives up (enlarge `--ball` or the
//! relevant budget).

use affhecke::affweyl::{AffWeylError, BraidParseError};
use affhecke::bimod::BimodError;
use affhecke::decat::DecatError;
use affhecke::hecke::HeckeError;
use affhecke::homotopy::HomotopyError;
use thiserror::Error;

pub mod corpus;
pub mod grammar;

#[derive(Error, Debug)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] grammar::ParseError),
    #[error(transparent)]
    BraidParse(#[from] BraidParseError),
    #[error(transparent)]
    Weyl(#[from] AffWeylError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Bimod(#[from] BimodError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error(transparent)]
    Decat(#[from] DecatError),
    #[error("{0}")]
    Usage(String),
    #[error("corpus line {line}: {source}")]
    Record {
        line: usize,
        #[source]
        source: Box<CliError>,
    },
}

fn weyl_code(e: &AffWeylError) -> i32 {
    match e {
        AffWeylError::NormalFormNotReached { .. } | AffWeylError::NoWitnessWithinBound { .. } => 3,
        _ => 2,
    }
}

fn bimod_code(e: &BimodError) -> i32 {
    match e {
        BimodError::CandidatesExhausted { .. } => 3,
        BimodError::Word(w) => weyl_code(w),
        _ => 2,
    }
}

fn homotopy_code(e: &HomotopyError) -> i32 {
    match e {
        HomotopyError::Bimod(b) => bimod_code(b),
        HomotopyError::Word(w) => weyl_code(w),
        _ => 2,
    }
}

impl CliError {
    /// 2 for usage and syntax problems, 3 when a bounded search ran out of
    /// room (the caller can retry with a bigger ball or budget).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Record { source, .. } => source.exit_code(),
            CliError::Weyl(e) => weyl_code(e),
            CliError::Bimod(e) => bimod_code(e),
            CliError::Homotopy(e) => homotopy_code(e),
            CliError::Decat(DecatError::Bimod(e)) => bimod_code(e),
            CliError::Decat(DecatError::Word(e)) => weyl_code(e),
            CliError::Decat(DecatError::Complex(e)) => homotopy_code(e),
            _ => 2,
        }
    }
}
