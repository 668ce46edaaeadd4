//! A workbench for CCS with communicating transactions: process terms,
//! configuration transition systems, bounded bisimulation checking and
//! model checking for three history-aware modal logics.

pub mod bisim;
pub mod cli;
pub mod gen;
pub mod history;
pub mod lex;
pub mod library;
pub mod logic;
pub mod lts;
pub mod reduction;
pub mod repro;
pub mod syntax;
