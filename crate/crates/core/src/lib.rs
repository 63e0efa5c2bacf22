//! Answer-similarity evaluation toolkit.
//!
//! Lexical metrics ([`lexmetrics`]), embedding metrics ([`embmetrics`]) fed by
//! file or HTTP [`providers`], rank correlation against human labels
//! ([`rankstats`]) over F1-partitioned datasets ([`corpus`]), augmentation
//! data generation ([`datagen`]) and end-to-end evaluation runs ([`report`]).

pub mod corpus;
pub mod datagen;
pub mod embmetrics;
pub mod lexmetrics;
pub mod providers;
pub mod rankstats;
pub mod report;
