//! On-disk formats: JSON-lines corpus and journals, CSV matrices and
//! reports, JSON model documents.

pub mod corpus;
pub mod journal;
pub mod matrix;
pub mod model;
pub mod tables;
