//! Groundness analysis for a small Prolog subset, with a monomorphic
//! `{g, u}` domain and a polymorphic domain over mode parameters.

pub mod absub;
pub mod corpus;
pub mod deps;
pub mod engine;
pub mod mono;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod syntax;
pub mod unify;
