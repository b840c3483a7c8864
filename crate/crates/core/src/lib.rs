//! Reference resolution over reference domains.
//!
//! A referring expression is not linked to an antecedent: it selects a
//! domain in the context (discourse, perception or general knowledge) and
//! restructures it so that its referent becomes the profiled member.

pub mod cli;
pub mod domain;
pub mod engine;
pub mod error;
pub mod gold;
pub mod kb;
pub mod lexicon;
pub mod parser;
pub mod scene;
pub mod trace;

pub use domain::{Cardinality, ContextModel, Criterion, DomainId, ReferenceDomain};
pub use engine::{EngineOptions, Resolution, Session, Verdict};
pub use error::{Error, Result};
pub use kb::{load_kb, KnowledgeBase};
