//! PDDL+ front end: parsing, linking and printing of domains and problems.

mod ast;
mod link;
mod parser;
pub mod print;

pub use ast::*;
pub use link::{link, LinkError, PlanningInstance, TypeHierarchy};
pub use parser::{parse_domain, parse_problem, ParseError};
