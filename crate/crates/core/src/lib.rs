pub mod classify;
pub mod compile;
pub mod logic;
pub mod numeric;
pub mod pddl;
pub mod sexpr;
pub mod validate;
