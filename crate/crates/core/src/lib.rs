pub mod compiler;
pub mod formula;
pub mod lattice;
pub mod reduction;
pub mod solver;
pub mod harness;
