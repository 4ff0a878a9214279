pub mod cli;
pub mod mappings;
pub mod pg_io;
pub mod pg_model;
pub mod rdf_model;
pub mod transforms;
pub mod turtlestar_io;
pub mod vocab;

#[cfg(test)]
mod fixtures;
