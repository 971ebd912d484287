pub mod duality;
pub mod calculus;
pub mod error;
pub mod rat;
pub mod ratlp;
pub mod functions;
pub mod generate;
pub mod graphs_orders;
pub mod interiors;
pub mod par;
pub mod separation;
pub mod seqlab;
pub mod sets;
pub mod suite;

pub use error::{Error, Result};
pub use rat::{Matrix, Rat, Vector};
