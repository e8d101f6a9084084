//! Chu spaces, question-indexed probabilistic coalgebras, bisimulation, and
//! a finite-dimensional quantum model built on top of them.

pub mod bisim;
pub mod chu;
pub mod coalgebra;
pub mod indexed;
pub mod quantum;
pub mod value;
pub mod doc;
pub mod unfold;
pub mod oracle;
pub mod random;
pub mod verify;
