//! Hamiltonian cycles in the Cayley graphs of the imprimitive complex
//! reflection groups G(de,e,n) with respect to their standard generating
//! reflections.
//!
//! ```
//! use hamcycle::{build_hamiltonian, verify_hamiltonian, GroupParams};
//!
//! let params = GroupParams::new(3, 2, 3).unwrap();
//! let cycle = build_hamiltonian(&params).unwrap();
//! let report = verify_hamiltonian(&params, &cycle.start(), &cycle.word).unwrap();
//! assert!(report.valid);
//! assert_eq!(cycle.word.len() as u64, params.order());
//! ```

pub mod bitset;
pub mod cli;
pub mod construct;
pub mod error;
pub mod group;
pub mod verify;
pub mod words;

pub use construct::{build_hamiltonian, CosetId, HamCycle, Provenance};
pub use error::{ConstructError, GroupError, JoinError, PathError};
pub use group::{EdgeLabel, Element, Family, Generator, GroupParams};
pub use verify::{brute_force_cycle, verify_hamiltonian, BruteOutcome, CycleReport};
pub use words::Word;
