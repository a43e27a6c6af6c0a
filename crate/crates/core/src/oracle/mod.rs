//! Brute-force fixpoint semantics over finite fragments of the Herbrand
//! base, used as an independent check on the engines and the transformation.

mod fragment;
mod lemmas;
mod proofs;
mod rterm;
mod tp;

pub use fragment::{
    build_fragment, finite_terms, rational_terms, signature, AtomSet, GAtom, GroundFragment, OracleError, DEFAULT_CAP,
    RESERVED_CONSTANT,
};
pub use lemmas::{
    check_lemmas_in, check_transform_lemmas, LemmaError, LemmaReport, Production, ProofGrammar, ANY_PROOF,
};
pub use proofs::{ground_goal, proof_atoms, ProofError};
pub use rterm::RTerm;
pub use tp::{
    ground_instance_of, tp_down, tp_down_with, tp_step, tp_step_with, tp_up, tp_up_with, Direction, FixpointTrace,
};
