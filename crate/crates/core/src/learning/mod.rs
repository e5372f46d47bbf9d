//! Exact finite enumeration of the quantum learning framework: data
//! states, extractor measurements, post-measurement and hypothesis states,
//! losses, and the generalization error.

pub mod cert;
pub mod fixtures;
pub mod induced;
pub mod instance;
pub mod json;

pub use cert::{audit_certificates, resolved_cert, scalar_loss_tables, ScalarLossTables};
pub use fixtures::{
    classical_embedding_instance, embedding_loss_table, independent_instance, random_iid_pair_instance,
    random_instance, RandomInstanceConfig,
};
pub use induced::{
    empirical_loss, expected_gen, expected_gen_old, expected_losses, gen_error, gen_error_old,
    induce, sample_ws, true_loss_new, true_loss_old, ExpectedLosses, InducedJoint, PairRecord,
};
pub use instance::{
    pair_key, product_te_hyp, sample_key, LearningInstance, LearningMode, SampleTuple,
};
pub use json::{instance_from_json, instance_to_json};
