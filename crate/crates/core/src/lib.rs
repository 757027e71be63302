//! Sparse clustered network associative memory.
//!
//! Messages of `c` sub-messages are stored as cliques across `c` clusters of
//! `l` binary neurons; partial messages with erased clusters are completed by
//! iterative global decoding. Alongside the massively-parallel reference rule
//! the crate implements the selective rule, which reads only link rows of
//! active neurons, and a bounded variant that serializes at most `beta` reads
//! per cluster the way a RAM-based hardware decoder must, with cycle
//! accounting to match.
//!
//! ```
//! use scn::{decode, DecodeConfig, LinkStore, Message, PartialMessage, Rule};
//!
//! let mut store = LinkStore::with_size(3, 4)?;
//! let params = *store.params();
//! let msg = Message::new(&params, vec![1, 2, 3])?;
//! store.store_message(&msg)?;
//!
//! let query = PartialMessage::with_erased(&msg, &[1]);
//! let out = decode(&store, &query, &DecodeConfig::new(Rule::SdBounded { beta: 2 }, 4))?;
//! assert_eq!(out.status.retrieved(), Some(&msg));
//! assert_eq!(out.cycles, 11);
//! # Ok::<(), scn::Error>(())
//! ```
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/`
//! directory; `cargo run --example store_and_retrieve` is a good start.

pub mod bits;
pub mod decoder;
pub mod error;
pub mod experiments;
pub mod hw;
pub mod model;
pub mod persistence;

pub use bits::{NeuronSet, RowView};
pub use decoder::{
    decode, encode_output, gd_step, gd_step_bounded, gd_step_mpd, gd_step_sd, local_decode, spm_serialize,
    DecodeConfig, DecodeOutcome, DecodeStatus, ErasedPolicy, Rule,
};
pub use error::{Error, Result};
pub use experiments::{
    compare_decoders, emit_csv, erase_clusters, gen_messages, run_experiment, run_on_store, ComparisonRow,
    ExperimentResult, ExperimentSpec, ProbeMode, ResultRow,
};
pub use hw::{
    access_delay_mpd, access_delay_sd, bram_bits, capacity_bits, cycle_count, measure_beta, BetaReport, ResourceReport,
};
pub use model::{
    expected_density, ActivationState, LinkStore, Message, NetworkParams, NeuronId, PartialMessage, SubMessage,
};
pub use persistence::{load_network, load_network_file, save_network, save_network_file};
