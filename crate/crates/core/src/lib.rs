//! Fully unitary measurement on labeled qubit registers.
//!
//! A signal `s` is measured by an observer `o` using only local unitaries:
//! the CNOT-type *imprint* and the *swap*. Without help the observer's prior
//! state and the environment's state leak into the record. A GHZ-correlated
//! environment `Σ_k χ_k |k…k⟩` lets the observer correct for this, and each
//! corrected measurement moves one unit of correlation from the environment
//! to the new signal–observer pair.
//!
//! Modules, bottom up:
//!
//! - [`statevec`]: registers, dense pure states, branch expansions
//! - [`gates`]: imprint, inverse imprint, swap, basis rotation, scripts
//! - [`protocol`]: uncorrected, corrected and ideal measurements, and the
//!   multi-observer scenarios
//! - [`analysis`]: GHZ cluster detection, correlation ledger, observer
//!   agreement, record recovery
//! - [`oracle`]: dense Kronecker-product reference used to cross-check the
//!   kernels
//! - [`scenario`] and [`report`]: the JSON scenario format and the
//!   deterministic reports printed by the `unimeas` binary
//!
//! ```
//! use unimeas::prelude::*;
//!
//! let reg = Register::new(["s", "o", "e"]).unwrap();
//! let start = product_state(reg, &[(re(0.6), re(0.8)), (re(1.0), re(1.0)), (re(1.0), re(0.0))]).unwrap();
//! let out = uncorrected_measure(&start, "s", "o", "e").unwrap();
//! // The environment now holds the observer's old state; s and o agree.
//! let report = agreement(&out.branches(), &[("s", "o")]).unwrap();
//! assert!((report.aggregate[0] - 1.0).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod error;
pub mod gates;
mod kernel;
pub mod oracle;
pub mod protocol;
pub mod report;
pub mod scenario;
pub mod statevec;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{
        agreement, cluster_measure, find_clusters, ghz_factor, ledger_record, recover_record,
        AgreementReport, ClusterDecomposition, CorrelationCluster, CorrelationLedger,
        RecordInference, DEFAULT_TOLERANCE,
    };
    pub use crate::error::{Error, Result};
    pub use crate::gates::{
        apply_script, apply_single, imprint, inverse_imprint, invert_script, rotate_basis, swap,
        GateOp,
    };
    pub use crate::protocol::{
        corrected_measure, ideal_measure, run_scenario_appendix, run_scenario_different_basis,
        sequential_ideal_measurements, uncorrected_measure, MeasurementSpec,
    };
    pub use crate::statevec::{
        approx_eq, branch_decompose, make_ghz, max_deviation, product_state, re, tensor, Amplitude,
        Basis, BasisChoice, BranchSet, Label, PureState, Register, Symbol,
    };
}
