//! Coupled-cavity chains: composition, dense reference solve, doublet
//! analysis and the coupling-mirror design equations.

mod chain;
mod design;
mod doublet;
mod oracle;

pub use chain::{reflection_rho23, CavityChain, ChainFields};
pub use design::{
    coupling_transmission_equal_lengths, coupling_transmission_ideal, solve_coupling_transmission,
    splitting_limit,
};
pub use doublet::{
    chain_power_response, doublet_response, find_doublet_peaks, DoubletObservable, DoubletResult,
};
pub use oracle::{network_oracle, network_oracle_driven, OracleFields};
