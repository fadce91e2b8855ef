//! Production-network growth accounting: Leontief inverses and Domar weights,
//! interdependent TFP dynamics, aggregate growth identities and policy
//! gradients, plus seeded Monte Carlo experiments.

pub mod dynamics;
pub mod economy;
pub mod experiments;
pub mod growth;
pub mod io;
pub mod linalg;
pub mod network;
pub mod ode;

pub use dynamics::{integrate_rates, integrate_stocks, steady_state, DynamicsError, GrowthState, Run, RunOptions, Trajectory};
pub use economy::{Economy, EconomyError, IoTable, TfpConfig, Tolerances, ValidationReport};
pub use growth::{GrowthError, GrowthReport};
pub use network::{NetworkError, NetworkStats};
