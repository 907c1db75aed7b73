//! Finite-dimensional bosonic Hilbert-space kernel: registers, ladder
//! operators, operator algebra, state application, partial trace, and the
//! spectral quantities built on reduced states.

mod density;
mod operator;
mod register;
mod serial;
mod sparse;
mod state;

pub use density::DensityMatrix;
pub use operator::{
    annihilation, creation, interior_mask, number, total_quanta_mask, FockOperator,
};
pub use register::ModeRegister;
pub use state::{apply_exp_series, ExpSeries, PureState, EXP_SERIES_MAX_TERMS};
