//! Battery cycling simulation and degradation-aware charging optimization.
//!
//! The crate couples a full-order electrochemical truth model (`dfn`) with a
//! reduced-order predictor (`spm`), a per-cycle capacity-fade law
//! (`degradation`), and a CCCV charge protocol (`protocol`). On top of the
//! physics sits a cycle-level reinforcement-learning environment (`env`), a
//! small dense network with reverse-mode gradients (`nnet`), a PPO trainer
//! (`ppo`), and a three-framework evaluation harness (`bench`).

pub mod degradation;
pub mod error;
pub mod linalg;
pub mod params;
pub mod spm;

pub use error::{Electrode, SimError};
pub use params::{load_params, parse_params, CellParams, ParamsError};
