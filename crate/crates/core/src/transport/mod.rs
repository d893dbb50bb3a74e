//! Wave-packet spreading: lattice time averages, outside probabilities,
//! exponent fits and transfer-matrix bounds.

pub mod ballistic;
pub mod bounds;
pub mod dt;
pub mod evolve;
pub mod fit;
pub mod lattice;

pub use ballistic::{approximant_prefix_agreement, ballistic_demo, BallisticDemo, BallisticOptions};
pub use bounds::{closed_form_bounds, ClosedFormBounds};
pub use dt::{dt_decay_slope, dt_upper_bound_integral, scale_for_time, DtBoundEvaluation, DtOptions, ScaleChoice};
pub use evolve::{average_from_eigensystem, evolve_and_average, HorizonPolicy, TransportRun};
pub use fit::{alpha_grid, exponent_fit, linear_fit, noise_floor, AlphaFit, ExponentFit, FitOptions, LinearFit};
pub use lattice::{tridiagonal_eigen, Eigensystem, LatticeHamiltonian};

use crate::spectrum::SpectrumError;
use crate::trace::potential::PotentialError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("times must be finite and positive")]
    BadTimes,
    #[error("lattice half-width {l} is below the required {needed} for T = {t_max}")]
    HorizonViolated { l: usize, needed: usize, t_max: f64 },
    #[error("unitarity defect {defect:e} exceeds tolerance")]
    Unitarity { defect: f64 },
    #[error("boundary mass {mass:e} within {width} sites exceeds {max_mass:e} at T = {t}")]
    BoundaryMass { t: f64, mass: f64, width: usize, max_mass: f64 },
    #[error("usable times span {decades:.2} decades, {required} required")]
    InsufficientDecades { decades: f64, required: f64 },
    #[error("T = {t} needs level {needed_level}; largest feasible T is {largest_feasible_t:e}")]
    ScaleOverflow { t: f64, needed_level: usize, largest_feasible_t: f64 },
    #[error("T = {t} needs {points} grid points, budget is {max}")]
    GridBudget { t: f64, points: usize, max: usize },
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("lattice half-width {l} exceeds the agreement window {window}")]
    WindowViolated { l: usize, window: usize },
}
