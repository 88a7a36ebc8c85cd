//! Finite-volume solver for transport equations driven by a convex
//! combination of fractional material derivatives,
//!
//! ```text
//! p (d/dt - d/dx)^alpha u + (1 - p) (d/dt + d/dx)^alpha u = f,
//! ```
//!
//! together with the closed-form Lévy-walk densities and an independent
//! Fourier–Laplace oracle for the Duhamel kernel.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod coeffs;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod history;
pub mod io;
pub mod kernel;
pub mod mesh;
pub mod operators;
pub mod params;
pub mod quadrature;
pub mod scheme;
pub mod sources;
pub mod special;

pub use analytic::{monomial_solution, pdf_at, phi, profile_cell_average, ProfileKind, SimilarityProfile};
pub use coeffs::{make_coefficients, CoefficientTable};
pub use diagnostics::{convergence_rows, discrete_norm, error_against_oracle, estimate_order, ConvergenceRow, ErrorReport, NormKind, OrderFit, Restriction};
pub use error::{Error, Result};
pub use history::SolutionHistory;
pub use kernel::{eval_g1, kernel_mass, ContourSpec, KernelProfile, KernelQuery, PValue};
pub use mesh::GridSpec;
pub use operators::{combined_operator, discrete_material_derivative, DiscreteOperator, OperatorSign, ReadMode};
pub use params::{stability_mesh_bound, SolverParams};
pub use scheme::{delta_initial, mass_series, solve, solve_naive, step, step_naive, SchemeVariant, SolveConfig};
pub use sources::{discretize_delta, source_values, validate_source_mass, DeltaSpec, SampledSource, SourceKind, SourceTerm};
pub use special::gamma_fn;
