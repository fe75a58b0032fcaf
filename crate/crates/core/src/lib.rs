//! Weighted polynomial, Sobolev polynomial, rational, and Sobolev rational
//! least-squares fitting by (rational) Arnoldi orthogonalization of the
//! underlying Krylov matrix, plus direct-solve baselines for comparison.

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod jordan;
pub mod krylov;
pub mod linalg;
pub mod nodes;
pub mod poly;
pub mod rational;
pub mod report;
pub mod sobolev_poly;
pub mod sobolev_rational;

pub use baselines::{
    build_basis_matrix, direct_fit_eval, displacement_residual, BasisKind, DirectFit, Displacement, ExplicitBasisMatrix,
};
pub use dataset::{load_dataset, save_dataset};
pub use error::{Error, Result};
pub use experiment::{
    preset, run_experiment, ErrorReport, ExperimentConfig, ExperimentKind, ReportRow, RowFlag, Target,
};
pub use jordan::{build_jordan, JordanOperator};
pub use krylov::{FitModel, ProblemKind, Recurrence, RecurrenceSign};
pub use linalg::{
    numerical_rank, orthogonalize_next, project_rhs, solve_dense_ls, solve_dense_ls_flagged, DenseMatrix, DenseVector,
    Hessenberg, OrthoBasis, Orthogonalized,
};
pub use nodes::{
    chebyshev_first_kind, clustered_nodes, clustered_nodes_with, conjugate_pair_poles, conjugate_pair_poles_ordered,
    legendre_gauss, tapered_real_poles, Interval, NodeSet, PairOrdering, PoleSchedule, RatioPoint,
};
pub use poly::{eval_poly, fit_poly, PolyFitModel};
pub use rational::{eval_rational, fit_rational, RationalFitModel};
pub use report::{emit_report, render_report, ReportFormat};
pub use sobolev_poly::{eval_sobolev_poly, fit_sobolev_poly, SobolevPolyFitModel};
pub use sobolev_rational::{eval_sobolev_rational, fit_sobolev_rational, SobolevRationalFitModel};
