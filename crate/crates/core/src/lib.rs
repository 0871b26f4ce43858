//! Exact well-distribution decisions, Følner-box multiple ergodic averages
//! and recurrence scans for unipotent affine maps on `Z_q × T^d`.

#![allow(clippy::needless_range_loop)]

pub mod equid;
pub mod ergodic_avg;
pub mod error;
pub mod exactnum;
pub mod folner;
pub mod kronecker;
pub mod lattice;
pub mod numeric;
pub mod observable;
pub mod par;
pub mod polyring;
pub mod quadrature;
pub mod reclab;
pub mod torus;

pub use error::{Error, Result};
pub use exactnum::{eval_numeric, ExactScalar, GeneratorRegistry};
pub use folner::{BoxRule, FolnerBox, Region};
pub use observable::{BoxIndicator, Character, Observable, TrigPoly};
pub use par::Exec;
pub use polyring::{binomial_poly, rational_independence, ExactPolynomial, Independence, IntPolynomial, Monomial};
pub use torus::{closed_form_iterate, ergodicity_period, orbit_polynomial, AffineSystem, IntMatrix, OrbitPolynomial, Point};
pub use equid::{decide_well_distribution, Decision, JointOrbit, Verdict};
pub use ergodic_avg::{multiple_average, uniformity_diagnostic, uniformity_seminorm_estimate, AverageFactor};
pub use kronecker::{ekrat_estimate, kronecker_projection, project_p, AffineNilsequence};
pub use reclab::{intersection_measure, recurrence_scan, DensityReport, RecurrenceConfig};
