//! Convex test functions behind a counting subgradient oracle, together with their
//! Hölder-smoothness metadata.

mod functions;
mod holder;
mod io;
mod oracle;

pub use functions::{
    holder_spec_of_lp, make_abs_oracle, make_lp_oracle, make_qp_oracle, qp_minimizer,
    qp_prox_closed_form, AbsNorm, LpRegression, LpRegressionInstance, Quadratic, QpInstance,
};
pub use holder::{HolderComponent, HolderSpec};
pub use io::{read_instance, write_instance, Instance, InstanceFile};
pub use oracle::{ConvexFunction, Evaluation, SubgradientOracle};
