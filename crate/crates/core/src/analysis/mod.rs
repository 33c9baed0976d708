//! Decision procedures and Lyapunov exponents.

mod decide;
mod lyapunov;

pub use decide::{
    find_orphan, inverse, is_injective, is_left_inverse, is_surjective, preimage_counts, Certificate,
    DecisionResult, SoficConstraint, Verdict,
};
pub use lyapunov::{
    avg_lambda_bruteforce, avg_lambda_sample, front_speed, lambda_bar_finite, lambda_finite, lambda_finite_with,
    max_lambda_finite, Direction, FrontTrace, LambdaMethod, DEFAULT_CAP,
};
