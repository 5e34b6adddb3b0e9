//! Quadratic and utilization-based schedulability bounds for fixed-priority
//! sporadic tasks, built on the k-point last-release test, together with the
//! exact oracles and the workload generator used to check them.
//!
//! Module map:
//!
//! * [`task`]: tasks, task sets, priority assignment.
//! * [`k2q`]: the generic k-point machinery on abstract coefficients.
//! * [`uniproc`]: uniprocessor tests and response-time bounds.
//! * [`multiproc`]: global RM and DM tests.
//! * [`oracles`]: exact analyses, LP enumeration, permutation brute force
//!   and a global fixed-priority simulator.
//! * [`workload`]: random task sets.

pub mod error;
pub mod k2q;
pub mod multiproc;
pub mod oracles;
pub mod task;
pub mod uniproc;
pub mod verdict;
pub mod workload;

pub use error::{Error, Result};
pub use task::{parse_taskset, PriorityPolicy, Task, TaskSet};
pub use verdict::{Condition, ResponseBound, Status, Verdict};
