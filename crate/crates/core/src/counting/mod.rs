//! Exact enumeration engines.

pub mod close;
pub mod gamma;
pub mod parallelepiped;
pub mod zrange;

pub use close::count_close_rationals;
pub use gamma::{
    count_gamma, count_on_curve, enumerate_solutions, threshold, CountQuery, CountReport, Region, Strategy,
    TangentExcluder,
};
pub use parallelepiped::count_parallelepiped;
pub use zrange::{solve_z_range, sublevel_intervals};
