//! Pointwise evaluation of S^m_{α,t}, S^m_{1,t}, M^m_t and their maximal
//! functions through the ring profile.

pub mod average;
pub(crate) mod interp;
pub mod maximal;
pub mod profile;
pub(crate) mod shell;

pub use average::{alpha_average, alpha_rule, hl_average, spherical_average, Averager, Operator, RadialPanels};
pub use maximal::{default_t_max, maximal, MaximalResult, Maximizer, TGrid};
pub use profile::{ring_profile, ProfileOptions, RingProfile};
pub use shell::ball_shell_fraction;
