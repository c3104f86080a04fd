//! Multi-polarization superposition beamforming over OFDM.
//!
//! One data stream is sent on two orthogonally polarized (-45 / +45 degree)
//! beams with a power split `(alpha, 1 - alpha)`. Choosing the split from the
//! channel's cross-polarization statistics steers the received polarization
//! toward the user's antenna. This crate provides:
//!
//! * [`channel`]: dual-polarized frequency-selective channels and their CSV form
//! * [`psi`]: statistical XPD/XPR estimation and the XPD of the superposition
//! * [`allocation`]: the closed-form power split and a grid-search oracle
//! * [`ellipse`]: rotation, eccentricity and received power of the polarization ellipse
//! * [`assign`]: gain screening plus XPD-matched subcarrier selection
//! * [`link`]: Monte-Carlo QPSK symbol error rate
//! * [`feedback`]: closed-loop fine tuning of the transmit polarization angle
//! * [`sweep`]: pooled multi-realization SER sweeps across power splits

pub mod allocation;
pub mod assign;
pub mod channel;
pub mod ellipse;
pub mod error;
pub mod feedback;
pub mod link;
pub mod polmath;
pub mod psi;
pub mod seeding;
pub mod sweep;

pub use allocation::{allocate, alpha_hat, brute_force_alpha, PowerSplit};
pub use assign::{plan_transmission, plan_with_mode, AlphaMode, AssignConfig, TransmissionPlan};
pub use channel::{
    generate_statistical_channel, load_channel, save_channel, ChannelGenConfig, PolarizedChannel,
};
pub use ellipse::{EllipseParams, EllipseQuery};
pub use error::{ChannelFileError, Error, Result};
pub use feedback::{run_feedback_loop, FeedbackConfig, FeedbackTrace};
pub use link::{run_ser_curve, LinkConfig, SerCurve};
pub use polmath::{AngleDeg, Ratio};
pub use psi::{estimate_psi, xpd_mps, PsiStats};
pub use sweep::{run_ser_sweep, AlphaChoice, ChannelSource, SweepBlock, SweepSpec};
