//! Analytical and Monte-Carlo models of information exchange in dense wireless
//! sensor networks with wireless energy harvesting.

pub mod analytic;
pub mod extended;
pub mod model;
pub mod sim;
pub mod specfun;

pub use analytic::{report, AnalyticError, AnalyticReport};
pub use model::{NetworkConfig, RectennaModel, Role, Scenario};
