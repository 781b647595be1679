//! Command-line and HTTP front ends for `analogy-core`.
//!
//! Both front ends resolve parameters through [`params`] and answer through
//! [`service::Service`], so a CLI invocation and an HTTP request with the same
//! settings produce the same JSON apart from `timing_ms`.

pub mod cli;
pub mod error;
pub mod params;
pub mod render;
pub mod server;
pub mod service;

pub use error::ApiError;
pub use service::{Model, QueryResponse, Service};
