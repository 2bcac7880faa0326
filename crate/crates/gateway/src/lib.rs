//! The deployable surface of the parking system.
//!
//! [`service::Service`] is the single writer over a [`parkcore::ParkState`]:
//! every accepted event is appended to a JSON-lines log before it takes
//! effect, and restarting replays that log (from a snapshot when one exists).
//! [`api::router`] exposes the service over HTTP/JSON, [`pipeline`] wraps the
//! vision crates for the command line, and [`simulate`] drives a server with
//! scripted gate traffic.

pub mod api;
pub mod config;
pub mod eventlog;
pub mod pipeline;
pub mod server;
pub mod service;
pub mod simulate;

pub use config::Config;
pub use eventlog::{EventLog, EventRecord, Snapshot, StoreError};
pub use service::{Service, SubmitError, UnmatchedReading};
