//! Configuration, scenarios, file formats, reference solvers and the
//! verification suites around `swlw-core`.

pub mod config;
pub mod mms;
pub mod oracle;
pub mod output;
pub mod scenario;
pub mod snapshot;
pub mod verify;
