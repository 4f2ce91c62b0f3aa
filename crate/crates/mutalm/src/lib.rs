//! File formats, fill-mask HTTP client, parallel pipeline and command-line
//! driver around `mutalm-core`.

pub mod cli;
pub mod formats;
pub mod pipeline;
pub mod remote;
