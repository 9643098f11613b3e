pub mod ad;
pub mod clustering;
pub mod decompose;
pub mod error;
pub mod io;
pub mod lstm;
pub mod optim;
pub mod pipeline;
pub mod sarima;
pub mod series;
pub mod synth;
pub mod util;

pub use error::{Error, ParseIssue, Result};
