//! Exact computations with ample groupoids presented by compact open
//! bisections.

pub mod error;
pub mod grpd;
pub mod io;
pub mod lp;
pub mod orbitlat;
pub mod paradox;
pub mod par;
pub mod search;
pub mod starconv;
pub mod states;
pub mod stone;
pub mod typesg;

pub use error::{Error, Result};
