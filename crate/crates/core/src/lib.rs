pub mod cech;
pub mod corpus;
pub mod cellular;
pub mod cli;
pub mod complex;
pub mod equivariant;
pub mod error;
pub mod linalg;
pub mod space;
pub mod transition;
pub mod yoneda;

pub use error::{Error, Result};
