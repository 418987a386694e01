pub mod continuation;
pub mod error;
pub mod flexion;
pub mod gram;
pub mod io;
pub mod linalg;
pub mod polyhedra;
pub mod quadrature;
pub mod simplex_volume;
