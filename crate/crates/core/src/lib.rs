pub mod gf;
pub mod ring;
pub(crate) mod poly;
pub mod series;
pub mod biv;
pub mod lift;
pub mod fgl;
pub mod endo;
pub mod io;
