pub mod classical;
pub mod concat;
pub mod earac;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod qcrac;
pub mod qudit;
pub mod reference;
pub mod scenario;
pub mod sdp;
pub mod seesaw;
pub mod tolerance;
