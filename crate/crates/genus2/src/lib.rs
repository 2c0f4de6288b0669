pub mod counting;
pub mod curve;
pub mod data;
pub mod finitefield;
pub mod hecke;
pub mod invariants;
pub mod jacobian;
pub mod matching;
pub mod poly;
pub mod qfield;
pub mod surfaces;
