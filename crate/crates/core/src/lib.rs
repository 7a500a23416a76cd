pub mod corpus;
pub mod exact;
pub mod group;
pub mod poly;
pub mod invariants;
pub mod solve;
pub mod strata;
pub mod quasilinear;
pub mod quasiiso;
pub mod lifting;
pub mod cli;
