pub mod interval;
pub mod gfun;
pub mod zeta;
pub mod verifier;
pub mod theorem;
pub mod repro;
pub mod job;
pub mod report;
pub mod run;
