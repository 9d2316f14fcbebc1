pub mod amp_init;
pub mod bv_advect;
pub mod cli;
mod decimal;
pub mod exact_delta;
pub mod func_synth;
pub mod lbm;
pub mod qsim;
pub mod readout;
