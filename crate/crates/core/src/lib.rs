//! Highest steady waves of the Whitham and bidirectional Whitham equations,
//! their crest asymptotics, and the integral identities behind them.

pub mod asymptotics;
pub mod kernels;
pub mod quadrature;
pub mod residual_verifier;
pub mod special_functions;
pub mod wave_solver;
