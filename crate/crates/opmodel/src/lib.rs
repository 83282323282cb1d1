//! Finite-dimensional toolkit for convex-operational statistical models.
//!
//! A statistical model pairs a convex set of states with the affine
//! functionals (effects) that read probabilities off them.  This crate builds
//! the two concrete families side by side — quantum models on complex
//! Hilbert spaces of dimension d ≤ 16 and classical models on finite outcome
//! sets — together with the machinery that moves between them:
//!
//! * [`operators`]: dense complex matrices, a Jacobi eigensolver, density
//!   operators, effects, POVMs, and the trace pairing;
//! * [`qubit_cayley`]: the Bloch/Cayley coordinate picture of the qubit with
//!   its ball of states and diamond of effects;
//! * [`cmodel`]: simplex states, hypercube effects, Markov kernels, and sharp
//!   versus fuzzy random variables;
//! * [`maps`]: affine state maps, their dual effect maps, and machine-checked
//!   verdicts for when an embedding or extension preserves the full effect
//!   supply (linear-programming feasibility with certificates);
//! * [`canonical`]: the canonical classical extension of a quantum model over
//!   a pure-state mesh — atomic measures, lifted effects, kernels, and a
//!   CHSH correlation demo carried out entirely in classical language;
//! * [`valuations`]: additive effect valuations and reconstruction of the
//!   underlying density operator;
//! * [`wigner`]: discretized Wigner quasi-probability tables with marginal
//!   and negativity checks.

pub mod canonical;
pub mod cmodel;
pub mod maps;
pub mod operators;
pub mod qubit_cayley;
pub mod sampling;
pub mod valuations;
pub mod wigner;

pub(crate) mod lp;
pub(crate) mod realmat;
