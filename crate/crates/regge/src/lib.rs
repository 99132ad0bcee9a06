//! Complex angular momentum (CAM) analysis of tabulated S-matrix elements.
//!
//! The crate ingests partial-wave S-matrix tables S^J(E), continues them into the
//! complex angular momentum plane lambda = J + 1/2 by rational interpolation,
//! extracts Regge poles, zeros and residues (with Froissart-doublet filtering),
//! computes unfolded amplitudes and folded differential cross sections, splits the
//! cross section into background and per-resonance contributions, chains pole
//! trajectories across energy, and converts them into complex-energy poles and
//! lifetime/rotational observables.
//!
//! Modules mirror the processing stages:
//! - [`smatrix`]: table types, validation, CSV/JSON round-trip I/O
//! - [`pade`]: Thiele continued-fraction interpolation and pole/zero/residue extraction
//! - [`synth`]: synthetic S-matrix generator with an exact pole/residue ledger
//! - [`amplitudes`]: direct partial-wave sums, unfolded amplitudes, winding angles, folding
//! - [`resonance`]: pole tails, tail subtraction, background/resonance decompositions
//! - [`trajectories`]: trajectory chaining, linear fits, complex-energy poles, observables
//! - [`config`]: flat key-value run configuration shared by the CLI
//! - [`cli`]: subcommand implementations behind the `regge` binary

pub mod amplitudes;
pub mod cli;
pub mod config;
pub mod numerics;
pub mod pade;
pub mod resonance;
pub mod smatrix;
pub mod synth;
pub mod trajectories;

pub use num_complex::Complex64;
