//! Fault-tolerance workbench for distant logical Bell-pair preparation in the
//! concatenated [[7,1,3]] code.
//!
//! The crate is organised bottom-up:
//!
//! * [`pauli_core`] — exact symplectic Pauli algebra, stabilizer tableaux,
//!   group equivalence, and CSS Bell-preparation validation.
//! * [`gadget_library`] — circuit IR with typed noisy locations and
//!   constructors for every gadget (preparations, error correction, CNOT
//!   rectangles, interface, purification circuits, cat-state measurement).
//! * [`frame_sim`] — seeded Pauli-frame Monte Carlo, malignant-pair
//!   enumeration, single-fault scans, pseudo-threshold estimation.
//! * [`bounds_engine`] — second/third-order analytic bounds, the level-k
//!   coefficient dynamical system and its fixed point.
//! * [`epp_planner`] — purification recursions, interface error bound, and
//!   scheme planning with saturation-round tables.
//! * [`flow_checker`] — parity-flow feasibility networks for error
//!   propagation through the purification circuit.
//! * [`game_resources`] — magic-square-game strategies, failure bounds and
//!   resource (ebit / space-time) accounting.
//! * [`fixtures`] — bundled reference matrices, censuses and CSS code files.

pub mod bounds_engine;
pub mod epp_planner;
pub mod fixtures;
pub mod flow_checker;
pub mod frame_sim;
pub mod gadget_library;
pub mod game_resources;
pub mod pauli_core;
