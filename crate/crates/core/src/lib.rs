//! Timed automaton games with parity objectives, solved by reduction to
//! finite turn-based parity games over clock regions.

pub mod gamefile;
pub mod model;
pub mod parity;
pub mod reduction;
pub mod regions;
pub mod robust;
