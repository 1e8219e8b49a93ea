//! Densities of semantic classes of implicational-negational formulae.

pub mod asympt;
pub mod count;
pub mod exact;
pub mod logic;
pub mod numeric;
pub mod quad;
pub mod systems;
pub mod verify;
