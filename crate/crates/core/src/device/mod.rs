//! Device model: coupling graphs and virtual-to-physical layouts.

mod coupling;
mod layout;

pub use coupling::CouplingMap;
pub use layout::{layout_swap, simple_layout, Layout};
