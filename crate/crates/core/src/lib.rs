//! Discrete projection ghosts and fragile ghost watermarks.
//!
//! A ghost is a signed integer image whose discrete line sums vanish for a
//! chosen set of co-prime lattice directions. This crate builds them from
//! start tiles by negate-shift-add dilations, hollows minimal ghosts into
//! boundary ghosts, inflates boundaries into larger shapes by
//! segment-cancelling tilings, projects images with the Mojette and finite
//! Radon transforms, and uses inflated ghosts as imperceptible integrity
//! watermarks in 8-bit images.

pub mod boundary;
pub mod catalog;
pub mod builder;
pub mod imageio;
pub mod inflate;
pub mod lattice;
pub mod project;
pub mod watermark;

pub use builder::{boundary_ghost, minimal_ghost, Family, GhostRecipe};
pub use lattice::{box_size, Direction, Point, SignedGrid, Vec2};
