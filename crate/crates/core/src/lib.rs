//! Exact toolkit for Darboux-type singular foliations: one-forms and wedge
//! systems, chart-wise blow-ups, monomialization of the first integral,
//! exponent-matrix analysis and elimination of units.

pub mod blowup;
pub mod foliation;
pub mod linalg;
pub mod monomialize;
pub mod pipeline;
pub mod polyring;
pub mod problem;
pub mod report;
pub mod resonance;
pub mod unitelim;
pub mod verify;
