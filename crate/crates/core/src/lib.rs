//! Degree-Rips cluster hierarchies of finite metric spaces, their layer and
//! branch point subposets, and executable stability checks for inclusions
//! of metric spaces.

pub mod audit;
pub mod filtration;
pub mod hierarchy;
pub mod layers;
pub mod metric;
pub mod report;
pub mod stability;
mod union_find;
