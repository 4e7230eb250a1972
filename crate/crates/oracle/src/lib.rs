//! Reference implementations used only by tests. Nothing here shares code
//! with the production paths it checks.

pub mod bessel;
pub mod green_fd;
pub mod linalg;
