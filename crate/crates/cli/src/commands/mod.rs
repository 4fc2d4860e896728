pub mod report;
pub mod scalar;
pub mod sharpness;
pub mod simplex;
pub mod verify;
