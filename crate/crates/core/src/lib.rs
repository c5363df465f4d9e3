pub mod curve;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod point;
pub mod structure;
pub mod iso;
pub mod sheaf;
pub mod par;
pub mod stability;
pub mod abel;
pub mod sequiv;
pub mod random;
pub mod verify;
pub mod dot;
