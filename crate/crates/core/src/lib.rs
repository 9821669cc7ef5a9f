pub mod field;
pub mod cyclo;
pub mod kubert;
pub mod sheaf;
pub mod fingerprint;
pub mod cli;
