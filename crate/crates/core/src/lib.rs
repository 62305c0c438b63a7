pub mod algebra;
pub mod channel;
pub mod codes;
pub mod exec;
pub mod fixtures;
pub mod mdomain;
pub mod numerics;
pub mod reference;
