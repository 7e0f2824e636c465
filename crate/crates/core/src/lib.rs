pub mod gen;
pub mod lang;
pub mod model;
pub mod proof;
pub mod qset;
