pub mod arith;
pub mod tensor;
pub mod linsolve;
pub mod mpl;
pub mod polygon;
pub mod lab;
pub mod numeric;
pub mod cli;
