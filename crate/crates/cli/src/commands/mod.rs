pub mod compare;
pub mod curves;
pub mod run;
pub mod sweep;
