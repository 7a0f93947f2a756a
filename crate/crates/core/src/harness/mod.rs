pub mod random;
pub mod report;
pub mod suites;
