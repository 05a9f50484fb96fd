pub mod analytic;
pub mod correlation;
pub mod experiment;
pub mod linalg;
pub mod model;
pub mod numeric;
