pub mod bivariate;
pub mod correlation;
pub mod decomposition;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod measures;
pub mod prob;
pub mod quadrature;
pub mod special;
pub mod streams;
pub mod tables;

pub use bivariate::{BivariateModel, Copula, Family};
pub use correlation::{CorrelationSpec, IndexLabel};
pub use decomposition::StandbySystem;
pub use distributions::Distribution;
pub use error::{Error, Result};
pub use estimation::PairedSample;
pub use measures::{IntegrationConfig, Method};
pub use prob::Prob;
