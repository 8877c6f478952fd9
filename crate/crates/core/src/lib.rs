pub mod cactus;
pub mod cyclic;
pub mod error;
pub mod evaluation;
pub mod jks;
pub mod linalg;
pub mod profiles;
pub mod webs;
