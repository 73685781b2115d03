pub mod glm_oracle;
pub mod invariants;
pub mod micro;
