//! Exact symbolic algebra for coefficient functions on the layer and for
//! finite-order differential operators over them.

mod equality;
mod exponent;
mod operator;
mod ring;

pub use equality::{op_equals, oracle_seed, set_oracle_seed, DecisionPath, Equality, NumericOracle, DEFAULT_SEED};
pub use exponent::Exponent;
pub use operator::{DiffOperator, MAX_ORDER};
pub use ring::{
    cos_multiple, sin_multiple, Axis, CompiledRing, MonoKey, Monomial, RingElement, SymFunction, TrigPoint,
};
