//! Exact and certified arithmetic.
//!
//! Integers and rationals come from `num-bigint`/`num-rational`. Real values
//! are carried as [`RealEnclosure`] intervals with dyadic endpoints; every
//! transcendental evaluation rounds outward, so a comparison decided on
//! enclosures is a proof.

mod compare;
mod dyadic;
mod enclosure;
mod kernels;

pub use compare::{
    certified_compare, certified_compare_with, certified_sign, enclose_acosh, enclose_log,
    enclose_sqrt, refine, Comparison, PrecisionSchedule, Refinable,
};
pub use dyadic::{parse_decimal_rational, Dyadic, Round};
pub use enclosure::{EnclosureRecord, RealEnclosure};
