//! Simulation library for optical wireless links that deliver data and power
//! to segmented photonic power converters.

// `!(x > 0.0)` is the idiom used to reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod device;
pub mod formats;
pub mod link;
pub mod modem;
pub mod numeric;
pub mod presets;
pub mod safety;
