//! Exact rational arithmetic: polynomials, Laurent series and iterated Laurent series.

mod bernoulli;
mod laurent;
mod poly;
mod rat;
mod series;

pub use bernoulli::{bernoulli, bernoulli_table};
pub use laurent::Laurent;
pub use poly::{Exps, Poly};
pub use rat::{factorial, format_rat, parse_rat, rat, rat_serde, rint, Rat};
pub use series::{iterated_residue, residue_of_product, ILSeries, SeriesRing, UNBOUNDED};
