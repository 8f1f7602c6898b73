//! Panel ingestion, return construction and calendar alignment.

mod panel;
mod returns;
mod series;

pub use panel::{parse_index_csv, parse_price_csv, PriceBar, PricePanel};
pub use returns::market_return_series;
pub use series::{align, AlignedFrame, TimeSeries};
