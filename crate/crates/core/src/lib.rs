//! Breadth-based investor-sentiment indicators (SENT, ARMS), bivariate VAR
//! estimation and two-directional Granger-causality testing for daily stock
//! panels.
//!
//! The pipeline runs bottom-up:
//!
//! 1. [`ingest`] parses a `date,ticker,close,volume` panel, builds the market
//!    return series and aligns series on a shared calendar.
//! 2. [`breadth`] counts advancers and decliners per day and derives the SENT
//!    and ARMS series and their first differences.
//! 3. [`stats`] holds the numerical kernel: QR-based least squares, the F
//!    distribution, the VAR information criterion and an ADF check.
//! 4. [`var`] fits VAR(p) systems and selects the lag order.
//! 5. [`granger`] runs the causality tests and the 32-cell experiment matrix.
//! 6. [`config`], [`pipeline`], [`report`] and [`fixture`] drive batch runs
//!    and emit JSON, CSV and markdown tables.

// Index loops read closer to the matrix algebra they implement.
#![allow(clippy::needless_range_loop)]

pub mod breadth;
pub mod config;
pub mod error;
pub mod fixture;
pub mod granger;
pub mod ingest;
pub mod pipeline;
pub mod report;
pub mod simulate;
pub mod stats;
pub mod var;

pub use error::{Error, ErrorKind, Result};
