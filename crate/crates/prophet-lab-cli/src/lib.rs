//! Library half of the `prophet-lab` binary. The binary itself is a thin
//! argument-parsing shell; everything with substance — above all the
//! reproduction and soundness check suites — lives here so integration
//! tests can call it directly instead of scraping process output.

pub mod checks;
