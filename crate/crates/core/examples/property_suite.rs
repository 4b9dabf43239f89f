//! The randomized forms/hodge property suite, as run by `carroll verify`.
//!
//!     cargo run --release --example property_suite [seed]

use carroll::report::Report;
use carroll::suite::{property_suite, SuiteOptions};

fn main() -> carroll::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let opts = SuiteOptions { seed, samples: 100, ..Default::default() };
    let mut report = Report::default();
    for n in 1..=3 {
        report.extend(property_suite(n, &opts)?);
    }
    print!("{}", report.to_text());
    Ok(())
}
