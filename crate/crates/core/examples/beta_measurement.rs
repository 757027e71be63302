//! Measure how many neurons stay active per erased cluster after the first
//! iteration, the quantity that sizes the serial read budget.
//!
//! ```text
//! cargo run --release --example beta_measurement [seeds]
//! ```

use scn::{gen_messages, measure_beta, DecodeConfig, LinkStore, NetworkParams};

fn main() -> scn::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    for (l, m) in [(64, 1018), (16, 64)] {
        let params = NetworkParams::new(8, l)?;
        println!("c=8 l={l} M={m}, 1000 trials, 4 erased clusters");
        for seed in 1..=seeds {
            let messages = gen_messages(&params, m, seed);
            let mut store = LinkStore::new(params);
            store.store_all(&messages)?;
            let report = measure_beta(&store, &messages, 1000, 4, seed, &DecodeConfig::default())?;
            println!(
                "  seed {seed}: density {:.4} beta {} mode {} histogram {:?} P(>2) {:.3}",
                store.density(),
                report.beta,
                report.mode(),
                report.histogram,
                report.exceed_rate(2)
            );
        }
    }
    Ok(())
}
