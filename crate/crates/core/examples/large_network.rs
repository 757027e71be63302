//! The largest reference network: 8 clusters of 400 neurons holding 39,754
//! messages, about 1.1 MB of links.
//!
//! ```text
//! cargo run --release --example large_network
//! ```

use std::time::Instant;

use scn::experiments::draw_query;
use scn::{decode, gen_messages, DecodeConfig, LinkStore, NetworkParams, ResourceReport, Rule};

fn main() -> scn::Result<()> {
    let params = NetworkParams::new(8, 400)?;
    let start = Instant::now();
    let messages = gen_messages(&params, 39_754, 1);
    let mut store = LinkStore::new(params);
    store.store_all(&messages)?;
    println!(
        "built in {:.2?}: density {:.4}, links {} bytes, kappa {}",
        start.elapsed(),
        store.density(),
        store.link_bytes(),
        params.kappa()
    );
    let r = ResourceReport::new(&params, messages.len() as u64, 2, 4);
    println!("capacity {} bits, bram {} bits", r.capacity_bits, r.bram_bits);

    for config in [DecodeConfig::new(Rule::Mpd, 4), DecodeConfig::new(Rule::SdBounded { beta: 2 }, 4)] {
        let start = Instant::now();
        let (mut ok, mut overflow) = (0, 0);
        for trial in 0..100 {
            let (i, query) = draw_query(&messages, 4, 1, trial);
            let out = decode(&store, &query, &config)?;
            ok += usize::from(out.status.retrieved() == Some(&messages[i]));
            overflow += usize::from(out.beta_overflow);
        }
        println!(
            "{:>10}: 100 queries in {:.2?}, {ok} retrieved, {overflow} overflowed",
            config.rule.name(),
            start.elapsed()
        );
    }
    Ok(())
}
