//! The bounded selective decoder: priority-encoded serial reads, overflow
//! reporting and cycle accounting.

use scn::experiments::draw_query;
use scn::{decode, gen_messages, spm_serialize, DecodeConfig, LinkStore, NetworkParams, NeuronSet, Rule};

fn main() -> scn::Result<()> {
    let active = NeuronSet::from_indices(16, [2, 9, 13]);
    for beta in 1..=4 {
        let (order, dropped) = spm_serialize(&active, beta);
        println!("serialize {active:?} with beta={beta}: {order:?} overflow={dropped}");
    }

    let params = NetworkParams::new(8, 16)?;
    let messages = gen_messages(&params, 64, 3);
    let mut store = LinkStore::new(params);
    store.store_all(&messages)?;

    println!("\n{:>5} {:>10} {:>10} {:>9} {:>7}", "beta", "retrieved", "overflow", "agrees", "cycles");
    let sd = DecodeConfig::new(Rule::Sd, 4);
    for beta in [1, 2, 3, 4, 16] {
        let bounded = DecodeConfig::new(Rule::SdBounded { beta }, 4);
        let (mut retrieved, mut overflow, mut agree, mut cycles) = (0, 0, 0, 0);
        for trial in 0..1000 {
            let (i, query) = draw_query(&messages, 4, 3, trial);
            let b = decode(&store, &query, &bounded)?;
            retrieved += usize::from(b.status.retrieved() == Some(&messages[i]));
            overflow += usize::from(b.beta_overflow);
            agree += usize::from(b.same_result(&decode(&store, &query, &sd)?));
            cycles = b.cycles;
        }
        println!("{beta:>5} {retrieved:>10} {overflow:>10} {agree:>9} {cycles:>7}");
    }
    Ok(())
}
