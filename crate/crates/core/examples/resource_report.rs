//! Memory, capacity and latency figures for the three reference networks.

use scn::{NetworkParams, ResourceReport};

fn main() -> scn::Result<()> {
    println!(
        "{:>6} {:>6} {:>8} {:>14} {:>12} {:>9} {:>10} {:>10}",
        "n", "l", "M", "capacity_bits", "bram_bits", "eff", "delay_sd", "delay_mpd"
    );
    for (l, m) in [(16, 64), (64, 1018), (400, 39_754)] {
        let params = NetworkParams::new(8, l)?;
        let r = ResourceReport::new(&params, m, 2, 4);
        println!(
            "{:>6} {l:>6} {m:>8} {:>14} {:>12} {:>9.4} {:>10} {:>10}",
            params.total_neurons(),
            r.capacity_bits,
            r.bram_bits,
            r.efficiency,
            r.access_delay_sd,
            r.access_delay_mpd
        );
    }
    println!("\nserialized latency by beta (it=4): ");
    for beta in 1..=6 {
        print!(" {beta}:{}", scn::access_delay_sd(beta, 4));
    }
    println!();
    Ok(())
}
