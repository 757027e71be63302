//! Run the massively-parallel and selective rules step by step on the same
//! query and show that they walk through identical states.

use scn::{
    gd_step_mpd, gd_step_sd, gen_messages, local_decode, ErasedPolicy, LinkStore, NetworkParams, PartialMessage,
};

fn main() -> scn::Result<()> {
    let params = NetworkParams::new(8, 64)?;
    let messages = gen_messages(&params, 1018, 7);
    let mut store = LinkStore::new(params);
    store.store_all(&messages)?;
    println!("c=8 l=64 M=1018 density={:.4}", store.density());

    let query = PartialMessage::with_erased(&messages[0], &[0, 2, 5, 7]);
    println!("query    {query}");
    let mut mpd = local_decode(&params, &query)?;
    let mut strict = mpd.clone();
    let mut skip = mpd.clone();
    for it in 1..=4 {
        mpd = gd_step_mpd(&store, &mpd);
        strict = gd_step_sd(&store, &strict, ErasedPolicy::StrictOr);
        skip = gd_step_sd(&store, &skip, ErasedPolicy::SkipAsOnes);
        let counts: Vec<usize> = mpd.clusters().iter().map(|s| s.count()).collect();
        println!(
            "iter {it}: active per cluster {counts:?}  mpd==sd(strict) {}  mpd==sd(skip) {}",
            mpd == strict,
            mpd == skip
        );
    }
    println!("target   {}", messages[0]);
    Ok(())
}
