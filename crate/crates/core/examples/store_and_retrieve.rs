//! Store a handful of messages and complete them from partial queries.
//!
//! ```text
//! cargo run --example store_and_retrieve
//! ```

use scn::{decode, DecodeConfig, DecodeStatus, LinkStore, Message, PartialMessage, SubMessage};

fn main() -> scn::Result<()> {
    // 4 clusters of 16 neurons: each message is 4 symbols in 0..16
    let mut store = LinkStore::with_size(4, 16)?;
    let params = *store.params();
    let messages: Vec<Message> = [[3, 14, 1, 5], [9, 2, 6, 5], [3, 5, 8, 9], [7, 9, 3, 2]]
        .into_iter()
        .map(|s| Message::new(&params, s.to_vec()))
        .collect::<scn::Result<_>>()?;
    store.store_all(&messages)?;
    println!("stored {} messages, link density {:.4}", store.stored_count(), store.density());

    let config = DecodeConfig::default();
    for msg in &messages {
        let query = PartialMessage::with_erased(msg, &[1, 3]);
        let out = decode(&store, &query, &config)?;
        println!("{query:>12}  ->  {}", describe(&out.status));
    }

    // partially known symbol: cluster 2 is known to be 0b00?? (0..4)
    let query = PartialMessage::new(
        &params,
        vec![
            SubMessage::Known(7),
            SubMessage::Erased,
            SubMessage::PartialBits { value: 0b0000, mask: 0b0011 },
            SubMessage::Known(2),
        ],
    )?;
    let out = decode(&store, &query, &config)?;
    println!("7 ? 00xx 2  ->  {}", describe(&out.status));

    // no stored message pairs 3 in cluster 0 with 7 in cluster 1
    let query = PartialMessage::new(
        &params,
        vec![SubMessage::Known(3), SubMessage::Known(7), SubMessage::Erased, SubMessage::Erased],
    )?;
    println!("{query:>12}  ->  {}", describe(&decode(&store, &query, &config)?.status));
    Ok(())
}

fn describe(status: &DecodeStatus) -> String {
    match status {
        DecodeStatus::Retrieved(m) => format!("Retrieved {m}"),
        other => other.name().to_string(),
    }
}
