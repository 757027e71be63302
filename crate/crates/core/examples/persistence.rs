//! Save a trained network, reload it and check the round trip, then read
//! messages and queries from the text formats.

use std::io::Cursor;

use scn::persistence::{payload_len, read_messages, read_queries, write_messages, HEADER_LEN};
use scn::{decode, gen_messages, load_network_file, save_network_file, DecodeConfig, LinkStore, NetworkParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = NetworkParams::new(8, 64)?;
    let messages = gen_messages(&params, 1018, 42);
    let mut store = LinkStore::new(params);
    store.store_all(&messages)?;

    let dir = std::env::temp_dir().join("scn-persistence-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("net.scnw");
    save_network_file(&store, &path)?;
    let size = std::fs::metadata(&path)?.len();
    println!("{}: {size} bytes (header {HEADER_LEN} + payload {})", path.display(), payload_len(&params));

    let loaded = load_network_file(&path)?;
    println!("reloaded identical: {}", loaded == store);

    let mut text = Vec::new();
    write_messages(&messages[..3], &mut text)?;
    print!("{}", String::from_utf8_lossy(&text));
    let back = read_messages(Cursor::new(&text), &params)?;
    println!("messages round trip: {}", back == messages[..3]);

    let queries = format!("# queries\n{}\n\n{}\n", mask(&messages[0]), mask(&messages[1]));
    for q in read_queries(Cursor::new(queries), &params)? {
        let out = decode(&loaded, &q, &DecodeConfig::default())?;
        println!("{q} -> {}", out.status.name());
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn mask(m: &scn::Message) -> String {
    m.symbols()
        .iter()
        .enumerate()
        .map(|(i, s)| if i % 2 == 0 { "?".to_string() } else { s.to_string() })
        .collect::<Vec<_>>()
        .join(" ")
}
