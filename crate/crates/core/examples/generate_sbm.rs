//! Samples the desk-scale SBM and writes it in the on-disk graph format.
//!
//! ```bash
//! cargo run --release --example generate_sbm -- /tmp/sbm 7
//! ```

use graphss::graph::{generate_sbm, load_graph_dir, save_graph, SbmConfig};

fn main() -> graphss::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args.next().map_or_else(|| std::env::temp_dir().join("graphss-sbm"), Into::into);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);

    let graph = generate_sbm(&SbmConfig::desk(seed))?;
    let all: Vec<usize> = (0..graph.num_nodes()).collect();
    println!(
        "nodes {} classes {} features {} directed edges {} mean degree {:.2}",
        graph.num_nodes(),
        graph.num_classes(),
        graph.num_features(),
        graph.num_directed_edges(),
        graph.average_degree(&all)
    );

    save_graph(&graph, &dir)?;
    let back = load_graph_dir(&dir)?;
    assert_eq!(back.num_directed_edges(), graph.num_directed_edges());
    println!("written to {}", dir.display());
    Ok(())
}
