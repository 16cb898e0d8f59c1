//! HITS on a small one-way bipartite graph: clusters are pure hubs,
//! documents pure authorities, and auth(d2)/auth(d1) is the golden ratio.

use clustrank::centrality::{hits, DEFAULT_MAX_ITER, DEFAULT_TOL};
use clustrank::{EntityId, RelevanceFlowGraph, Schema};

fn main() -> clustrank::Result<()> {
    use EntityId::{Clust as C, Doc as D};
    let g = RelevanceFlowGraph::from_edges(
        Schema::ClusterDoc,
        2,
        vec![D(1), D(2), C(1), C(2)],
        [(C(1), D(1), 1.0), (C(1), D(2), 1.0), (C(2), D(2), 1.0)],
    )?;
    g.write_edges(std::io::stdout()).expect("stdout");

    let (hub, auth) = hits(&g, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    println!("converged after {} iterations", auth.iterations);
    for (id, a) in auth.iter() {
        println!("{id}  hub {:.6}  auth {:.6}", hub.get(id).unwrap(), a);
    }
    let ratio = auth.get(D(2)).unwrap() / auth.get(D(1)).unwrap();
    println!(
        "auth(d:2) / auth(d:1) = {ratio:.6}  (golden ratio {:.6})",
        (1.0 + 5f64.sqrt()) / 2.0
    );
    Ok(())
}
