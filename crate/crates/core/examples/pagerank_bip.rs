//! On a one-way bipartite graph, smoothed PageRank restricted to the right
//! side is an increasing affine function of the closed form
//! PR_bip(v) = sum_u wt(u, v) / outwt(u), so both rank documents alike.

use clustrank::centrality::{influx, pagerank, pagerank_bip, DEFAULT_MAX_ITER, DEFAULT_TOL};
use clustrank::eval::LAMBDA_GRID;
use clustrank::{EntityId, RelevanceFlowGraph, Schema};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> clustrank::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (clusters, docs) = (4u32, 7u32);
    let mut nodes: Vec<EntityId> = (0..docs).map(EntityId::Doc).collect();
    nodes.extend((0..clusters).map(EntityId::Clust));
    let mut edges = Vec::new();
    for c in 0..clusters {
        for d in 0..docs {
            if rng.random_bool(0.5) || d == c {
                edges.push((
                    EntityId::Clust(c),
                    EntityId::Doc(d),
                    rng.random_range(0.1..1.0),
                ));
            }
        }
    }
    let g = RelevanceFlowGraph::from_edges(Schema::ClusterDoc, 0, nodes, edges)?;

    let bip = pagerank_bip(&g)?;
    let flux = influx(&g);
    println!(
        "{:>5} {:>9} {:>9}  PR at lambda = 0.05 / 0.5 / 0.95",
        "doc", "PR_bip", "influx"
    );
    let prs: Vec<_> = [LAMBDA_GRID[0], 0.5, LAMBDA_GRID[10]]
        .iter()
        .map(|&l| pagerank(&g, l, DEFAULT_TOL, DEFAULT_MAX_ITER))
        .collect::<Result<_, _>>()?;
    for d in 0..docs {
        let id = EntityId::Doc(d);
        print!(
            "{id:>5} {:>9.5} {:>9.5} ",
            bip.get(id).unwrap(),
            flux.get(id).unwrap()
        );
        for pr in &prs {
            print!(" {:.6}", pr.get(id).unwrap());
        }
        println!();
    }
    Ok(())
}
