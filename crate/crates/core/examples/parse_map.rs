//! Load an indoor map and print what the estimator will see.
//!
//! cargo run --example parse_map -- fixtures/maps/stata_like.osm

use std::path::PathBuf;

use arealoc::map::{Exit, NodeKind};
use arealoc::replay::load_map;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/maps/stata_like.osm"));
    let (map, warnings) = load_map(&path)?;
    for w in &warnings {
        println!("warning: {w}");
    }
    let (lo, hi) = map.bounds();
    println!(
        "{}: {} nodes, {} ways, extent {:.1} x {:.1} m",
        path.display(),
        map.nodes.len(),
        map.ways.len(),
        hi.x - lo.x,
        hi.y - lo.y
    );

    for c in map.corridors.values() {
        println!("corridor {:>4}  {:>3} -> {:<3} {:6.2} m", c.way_id, c.endpoints[0], c.endpoints[1], c.length);
    }
    for node in map.turning_points.keys() {
        let exits: Vec<String> = map
            .exits_at(*node)
            .iter()
            .map(|e| match e {
                Exit::Corridor { corridor, bearing, .. } => {
                    format!("{corridor}@{:.0}deg", bearing.angle().to_degrees())
                }
                Exit::Door { room, .. } => format!("room {room}"),
            })
            .collect();
        let kind = if map.nodes[node].kind == NodeKind::Door { "door" } else { "turn" };
        println!("{kind} {node:>4}  exits {}", exits.join(", "));
    }
    for r in map.rooms.values() {
        println!("room {:>4}  doors {:?}, {} wall ways", r.id, r.doors, r.wall_ways.len());
    }
    for (router, p) in &map.indicators {
        println!("router {router} at ({:.1}, {:.1})", p.x, p.y);
    }
    Ok(())
}
