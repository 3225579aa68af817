//! A junction where the first heading reading picks the wrong corridor:
//! the verification window switches and the steps since the junction are
//! moved onto the corridor actually taken.

use arealoc::engine::{AreaLabel, Engine, EngineConfig, Observation, PositionalState};
use arealoc::map::{Direction, MapBuilder, NodeKind, WayKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // west-east corridor with a branch leaving at 80 degrees
    let map = MapBuilder::new()
        .node(1, -10.0, 0.0, NodeKind::TurningPoint)
        .node(2, 0.0, 0.0, NodeKind::TurningPoint)
        .node(3, 10.0, 0.0, NodeKind::TurningPoint)
        .node(4, 1.736, 9.848, NodeKind::TurningPoint)
        .way(10, WayKind::Corridor, &[1, 2])
        .way(11, WayKind::Corridor, &[2, 3])
        .way(12, WayKind::Corridor, &[2, 4])
        .build()?;
    let start = PositionalState::new(map.nodes[&1].pos, 0.0);
    let mut engine = Engine::new(
        &map,
        EngineConfig::default(),
        start,
        AreaLabel::Corridor { corridor: 10, direction: Direction::Fwd },
    )?;

    // straight to the junction, a 35 degree reading that looks like "keep going east", then the branch
    let mut headings = vec![0.0; 14];
    headings.push(35.0);
    headings.extend([80.0; 10]);
    for (i, deg) in headings.iter().enumerate() {
        let st = *engine.step(&Observation::from_theta(i + 1, f64::to_radians(*deg), 0.7))?;
        let phase =
            st.area.verifying.map(|v| format!(" verifying {} (round {})", v.candidate, v.round)).unwrap_or_default();
        println!("step {:>2}  heading {:>4.0}  -> {}{}", st.k, deg, st.area.label, phase);
    }
    println!("\nfinal trajectory after compensation:");
    for st in &engine.history()[14..] {
        println!("step {:>2}  ({:6.2}, {:6.2})  {}", st.k, st.positional.pos.x, st.positional.pos.y, st.flags);
    }
    println!("{:?}", engine.stats());
    Ok(())
}
