use std::path::Path;

use proptest::prelude::*;

use arealoc::engine::{
    run_engine, straight_observations, AreaLabel, Engine, EngineConfig, EngineError, Observation, PositionalState,
};
use arealoc::geometry::{LocalPoint, Vec2};
use arealoc::map::{parse_osm, Direction, IndoorMap, WayId};

fn load(name: &str) -> IndoorMap {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/maps").join(name)).unwrap();
    parse_osm(&text).unwrap().0
}

fn corridor_between(m: &IndoorMap, a: i64, b: i64) -> (WayId, Direction) {
    let c = m.corridors.values().find(|c| c.endpoints == [a, b] || c.endpoints == [b, a]).expect("corridor exists");
    (c.way_id, if c.endpoints[0] == a { Direction::Fwd } else { Direction::Rev })
}

fn obs(k: usize, deg: f64) -> Observation {
    Observation::from_theta(k, deg.to_radians(), 0.7)
}

fn close(p: LocalPoint, x: f64, y: f64) -> bool {
    (p.x - x).abs() < 1e-6 && (p.y - y).abs() < 1e-6
}

#[test]
fn straight_corridor_walk_advances_one_step_length() {
    let m = load("t_junction.osm");
    let (corridor, direction) = corridor_between(&m, 2, 1);
    let west = m.nodes[&2].pos;
    let start = PositionalState::new(west, 0.0);
    let hist = run_engine(
        &m,
        EngineConfig::default(),
        start,
        AreaLabel::Corridor { corridor, direction },
        &straight_observations(10, 0.0, 0.7),
    )
    .unwrap();
    for (k, st) in hist.iter().enumerate() {
        assert!(close(st.positional.pos, west.x + 0.7 * k as f64, 0.0), "step {k}: {:?}", st.positional.pos);
        assert_eq!(st.area.label, AreaLabel::Corridor { corridor, direction });
    }
}

#[test]
fn misread_turn_is_switched_and_compensated() {
    let m = load("t_junction.osm");
    let (arrival, direction) = corridor_between(&m, 2, 1);
    let (north, _) = corridor_between(&m, 1, 4);
    let start = PositionalState::new(m.nodes[&2].pos, 0.0);
    let mut e =
        Engine::new(&m, EngineConfig::default(), start, AreaLabel::Corridor { corridor: arrival, direction }).unwrap();
    for k in 1..=14 {
        e.step(&obs(k, 0.0)).unwrap();
    }
    // an ambiguous 40 degree heading at the junction is first read as "straight on"
    let turn = *e.step(&obs(15, 40.0)).unwrap();
    assert!(close(turn.positional.pos, 0.7, 0.0));
    assert!(turn.area.verifying.is_some());
    for k in 16..=19 {
        e.step(&obs(k, 90.0)).unwrap();
    }
    let stats = e.stats();
    assert_eq!((stats.turns, stats.switches), (1, 1));
    // the window since the junction has been moved onto the north corridor
    for (i, st) in e.history()[15..].iter().enumerate() {
        assert!(close(st.positional.pos, 0.0, 0.7 * (i + 1) as f64), "{i}: {:?}", st.positional.pos);
        assert!(st.flags.compensated);
    }
    for k in 20..=24 {
        e.step(&obs(k, 90.0)).unwrap();
    }
    let last = e.current();
    assert_eq!(last.area.label, AreaLabel::Corridor { corridor: north, direction: Direction::Fwd });
    assert!(last.area.verifying.is_none());
    assert!(close(last.positional.pos, 0.0, 0.7 * 10.0 - 1e-12));
    assert_eq!(e.stats().confirms, 1);
}

#[test]
fn clear_turn_confirms_without_switching() {
    let m = load("t_junction.osm");
    let (arrival, direction) = corridor_between(&m, 2, 1);
    let start = PositionalState::new(m.nodes[&2].pos, 0.0);
    let mut observations: Vec<Observation> = (1..=14).map(|k| obs(k, 0.0)).collect();
    observations.extend((15..=22).map(|k| obs(k, 88.0)));
    let hist = run_engine(
        &m,
        EngineConfig::default(),
        start,
        AreaLabel::Corridor { corridor: arrival, direction },
        &observations,
    )
    .unwrap();
    let last = hist.last().unwrap();
    assert!(close(last.positional.pos, 0.0, 0.7 * 8.0));
    assert!(hist.iter().all(|s| !s.flags.compensated));
    assert!(hist[15].flags.snapped_turning_point);
}

#[test]
fn walk_into_lobby_and_back_out_through_the_door() {
    let m = load("stata_like.osm");
    let (corridor, direction) = corridor_between(&m, 5, 6);
    let start = PositionalState::new(m.nodes[&5].pos, 0.0);
    let mut e = Engine::new(&m, EngineConfig::default(), start, AreaLabel::Corridor { corridor, direction }).unwrap();
    let mut k = 0;
    for _ in 0..11 {
        k += 1;
        e.step(&obs(k, 0.0)).unwrap();
    }
    assert_eq!(e.current().area.label, AreaLabel::OpenArea { room: 7 });
    assert!(close(e.current().positional.pos, 35.7, 7.0));
    for _ in 0..5 {
        k += 1;
        e.step(&obs(k, 0.0)).unwrap();
    }
    assert!(close(e.current().positional.pos, 39.2, 7.0));
    for _ in 0..5 {
        k += 1;
        e.step(&obs(k, 180.0)).unwrap();
    }
    assert!(close(e.current().positional.pos, 35.7, 7.0));
    k += 1;
    e.step(&obs(k, 180.0)).unwrap();
    let out = e.current();
    assert_eq!(out.area.label, AreaLabel::Corridor { corridor, direction: direction.reversed() });
    assert!(close(out.positional.pos, 35.0, 7.0), "{:?}", out.positional.pos);
    let stats = e.stats();
    assert_eq!((stats.room_entries, stats.room_exits), (1, 1));
    k += 1;
    e.step(&obs(k, 180.0)).unwrap();
    assert!(close(e.current().positional.pos, 34.3, 7.0));
}

#[test]
fn calibration_moves_into_the_area_of_the_fix() {
    let m = load("stata_like.osm");
    let (corridor, direction) = corridor_between(&m, 5, 6);
    let start = PositionalState::new(m.nodes[&5].pos, 0.0);
    let mut e = Engine::new(&m, EngineConfig::default(), start, AreaLabel::Corridor { corridor, direction }).unwrap();
    e.step(&obs(1, 0.0)).unwrap();
    let router = m.indicators["ap-lobby-1"];
    e.calibrate(router);
    assert_eq!(e.current().positional.pos, router);
    assert_eq!(e.current().area.label, AreaLabel::OpenArea { room: 7 });
    assert!(e.current().flags.rssi_calibrated);
    e.step(&obs(2, -90.0)).unwrap();
    assert!(close(e.current().positional.pos, router.x, router.y - 0.7));
}

#[test]
fn bad_inputs_are_rejected() {
    let m = load("t_junction.osm");
    let (corridor, direction) = corridor_between(&m, 2, 1);
    let label = AreaLabel::Corridor { corridor, direction };
    let on_axis = PositionalState::new(m.nodes[&2].pos, 0.0);
    let off_axis = PositionalState::new(LocalPoint::new(-5.0, 1.0), 0.0);
    assert!(matches!(Engine::new(&m, EngineConfig::default(), off_axis, label), Err(EngineError::InitInconsistent(_))));
    assert!(matches!(
        Engine::new(&m, EngineConfig::default(), on_axis, AreaLabel::Intersection { node: 1 }),
        Err(EngineError::InitInconsistent(_))
    ));
    let bad_cfg = EngineConfig { k_win: 0, ..EngineConfig::default() };
    assert!(matches!(Engine::new(&m, bad_cfg, on_axis, label), Err(EngineError::Config(_))));

    let mut e = Engine::new(&m, EngineConfig::default(), on_axis, label).unwrap();
    assert_eq!(e.step(&obs(2, 0.0)).unwrap_err(), EngineError::OutOfOrder { expected: 1, got: 2 });
    let zero = Observation { k: 1, h_o: Vec2::new(0.0, 0.0), displacement: Vec2::new(0.0, 0.0) };
    assert_eq!(e.step(&zero).unwrap_err(), EngineError::BadObservation);
    // rejected observations leave the state untouched
    assert_eq!(e.history().len(), 1);
    e.step(&obs(1, 0.0)).unwrap();
}

proptest! {
    #[test]
    fn small_wobble_stays_on_the_axis(wobble in prop::collection::vec(-14.0f64..14.0, 1..20)) {
        let m = load("rect_loop.osm");
        let (corridor, direction) = corridor_between(&m, 1, 2);
        let start = PositionalState::new(m.nodes[&1].pos, 0.0);
        let observations: Vec<Observation> = wobble.iter().enumerate().map(|(i, &d)| obs(i + 1, d)).collect();
        let hist = run_engine(&m, EngineConfig::default(), start, AreaLabel::Corridor { corridor, direction }, &observations).unwrap();
        for (k, st) in hist.iter().enumerate() {
            prop_assert!(close(st.positional.pos, 0.7 * k as f64, 0.0), "step {}: {:?}", k, st.positional.pos);
        }
    }

    #[test]
    fn lobby_random_walk_never_crosses_a_wall(headings in prop::collection::vec(-180.0f64..180.0, 1..60)) {
        let m = load("stata_like.osm");
        let start = PositionalState::new(LocalPoint::new(42.0, 7.0), 0.0);
        let observations: Vec<Observation> = headings.iter().enumerate().map(|(i, &d)| obs(i + 1, d)).collect();
        let hist = run_engine(&m, EngineConfig::default(), start, AreaLabel::OpenArea { room: 7 }, &observations).unwrap();
        for w in hist.windows(2) {
            let (a, b) = (w[0].positional.pos, w[1].positional.pos);
            prop_assert!(m.segment_crosses_wall(a, b).is_none(), "{:?} -> {:?}", a, b);
        }
    }

    #[test]
    fn history_has_one_state_per_step(n in 0usize..40, theta in -3.1f64..3.1) {
        let m = load("stata_like.osm");
        let start = PositionalState::new(LocalPoint::new(42.0, 7.0), 0.0);
        let hist = run_engine(&m, EngineConfig::default(), start, AreaLabel::OpenArea { room: 7 }, &straight_observations(n, theta, 0.7)).unwrap();
        prop_assert_eq!(hist.len(), n + 1);
        prop_assert!(hist.iter().enumerate().all(|(k, s)| s.k == k));
    }
}
