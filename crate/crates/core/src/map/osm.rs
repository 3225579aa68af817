//! Reader and writer for the annotated OSM XML subset.
//!
//! Nodes and ways carry a single `indoor` tag naming their role; indicator
//! nodes add a `router` tag with the access point identifier. `name` tags are
//! kept. Anything else is reported as a warning and skipped.

use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::build::MapBuilder;
use super::error::{MapError, MapWarning};
use super::geo::GeoPoint;
use super::model::{IndoorMap, MapWay, NodeId, NodeKind, WayId, WayKind};

struct RawNode {
    id: NodeId,
    at: GeoPoint,
    line: usize,
    indoor: Option<String>,
    router: Option<String>,
    name: Option<String>,
}

struct RawWay {
    id: WayId,
    line: usize,
    refs: Vec<NodeId>,
    indoor: Option<String>,
    name: Option<String>,
}

enum Open {
    Node(RawNode),
    Way(RawWay),
}

#[derive(Default)]
struct State {
    open: Option<Open>,
    /// Nesting depth inside an element whose content is skipped.
    skip_depth: usize,
    seen_root: bool,
}

/// Parse OSM XML text into a validated map plus any non-fatal warnings.
pub fn parse_osm(xml: &str) -> Result<(IndoorMap, Vec<MapWarning>), MapError> {
    let mut reader = Reader::from_str(xml);
    reader.config_mut().trim_text(true);
    let bytes = xml.as_bytes();
    let line_at = |pos: u64| {
        // skip the whitespace the reader trims so the line is that of the element itself
        let mut end = (pos as usize).min(bytes.len());
        while end < bytes.len() && bytes[end].is_ascii_whitespace() {
            end += 1;
        }
        bytes[..end].iter().filter(|&&b| b == b'\n').count() + 1
    };

    let mut builder = MapBuilder::new();
    let mut warnings = Vec::new();
    let mut st = State::default();

    loop {
        let pos = reader.buffer_position();
        let event = reader
            .read_event()
            .map_err(|e| MapError::Xml { line: line_at(reader.error_position()), message: e.to_string() })?;
        let line = line_at(pos);
        match event {
            Event::Eof => break,
            Event::Start(e) => handle_start(&e, line, false, &mut st, &mut builder, &mut warnings)?,
            Event::Empty(e) => handle_start(&e, line, true, &mut st, &mut builder, &mut warnings)?,
            Event::End(e) => {
                if st.skip_depth > 0 {
                    st.skip_depth -= 1;
                    continue;
                }
                match st.open.take() {
                    Some(Open::Node(n)) if e.name().as_ref() == b"node" => finish_node(n, &mut builder, &mut warnings),
                    Some(Open::Way(w)) if e.name().as_ref() == b"way" => finish_way(w, &mut builder, &mut warnings)?,
                    other => st.open = other,
                }
            }
            Event::Text(t) => {
                let text = t.unescape().map_err(|e| MapError::Xml { line, message: e.to_string() })?;
                if !text.trim().is_empty() {
                    warnings.push(MapWarning::new(Some(line), "unexpected text content ignored"));
                }
            }
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) | Event::CData(_) => {}
        }
    }
    if !st.seen_root {
        return Err(MapError::Xml { line: 1, message: "missing <osm> root element".into() });
    }
    builder.build_with_warnings(warnings)
}

fn handle_start(
    e: &BytesStart<'_>,
    line: usize,
    empty: bool,
    st: &mut State,
    builder: &mut MapBuilder,
    warnings: &mut Vec<MapWarning>,
) -> Result<(), MapError> {
    if st.skip_depth > 0 {
        if !empty {
            st.skip_depth += 1;
        }
        return Ok(());
    }
    let name = e.name();
    match (name.as_ref(), st.open.as_mut()) {
        (b"osm", None) => st.seen_root = true,
        (b"bounds", None) | (b"meta", None) | (b"note", None) => {
            if !empty {
                st.skip_depth = 1;
            }
        }
        (b"node", None) => {
            let id = parse_attr(e, "node", "id", line)?;
            let lat = parse_attr(e, "node", "lat", line)?;
            let lon = parse_attr(e, "node", "lon", line)?;
            let raw = RawNode { id, at: GeoPoint::new(lat, lon), line, indoor: None, router: None, name: None };
            if empty {
                finish_node(raw, builder, warnings);
            } else {
                st.open = Some(Open::Node(raw));
            }
        }
        (b"way", None) => {
            let id = parse_attr(e, "way", "id", line)?;
            let raw = RawWay { id, line, refs: Vec::new(), indoor: None, name: None };
            if empty {
                finish_way(raw, builder, warnings)?;
            } else {
                st.open = Some(Open::Way(raw));
            }
        }
        (b"nd", Some(Open::Way(w))) => w.refs.push(parse_attr(e, "nd", "ref", line)?),
        (b"tag", Some(Open::Node(n))) => {
            let (k, v) = tag_pair(e, line)?;
            match k.as_str() {
                "indoor" => n.indoor = Some(v),
                "router" => n.router = Some(v),
                "name" => n.name = Some(v),
                _ => warnings.push(MapWarning::new(Some(line), format!("node {}: unknown tag {k:?} ignored", n.id))),
            }
        }
        (b"tag", Some(Open::Way(w))) => {
            let (k, v) = tag_pair(e, line)?;
            match k.as_str() {
                "indoor" => w.indoor = Some(v),
                "name" => w.name = Some(v),
                _ => warnings.push(MapWarning::new(Some(line), format!("way {}: unknown tag {k:?} ignored", w.id))),
            }
        }
        (other, _) => {
            let other = String::from_utf8_lossy(other);
            warnings.push(MapWarning::new(Some(line), format!("element <{other}> ignored")));
            if !empty {
                st.skip_depth = 1;
            }
        }
    }
    Ok(())
}

fn finish_node(n: RawNode, builder: &mut MapBuilder, warnings: &mut Vec<MapWarning>) {
    let kind = match n.indoor.as_deref() {
        None => NodeKind::Vertex,
        Some("turning_point") => NodeKind::TurningPoint,
        Some("door") => NodeKind::Door,
        Some("room") => NodeKind::Room,
        Some("lobby") => NodeKind::Lobby,
        Some("indicator") => NodeKind::Indicator { router: n.router.clone().unwrap_or_default() },
        Some(other) => {
            warnings.push(MapWarning::new(
                Some(n.line),
                format!("node {}: unknown indoor value {other:?}, treated as plain vertex", n.id),
            ));
            NodeKind::Vertex
        }
    };
    if n.router.is_some() && !matches!(kind, NodeKind::Indicator { .. }) {
        warnings.push(MapWarning::new(Some(n.line), format!("node {}: router tag on non-indicator ignored", n.id)));
    }
    builder.push_geo_node(n.id, n.at, kind, n.name);
}

fn finish_way(w: RawWay, builder: &mut MapBuilder, warnings: &mut Vec<MapWarning>) -> Result<(), MapError> {
    let kind = match w.indoor.as_deref() {
        None => return Err(MapError::UntaggedWay(w.id)),
        Some("corridor") => WayKind::Corridor,
        Some("wall") => WayKind::Wall,
        Some("door_corridor") => WayKind::DoorCorridor,
        Some("wall_corridor") => WayKind::WallCorridor,
        Some(other) => {
            warnings.push(MapWarning::new(
                Some(w.line),
                format!("way {}: unknown indoor value {other:?}, way ignored", w.id),
            ));
            return Ok(());
        }
    };
    builder.push_way(MapWay { id: w.id, node_ids: w.refs, kind, name: w.name });
    Ok(())
}

fn raw_attr(e: &BytesStart<'_>, key: &str, line: usize) -> Result<Option<String>, MapError> {
    for attr in e.attributes() {
        let attr = attr.map_err(|err| MapError::Xml { line, message: err.to_string() })?;
        if attr.key.as_ref() == key.as_bytes() {
            let v = attr.unescape_value().map_err(|err| MapError::Xml { line, message: err.to_string() })?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn parse_attr<T: std::str::FromStr>(
    e: &BytesStart<'_>,
    element: &'static str,
    attr: &'static str,
    line: usize,
) -> Result<T, MapError> {
    let raw = raw_attr(e, attr, line)?.ok_or(MapError::MissingAttribute { element, attr, line })?;
    raw.trim().parse().map_err(|_| MapError::InvalidAttribute { element, attr, value: raw, line })
}

fn tag_pair(e: &BytesStart<'_>, line: usize) -> Result<(String, String), MapError> {
    let k = raw_attr(e, "k", line)?.ok_or(MapError::MissingAttribute { element: "tag", attr: "k", line })?;
    let v = raw_attr(e, "v", line)?.ok_or(MapError::MissingAttribute { element: "tag", attr: "v", line })?;
    Ok((k, v))
}

fn escape(s: &str) -> std::borrow::Cow<'_, str> {
    quick_xml::escape::escape(s)
}

/// Serialize a map back into the OSM XML subset, in original document order.
pub fn to_osm_xml(map: &IndoorMap) -> String {
    let mut out = String::new();
    out.push_str("<?xml version='1.0' encoding='UTF-8'?>\n<osm version='0.6' generator='arealoc'>\n");
    for id in &map.node_order {
        let n = &map.nodes[id];
        let mut tags: Vec<(&str, &str)> = Vec::new();
        if let Some(v) = n.kind.tag_value() {
            tags.push(("indoor", v));
        }
        if let NodeKind::Indicator { router } = &n.kind {
            tags.push(("router", router));
        }
        if let Some(name) = &n.name {
            tags.push(("name", name));
        }
        let _ = write!(out, "  <node id='{}' lat='{:.13}' lon='{:.13}'", n.id, n.geo.lat, n.geo.lon);
        if tags.is_empty() {
            out.push_str(" />\n");
        } else {
            out.push_str(">\n");
            for (k, v) in tags {
                let _ = writeln!(out, "    <tag k='{}' v='{}' />", escape(k), escape(v));
            }
            out.push_str("  </node>\n");
        }
    }
    for id in &map.way_order {
        let w = &map.ways[id];
        let _ = writeln!(out, "  <way id='{}'>", w.id);
        for r in &w.node_ids {
            let _ = writeln!(out, "    <nd ref='{r}' />");
        }
        let _ = writeln!(out, "    <tag k='indoor' v='{}' />", w.kind.tag_value());
        if let Some(name) = &w.name {
            let _ = writeln!(out, "    <tag k='name' v='{}' />", escape(name));
        }
        out.push_str("  </way>\n");
    }
    out.push_str("</osm>\n");
    out
}
