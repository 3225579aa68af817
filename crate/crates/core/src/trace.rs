//! Line-oriented trace files: IMU samples and RSSI scans as JSON lines, and
//! ground truth as CSV.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::AreaLabel;
use crate::signal::SensorSample;
use crate::wifi::RssiScan;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("truth row {row}: {message}")]
    Truth { row: usize, message: String },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct ImuLine {
    t: f64,
    ax: f64,
    ay: f64,
    az: f64,
    gx: f64,
    gy: f64,
    gz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScanLine {
    t: f64,
    rssi: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Line {
    Scan(ScanLine),
    Imu(ImuLine),
}

/// IMU samples and RSSI scans, each in time order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub samples: Vec<SensorSample>,
    pub scans: Vec<RssiScan>,
}

impl Trace {
    pub fn parse(text: &str) -> Result<Trace, TraceError> {
        Self::read(text.as_bytes())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Trace, TraceError> {
        let mut trace = Trace::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            let parsed: Line =
                serde_json::from_str(text).map_err(|e| TraceError::Parse { line: i + 1, message: e.to_string() })?;
            match parsed {
                Line::Imu(s) => {
                    trace.samples.push(SensorSample { t: s.t, accel: [s.ax, s.ay, s.az], gyro: [s.gx, s.gy, s.gz] })
                }
                Line::Scan(s) => {
                    if let Some((id, v)) = s.rssi.iter().find(|(_, v)| !(-100.0..=0.0).contains(*v)) {
                        return Err(TraceError::Parse {
                            line: i + 1,
                            message: format!("RSSI {v} for {id:?} outside [-100, 0] dBm"),
                        });
                    }
                    trace.scans.push(RssiScan { t: s.t, readings: s.rssi })
                }
            }
        }
        Ok(trace)
    }

    /// Write samples and scans merged by time; a scan goes before a sample at the same instant.
    pub fn write<W: Write>(&self, mut w: W) -> Result<(), TraceError> {
        let mut scans = self.scans.iter().peekable();
        for s in &self.samples {
            while let Some(scan) = scans.next_if(|sc| sc.t <= s.t) {
                write_scan(&mut w, scan)?;
            }
            let line = ImuLine {
                t: s.t,
                ax: s.accel[0],
                ay: s.accel[1],
                az: s.accel[2],
                gx: s.gyro[0],
                gy: s.gyro[1],
                gz: s.gyro[2],
            };
            serde_json::to_writer(&mut w, &line).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        for scan in scans {
            write_scan(&mut w, scan)?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }
}

fn write_scan<W: Write>(w: &mut W, scan: &RssiScan) -> Result<(), TraceError> {
    let line = ScanLine { t: scan.t, rssi: scan.readings.clone() };
    serde_json::to_writer(&mut *w, &line).map_err(std::io::Error::from)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// True state after step `step` (row 0 is the start).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthRow {
    pub step: usize,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub area: AreaLabel,
    /// Scripted waypoint, used as a reference point for error measurement.
    pub reference: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct TruthRecord {
    step: usize,
    x: f64,
    y: f64,
    theta: f64,
    area_label: String,
    #[serde(rename = "ref", default)]
    reference: u8,
}

pub fn write_truth<W: Write>(rows: &[TruthRow], w: W) -> Result<(), TraceError> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(TruthRecord {
            step: r.step,
            x: r.x,
            y: r.y,
            theta: r.theta,
            area_label: r.area.to_string(),
            reference: r.reference as u8,
        })?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_truth<R: std::io::Read>(r: R) -> Result<Vec<TruthRow>, TraceError> {
    let mut rows = Vec::new();
    for (i, rec) in csv::Reader::from_reader(r).deserialize::<TruthRecord>().enumerate() {
        let rec = rec?;
        let area = rec.area_label.parse().map_err(|message| TraceError::Truth { row: i, message })?;
        if rec.step != i {
            return Err(TraceError::Truth { row: i, message: format!("expected step {i}, found {}", rec.step) });
        }
        rows.push(TruthRow {
            step: rec.step,
            x: rec.x,
            y: rec.y,
            theta: rec.theta,
            area,
            reference: rec.reference != 0,
        });
    }
    if rows.is_empty() {
        return Err(TraceError::Truth { row: 0, message: "truth file has no rows".into() });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::Direction;

    #[test]
    fn jsonl_round_trip_interleaves_by_time() {
        let trace = Trace {
            samples: vec![
                SensorSample { t: 0.0, accel: [0.0, 0.0, 1.0], gyro: [0.0, 0.0, 0.1] },
                SensorSample { t: 0.02, accel: [0.01, 0.0, 0.98], gyro: [0.0, 0.0, -0.1] },
            ],
            scans: vec![RssiScan { t: 0.02, readings: [("ap".to_string(), -41.5)].into() }],
        };
        let text = trace.to_jsonl();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].contains("rssi"));
        assert_eq!(Trace::parse(&text).unwrap(), trace);
    }

    #[test]
    fn bad_lines_report_their_number() {
        let err =
            Trace::parse("{\"t\":0,\"ax\":0,\"ay\":0,\"az\":1,\"gx\":0,\"gy\":0,\"gz\":0}\n{\"t\":1}\n").unwrap_err();
        assert!(matches!(err, TraceError::Parse { line: 2, .. }), "{err}");
        let err = Trace::parse("{\"t\":1,\"rssi\":{\"a\":5}}").unwrap_err();
        assert!(err.to_string().contains("outside"));
    }

    #[test]
    fn truth_csv_round_trip() {
        let rows = vec![
            TruthRow {
                step: 0,
                x: 0.0,
                y: 0.0,
                theta: 0.0,
                area: AreaLabel::Corridor { corridor: 1, direction: Direction::Fwd },
                reference: true,
            },
            TruthRow { step: 1, x: 0.7, y: 0.0, theta: 0.0, area: AreaLabel::OpenArea { room: 7 }, reference: false },
        ];
        let mut buf = Vec::new();
        write_truth(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("step,x,y,theta,area_label,ref\n"));
        assert_eq!(read_truth(&buf[..]).unwrap(), rows);
    }
}
