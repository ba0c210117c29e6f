//! Deterministic text output: six-significant-digit numbers, LF line
//! endings, fixed column order, atomic file replacement.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::MetricsReport;
use crate::sim::SimulationResult;

/// Formats like C's `%.6g`.
pub fn fmt_g(x: f64) -> String {
    const DIGITS: i32 = 6;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // exponent after rounding to six digits
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A table of already formatted cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
    }
}

/// Writes `contents` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", file_name.to_string_lossy(), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(contents).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    std::fs::rename(&tmp, path).map_err(io_err)
}

/// Time series of one simulation, every sample including warm-up.
pub fn simulation_table(result: &SimulationResult) -> Table {
    let b = result.num_blades;
    let mut header = vec!["time_s".to_string(), "psi_blade1_deg".into(), "ospl_bar_db".into()];
    header.extend((1..=b).map(|i| format!("pitch_blade{i}_deg")));
    header.extend((1..=b).map(|i| format!("ospl_bar_blade{i}_db")));
    header.push("power_w".into());
    let mut t = Table::new(header);
    for s in &result.samples {
        let mut row = vec![fmt_g(s.time), fmt_g(s.psi_blade1.to_degrees()), fmt_g(s.ospl_bar())];
        row.extend(s.pitches.iter().map(|&p| fmt_g(p)));
        row.extend(s.single_blade_ospl().into_iter().map(fmt_g));
        row.push(fmt_g(s.power));
        t.push(row);
    }
    t
}

/// Footprint of every cone at every sample.
pub fn cone_table(result: &SimulationResult) -> Table {
    let mut t = Table::new(["time_s", "blade", "center_x", "center_y", "radius_m", "area_m2"]);
    for s in &result.samples {
        for c in &s.cones.cones {
            t.push(vec![
                fmt_g(s.time),
                (c.blade_index + 1).to_string(),
                fmt_g(c.surface_center.0),
                fmt_g(c.surface_center.1),
                fmt_g(c.surface_radius),
                fmt_g(c.area),
            ]);
        }
    }
    t
}

/// Ring observer spectra; observer ids run blade-major from 0.
/// Empty unless the simulation recorded ring spectra.
pub fn spectrum_table(result: &SimulationResult) -> Table {
    let mut t = Table::new(["time_s", "observer_id", "blade", "band_hz", "spl_db"]);
    for s in &result.samples {
        let Some(rings) = &s.ring_spectra else { continue };
        let mut id = 0usize;
        for (b, ring) in rings.iter().enumerate() {
            for spec in ring {
                for (f, l) in spec.band_centers.iter().zip(spec.spl()) {
                    t.push(vec![fmt_g(s.time), id.to_string(), (b + 1).to_string(), fmt_g(*f), fmt_g(l)]);
                }
                id += 1;
            }
        }
    }
    t
}

/// One row per report; one weighted-level column per hearing group of
/// the first report.
pub fn report_table(reports: &[MetricsReport]) -> Table {
    let groups: Vec<String> = reports
        .first()
        .map(|r| r.weighted_ospl_hat.iter().map(|w| w.group.clone()).collect())
        .unwrap_or_default();
    let mut header: Vec<String> = ["turbine", "strategy", "power_loss_pct", "ospl_hat_db", "am_db"]
        .into_iter()
        .map(String::from)
        .collect();
    header.extend(groups.iter().map(|g| format!("ospl_hat_{g}_db")));
    let mut t = Table::new(header);
    for r in reports {
        let mut row = vec![
            r.turbine.clone(),
            r.strategy.clone(),
            fmt_g(r.power_loss),
            fmt_g(r.ospl_hat),
            fmt_g(r.am_depth),
        ];
        row.extend(groups.iter().map(|g| r.weighted(g).map(fmt_g).unwrap_or_default()));
        t.push(row);
    }
    t
}

#[derive(Serialize)]
struct ReportJson<'a> {
    schema_version: u32,
    reports: &'a [MetricsReport],
}

pub fn reports_json(reports: &[MetricsReport]) -> String {
    let mut s = serde_json::to_string_pretty(&ReportJson {
        schema_version: crate::config::SCHEMA_VERSION,
        reports,
    })
    .expect("reports serialize");
    s.push('\n');
    s
}
