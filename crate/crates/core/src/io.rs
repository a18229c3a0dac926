//! Report emitters: CSV tables, pretty JSON and minimal log-log SVG plots.
//!
//! Output is a pure function of the inputs (shortest round-trip float
//! formatting, fixed field order), so repeated runs are byte-identical.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::bounds::{BoundReport, DichotomyReport};
use crate::convolution::ConvPower;
use crate::density::{DensityGrid, Method};
use crate::error::{LevyError, Result};
use crate::exponent::{ExponentTable, TimeScale};
use crate::verdict::RatioPoint;

/// JSON schemas of the emitted documents, by file name.
pub const SCHEMAS: &[(&str, &str)] = &[
    ("model_config.schema.json", include_str!("../schemas/model_config.schema.json")),
    ("condition_report.schema.json", include_str!("../schemas/condition_report.schema.json")),
    ("bound_report.schema.json", include_str!("../schemas/bound_report.schema.json")),
    ("dichotomy_report.schema.json", include_str!("../schemas/dichotomy_report.schema.json")),
    ("density_meta.schema.json", include_str!("../schemas/density_meta.schema.json")),
    ("conv_power_meta.schema.json", include_str!("../schemas/conv_power_meta.schema.json")),
];

pub fn schema(name: &str) -> Option<&'static str> {
    SCHEMAS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

fn io_err(e: impl std::fmt::Display) -> LevyError {
    LevyError::Io(e.to_string())
}

fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn csv_writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(header).map_err(io_err)?;
    Ok(out)
}

/// `rho,re_phi,psi` for every table node.
pub fn write_exponent_csv<W: Write>(table: &ExponentTable, w: W) -> Result<()> {
    let mut out = csv_writer(w, &["rho", "re_phi", "psi"])?;
    for ((r, p), s) in table.radii().iter().zip(table.re_phi_values()).zip(table.psi_values()) {
        out.write_record([num(*r), num(*p), num(*s)]).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn write_timescale_csv<W: Write>(scales: &[TimeScale], w: W) -> Result<()> {
    let mut out = csv_writer(w, &["t", "h"])?;
    for s in scales {
        out.write_record([num(s.t), num(s.h)]).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// `x,p,method,err_flag` with `x` shifted by the drift.
pub fn write_density_csv<W: Write>(p: &DensityGrid, w: W) -> Result<()> {
    let mut out = csv_writer(w, &["x", "p", "method", "err_flag"])?;
    for j in 0..p.grid.len() {
        out.write_record([
            num(p.grid.x(j) + p.shift),
            num(p.values[j]),
            p.method.name().to_string(),
            u8::from(p.err_flags[j]).to_string(),
        ])
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// `x,mass,density` of a convolution power on its grid.
pub fn write_conv_power_csv<W: Write>(c: &ConvPower, w: W) -> Result<()> {
    let mut out = csv_writer(w, &["x", "mass", "density"])?;
    for (j, m) in c.values.iter().enumerate() {
        out.write_record([num(c.grid.x(j)), num(*m), num(m / c.grid.dx)]).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn write_ratio_csv<W: Write>(pts: &[RatioPoint], w: W) -> Result<()> {
    let mut out = csv_writer(w, &["x", "ratio"])?;
    for p in pts {
        out.write_record([num(p.x), num(p.ratio)]).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Long-format ratio curves of a bound report: `t,kind,x,ratio`.
pub fn write_bound_curves_csv<W: Write>(r: &BoundReport, w: W) -> Result<()> {
    let mut out = csv_writer(w, &["t", "kind", "x", "ratio"])?;
    for s in &r.slices {
        for (kind, pts) in [("near", &s.near), ("far", &s.far), ("min_form", &s.min_form)] {
            for p in pts.iter() {
                out.write_record([num(s.t), kind.to_string(), num(p.x), num(p.ratio)]).map_err(io_err)?;
            }
        }
    }
    out.flush().map_err(io_err)
}

/// `model,x,ratio` for both arms of a dichotomy run.
pub fn write_dichotomy_csv<W: Write>(r: &DichotomyReport, w: W) -> Result<()> {
    let mut out = csv_writer(w, &["model", "x", "ratio"])?;
    for (name, arm) in [("critical", &r.critical), ("subcritical", &r.subcritical)] {
        for p in &arm.curve {
            out.write_record([name.to_string(), num(p.x), num(p.ratio)]).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(io_err)?;
    s.push('\n');
    Ok(s)
}

/// Scalar summary of a density run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMeta {
    pub t: f64,
    pub method: Method,
    pub dx: f64,
    pub x_max: f64,
    pub points: usize,
    pub shift: f64,
    pub r: Option<f64>,
    pub mass: f64,
    pub error_budget: f64,
    pub flagged: usize,
    pub clipped: usize,
}

impl DensityMeta {
    pub fn of(p: &DensityGrid) -> Self {
        DensityMeta {
            t: p.t,
            method: p.method,
            dx: p.grid.dx,
            x_max: p.grid.x_max(),
            points: p.grid.len(),
            shift: p.shift,
            r: p.r,
            mass: p.mass(),
            error_budget: p.error_budget,
            flagged: p.err_flags.iter().filter(|f| **f).count(),
            clipped: p.clipped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvPowerMeta {
    pub n: usize,
    pub r: f64,
    pub dx: f64,
    pub x_max: f64,
    pub mass: f64,
    /// `|ν̄_r|ⁿ`.
    pub expected_mass: f64,
    pub leaked: f64,
}

/// One polyline of a plot.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 56.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Log-log plot of positive points; tick labels are `log10` values.
pub fn svg_loglog(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let logged: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
                .map(|(x, y)| (x.log10(), y.log10()))
                .collect()
        })
        .collect();
    let all = logged.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    s += &format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n");
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += &format!("<text x=\"{}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n", W / 2.0, escape(title));
    s += &format!(
        "<polyline points=\"{PAD},{PAD} {PAD},{} {},{}\" fill=\"none\" stroke=\"black\"/>\n",
        H - PAD,
        W - PAD,
        H - PAD
    );
    let step = |lo: f64, hi: f64| ((hi - lo) / 8.0).ceil().max(1.0);
    let sx = step(x0, x1);
    let mut k = x0;
    while k <= x1 + 1e-9 {
        s += &format!(
            "<text x=\"{:.1}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            px(k),
            H - PAD + 16.0,
            k
        );
        k += sx;
    }
    let sy = step(y0, y1);
    let mut k = y0;
    while k <= y1 + 1e-9 {
        s += &format!(
            "<text x=\"{}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            PAD - 6.0,
            py(k) + 4.0,
            k
        );
        k += sy;
    }
    s += &format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">log10 {}</text>\n",
        W / 2.0,
        H - 12.0,
        escape(x_label)
    );
    s += &format!(
        "<text x=\"14\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">log10 {}</text>\n",
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    for (i, (ser, pts)) in series.iter().zip(&logged).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        s += &format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            coords.join(" ")
        );
        s += &format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{color}\">{}</text>\n",
            W - PAD - 120.0,
            PAD + 14.0 * i as f64,
            escape(ser.label)
        );
    }
    s += "</svg>\n";
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1;

    #[test]
    fn density_csv_layout() {
        let grid = Grid1::new(0.5, 1).unwrap();
        let p = DensityGrid {
            t: 0.1,
            grid,
            values: vec![0.25, 1.5, 0.25],
            err_flags: vec![true, false, true],
            method: Method::Split,
            shift: 0.1,
            r: Some(1.0),
            error_budget: 0.0,
            clipped: 0,
        };
        let mut buf = Vec::new();
        write_density_csv(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x,p,method,err_flag\n-0.4,0.25,split,1\n0.1,1.5,split,0\n0.6,0.25,split,1\n");
        let meta = DensityMeta::of(&p);
        assert_eq!(meta.flagged, 2);
        assert!((meta.mass - 1.0).abs() < 1e-15);
    }

    #[test]
    fn svg_is_deterministic_and_skips_nonpositive() {
        let pts = [(0.0, 1.0), (1.0, 1.0), (10.0, 0.1), (100.0, 0.01)];
        let a = svg_loglog("t", "x", "p", &[Series { label: "a", points: &pts }]);
        let b = svg_loglog("t", "x", "p", &[Series { label: "a", points: &pts }]);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("log10 x"));
        let line = a.lines().find(|l| l.contains("stroke-width")).unwrap();
        assert_eq!(line.matches(',').count(), 3);
    }

    #[test]
    fn schemas_parse() {
        for (name, text) in SCHEMAS {
            let v: serde_json::Value = serde_json::from_str(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(v.get("$schema").is_some(), "{name}");
        }
    }
}
