//! Result rendering: fixed-schema CSV, JSON, and dependency-free SVG line
//! plots of accuracy versus the swept SNR.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Record, SweepResult};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "pipeline,snr_s_db,snr_c_db,seed,attack,param,metric,value";

/// Writes records with the fixed column order and 6-decimal values.
pub fn render_csv(res: &SweepResult, path: &Path) -> Result<()> {
    if res.records.is_empty() {
        return Err(Error::Config("render over empty result set".into()));
    }
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &res.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.6}",
            r.pipeline,
            r.snr_s_db,
            r.snr_c_db,
            r.seed,
            r.attack.as_deref().unwrap_or(""),
            r.param.as_deref().unwrap_or(""),
            r.metric,
            r.value
        )
        .expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads back a CSV produced by [`render_csv`].
pub fn parse_csv(path: &Path) -> Result<SweepResult> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::Corrupt(format!("unexpected CSV header {other:?}"))),
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Corrupt(format!("line {}: {} fields", i + 2, fields.len())));
        }
        let parse_f64 = |s: &str, what: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Corrupt(format!("line {}: bad {what} {s:?}", i + 2)))
        };
        records.push(Record {
            pipeline: fields[0].to_string(),
            snr_s_db: parse_f64(fields[1], "snr_s_db")?,
            snr_c_db: parse_f64(fields[2], "snr_c_db")?,
            seed: fields[3]
                .parse()
                .map_err(|_| Error::Corrupt(format!("line {}: bad seed", i + 2)))?,
            attack: non_empty(fields[4]),
            param: non_empty(fields[5]),
            metric: fields[6].to_string(),
            value: parse_f64(fields[7], "value")?,
        });
    }
    Ok(SweepResult { records })
}

fn non_empty(s: &str) -> Option<String> {
    (!s.is_empty()).then(|| s.to_string())
}

/// Writes the records as pretty-printed JSON.
pub fn render_json(res: &SweepResult, path: &Path) -> Result<()> {
    if res.records.is_empty() {
        return Err(Error::Config("render over empty result set".into()));
    }
    fs::write(path, serde_json::to_string_pretty(res)?)?;
    Ok(())
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 480.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// Renders one self-contained SVG per sensing SNR: clean task accuracy
/// versus SNR_c, one polyline per pipeline (seed-averaged). Returns the
/// written file paths.
pub fn render_svg(res: &SweepResult, dir: &Path) -> Result<Vec<PathBuf>> {
    let clean: Vec<&Record> = res
        .records
        .iter()
        .filter(|r| r.attack.is_none() && r.metric == "accuracy")
        .collect();
    if clean.is_empty() {
        return Err(Error::Config("no clean accuracy records to plot".into()));
    }
    fs::create_dir_all(dir)?;
    let snr_s_values: BTreeSet<u64> = clean.iter().map(|r| r.snr_s_db.to_bits()).collect();
    let mut written = Vec::new();
    for snr_s_bits in snr_s_values {
        let snr_s = f64::from_bits(snr_s_bits);
        let subset: Vec<&&Record> =
            clean.iter().filter(|r| r.snr_s_db == snr_s).collect();
        let pipelines: BTreeSet<&str> =
            subset.iter().map(|r| r.pipeline.as_str()).collect();
        let xs: BTreeSet<i64> =
            subset.iter().map(|r| (r.snr_c_db * 1e6) as i64).collect();
        let xs: Vec<f64> = xs.into_iter().map(|v| v as f64 / 1e6).collect();
        let (x_min, x_max) = (xs[0], *xs.last().expect("nonempty"));
        let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };
        let plot_w = SVG_W - MARGIN_L - MARGIN_R;
        let plot_h = SVG_H - MARGIN_T - MARGIN_B;
        let px = |x: f64| MARGIN_L + (x - x_min) / x_span * plot_w;
        let py = |y: f64| MARGIN_T + (1.0 - y) * plot_h;

        let mut svg = String::new();
        writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">"
        )
        .expect("string write");
        writeln!(svg, "<rect width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>").unwrap();
        writeln!(
            svg,
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">Task accuracy vs SNR_c (SNR_s = {snr_s} dB)</text>",
            MARGIN_L + plot_w / 2.0
        )
        .unwrap();
        // axes
        writeln!(
            svg,
            "<line x1=\"{MARGIN_L}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
            MARGIN_T + plot_h,
            MARGIN_L + plot_w,
            MARGIN_T + plot_h
        )
        .unwrap();
        writeln!(
            svg,
            "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{}\" stroke=\"black\"/>",
            MARGIN_T + plot_h
        )
        .unwrap();
        // y ticks every 0.2
        for i in 0..=5 {
            let y = i as f64 * 0.2;
            writeln!(
                svg,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{MARGIN_L}\" y2=\"{}\" stroke=\"black\"/>\
                 <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{y:.1}</text>",
                MARGIN_L - 5.0,
                py(y),
                py(y),
                MARGIN_L - 8.0,
                py(y) + 4.0
            )
            .unwrap();
        }
        // x ticks at grid values
        for &x in &xs {
            writeln!(
                svg,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\
                 <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{x}</text>",
                px(x),
                MARGIN_T + plot_h,
                px(x),
                MARGIN_T + plot_h + 5.0,
                px(x),
                MARGIN_T + plot_h + 18.0
            )
            .unwrap();
        }
        writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">SNR_c (dB)</text>",
            MARGIN_L + plot_w / 2.0,
            SVG_H - 12.0
        )
        .unwrap();
        writeln!(
            svg,
            "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 {})\">Task accuracy</text>",
            MARGIN_T + plot_h / 2.0,
            MARGIN_T + plot_h / 2.0
        )
        .unwrap();
        // one polyline per pipeline, seed-averaged
        for (pi, pipeline) in pipelines.iter().enumerate() {
            let color = PALETTE[pi % PALETTE.len()];
            let mut pts = String::new();
            for &x in &xs {
                let vals: Vec<f64> = subset
                    .iter()
                    .filter(|r| r.pipeline == *pipeline && r.snr_c_db == x)
                    .map(|r| r.value)
                    .collect();
                if vals.is_empty() {
                    continue;
                }
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                write!(pts, "{:.2},{:.2} ", px(x), py(mean)).unwrap();
            }
            writeln!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>",
                pts.trim_end()
            )
            .unwrap();
            let ly = MARGIN_T + 14.0 + pi as f64 * 18.0;
            writeln!(
                svg,
                "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\
                 <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{pipeline}</text>",
                SVG_W - MARGIN_R + 10.0,
                SVG_W - MARGIN_R + 34.0,
                SVG_W - MARGIN_R + 40.0,
                ly + 4.0
            )
            .unwrap();
        }
        writeln!(svg, "</svg>").unwrap();

        let name = format!("accuracy_vs_snrc_snrs_{}.svg", fmt_snr(snr_s));
        let path = dir.join(name);
        fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}

fn fmt_snr(v: f64) -> String {
    format!("{v}").replace(['.', '-'], "_")
}
