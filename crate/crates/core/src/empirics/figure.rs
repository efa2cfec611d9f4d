use std::fmt::Write as _;
use std::io::Write;

use super::dataset::ChoiceProblemRecord;
use super::ols::{BandPoint, OlsFit};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureFormat {
    Svg,
    Csv,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

/// Scatter of `(gap, RATL %)` with the fitted line and its band.
pub fn emit_figure<W: Write>(
    records: &[ChoiceProblemRecord],
    fit: &OlsFit,
    band: &[BandPoint],
    mut sink: W,
    format: FigureFormat,
) -> Result<()> {
    if records.is_empty() {
        return Err(Error::invalid("figure needs at least one record"));
    }
    let out = match format {
        FigureFormat::Svg => render_svg(records, fit, band),
        FigureFormat::Csv => render_csv(records, fit, band),
    };
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(())
}

fn render_csv(records: &[ChoiceProblemRecord], fit: &OlsFit, band: &[BandPoint]) -> String {
    let mut s = String::from("series,label,x,y,fitted,half_width\n");
    for r in records {
        let label = if r.label.contains([',', '"']) {
            format!("\"{}\"", r.label.replace('"', "\"\""))
        } else {
            r.label.clone()
        };
        let _ = writeln!(
            s,
            "point,{label},{},{},{},{}",
            r.gap,
            r.ratl_fraction,
            fit.predict(r.gap),
            fit.mean_std_error(r.gap)
        );
    }
    for b in band {
        let _ = writeln!(s, "band,,{},,{},{}", b.x, b.y_hat, b.half_width);
    }
    s
}

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT
            + (x - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT
            - MARGIN_BOTTOM
            - (y - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    let pad = if span > 0.0 { 0.05 * span } else { 1.0 };
    (lo - pad, hi + pad)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn render_svg(records: &[ChoiceProblemRecord], fit: &OlsFit, band: &[BandPoint]) -> String {
    let xs = records
        .iter()
        .map(|r| r.gap)
        .chain(band.iter().map(|b| b.x));
    let (x_lo, x_hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    let ys = records.iter().map(|r| r.ratl_fraction).chain(
        band.iter()
            .flat_map(|b| [b.y_hat - b.half_width, b.y_hat + b.half_width]),
    );
    let (y_lo, y_hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| {
        (lo.min(y), hi.max(y))
    });
    let (x_lo, x_hi) = padded(x_lo, x_hi);
    let (y_lo, y_hi) = padded(y_lo, y_hi);
    let f = Frame {
        x_lo,
        x_hi,
        y_lo,
        y_hi,
    };
    let unit = xml_escape(&records[0].unit_label);

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    s.push_str("<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    if !band.is_empty() {
        let upper = band.iter().map(|b| (b.x, b.y_hat + b.half_width));
        let lower = band.iter().rev().map(|b| (b.x, b.y_hat - b.half_width));
        let pts: Vec<String> = upper
            .chain(lower)
            .map(|(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
            .collect();
        let _ = writeln!(
            s,
            "<polygon class=\"band\" fill=\"#c8c8c8\" fill-opacity=\"0.7\" stroke=\"none\" points=\"{}\"/>",
            pts.join(" ")
        );
    }

    let (x_first, x_last) = match (band.first(), band.last()) {
        (Some(a), Some(b)) => (a.x, b.x),
        _ => (x_lo, x_hi),
    };
    let _ = writeln!(
        s,
        "<line class=\"fit\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"2\"/>",
        f.px(x_first),
        f.py(fit.predict(x_first)),
        f.px(x_last),
        f.py(fit.predict(x_last))
    );

    // axes
    let (ax0, ay0) = (MARGIN_LEFT, HEIGHT - MARGIN_BOTTOM);
    let _ = writeln!(
        s,
        "<line x1=\"{ax0}\" y1=\"{ay0}\" x2=\"{}\" y2=\"{ay0}\" stroke=\"black\"/>",
        WIDTH - MARGIN_RIGHT
    );
    let _ = writeln!(
        s,
        "<line x1=\"{ax0}\" y1=\"{ay0}\" x2=\"{ax0}\" y2=\"{MARGIN_TOP}\" stroke=\"black\"/>"
    );
    for i in 0..=TICKS {
        let t = i as f64 / TICKS as f64;
        let xv = x_lo + t * (x_hi - x_lo);
        let yv = y_lo + t * (y_hi - y_lo);
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{xv:.1}</text>",
            f.px(xv),
            ay0 + 18.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{yv:.0}</text>",
            ax0 - 6.0,
            f.py(yv) + 4.0
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">ensemble − time growth rate ({unit})</text>",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">RATL subjects (%)</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    for r in records {
        let _ = writeln!(
            s,
            "<circle class=\"point\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"black\"><title>{}</title></circle>",
            f.px(r.gap),
            f.py(r.ratl_fraction),
            xml_escape(&r.label)
        );
    }
    let _ = writeln!(
        s,
        "<text class=\"fit-label\" x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\">R² = {:.2}</text>",
        MARGIN_LEFT + 10.0,
        MARGIN_TOP - 12.0,
        fit.r_squared
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirics::ols::{confidence_band, fit_points};

    fn records() -> Vec<ChoiceProblemRecord> {
        [(1.0, 20.0), (2.0, 35.0), (3.0, 33.0), (4.0, 50.0)]
            .iter()
            .enumerate()
            .map(|(i, &(gap, y))| ChoiceProblemRecord {
                label: format!("r{i}"),
                g_ens_i: 1.0,
                g_ens_ii: 1.0 + gap,
                g_time: 1.0,
                gap,
                ratl_fraction: y,
                unit_label: "$/wk".into(),
                exp_t: None,
                dx: None,
                printed_gap: None,
            })
            .collect()
    }

    fn fit(recs: &[ChoiceProblemRecord]) -> OlsFit {
        let xs: Vec<f64> = recs.iter().map(|r| r.gap).collect();
        let ys: Vec<f64> = recs.iter().map(|r| r.ratl_fraction).collect();
        fit_points(&xs, &ys).unwrap()
    }

    #[test]
    fn svg_has_one_mark_per_record_and_is_deterministic() {
        let recs = records();
        let fit = fit(&recs);
        let band = confidence_band(&fit, &[1.0, 2.5, 4.0]);
        let mut a = Vec::new();
        let mut b = Vec::new();
        emit_figure(&recs, &fit, &band, &mut a, FigureFormat::Svg).unwrap();
        emit_figure(&recs, &fit, &band, &mut b, FigureFormat::Svg).unwrap();
        assert_eq!(a, b);
        let svg = String::from_utf8(a).unwrap();
        assert_eq!(svg.matches("<circle").count(), recs.len());
        assert!(svg.contains("$/wk"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn csv_reproduces_predictions() {
        let recs = records();
        let fit = fit(&recs);
        let mut out = Vec::new();
        emit_figure(&recs, &fit, &[], &mut out, FigureFormat::Csv).unwrap();
        let text = String::from_utf8(out).unwrap();
        for (line, r) in text.lines().skip(1).zip(&recs) {
            let cols: Vec<&str> = line.split(',').collect();
            let fitted: f64 = cols[4].parse().unwrap();
            assert_eq!(fitted, fit.intercept + fit.slope * r.gap);
        }
    }

    #[test]
    fn empty_records_rejected() {
        let recs = records();
        let fit = fit(&recs);
        assert!(emit_figure(&[], &fit, &[], Vec::new(), FigureFormat::Svg).is_err());
    }
}
