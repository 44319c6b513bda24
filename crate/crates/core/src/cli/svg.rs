//! Standalone SVG scatter plots.

use std::f64::consts::TAU;
use std::fmt::Write;

/// Colour ramp for the per-point scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ramp {
    /// Hue wheel; suited to angles, where 0 and 2π meet.
    Cyclic,
    /// Viridis-like ramp from dark blue to yellow.
    Sequential,
}

impl std::str::FromStr for Ramp {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cyclic" => Ok(Ramp::Cyclic),
            "sequential" => Ok(Ramp::Sequential),
            _ => Err(format!("expected cyclic or sequential, got {s:?}")),
        }
    }
}

const VIRIDIS: [[f64; 3]; 9] = [
    [0.267, 0.005, 0.329],
    [0.279, 0.175, 0.483],
    [0.230, 0.322, 0.546],
    [0.173, 0.449, 0.558],
    [0.128, 0.567, 0.551],
    [0.153, 0.681, 0.503],
    [0.361, 0.786, 0.388],
    [0.667, 0.862, 0.196],
    [0.993, 0.906, 0.144],
];

fn sequential(u: f64) -> [f64; 3] {
    let x = u.clamp(0.0, 1.0) * (VIRIDIS.len() - 1) as f64;
    let i = (x.floor() as usize).min(VIRIDIS.len() - 2);
    let f = x - i as f64;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    [0, 1, 2].map(|c| a[c] + f * (b[c] - a[c]))
}

/// HSV with full value and fixed saturation, hue = `u` turns.
fn cyclic(u: f64) -> [f64; 3] {
    let h = u.rem_euclid(1.0) * 6.0;
    let (s, v) = (0.85, 0.9);
    let c = v * s;
    let x = c * (1.0 - (h % 2.0 - 1.0).abs());
    let m = v - c;
    let (r, g, b) = match h as usize {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    [r + m, g + m, b + m]
}

fn hex(rgb: [f64; 3]) -> String {
    let [r, g, b] = rgb.map(|c| (c.clamp(0.0, 1.0) * 255.0).round() as u8);
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Maps each value to a colour. Cyclic ramps read values as angles in
/// radians; sequential ramps stretch the observed range.
pub fn colors(values: &[f64], ramp: Ramp) -> Vec<String> {
    match ramp {
        Ramp::Cyclic => values.iter().map(|v| hex(cyclic(v / TAU))).collect(),
        Ramp::Sequential => {
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let span = if hi > lo { hi - lo } else { 1.0 };
            values
                .iter()
                .map(|v| hex(sequential((v - lo) / span)))
                .collect()
        }
    }
}

pub const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;

/// Scatter of `(x[i], y[i])` with one `<circle>` per point.
pub fn scatter(x: &[f64], y: &[f64], fills: &[String], title: &str) -> String {
    let span = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, if hi > lo { hi - lo } else { 1.0 })
    };
    let (x0, xs) = span(x);
    let (y0, ys) = span(y);
    let inner = SIZE - 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    for i in 0..x.len() {
        let px = MARGIN + (x[i] - x0) / xs * inner;
        let py = SIZE - MARGIN - (y[i] - y0) / ys * inner;
        let _ = writeln!(
            s,
            r#"<circle cx="{px:.2}" cy="{py:.2}" r="2.5" fill="{}"/>"#,
            fills[i]
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
