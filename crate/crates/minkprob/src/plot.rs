//! SVG heat maps with contour lines on triangulated disk data.

use std::fmt::Write;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 20.0;

/// Colour stops of a perceptually ordered dark-blue to yellow ramp.
const STOPS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

fn colour(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let s = t * (STOPS.len() - 1) as f64;
    let i = (s.floor() as usize).min(STOPS.len() - 2);
    let w = s - i as f64;
    let c: Vec<u8> = (0..3).map(|k| ((1.0 - w) * STOPS[i][k] + w * STOPS[i + 1][k]).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Disk coordinates `[-1, 1]²` to SVG pixels (y up).
fn px(x: [f64; 2]) -> (f64, f64) {
    let s = 0.5 * (SIZE - 2.0 * MARGIN);
    (MARGIN + s * (1.0 + x[0]), MARGIN + s * (1.0 - x[1]))
}

/// Heat map of nodal `values` over `triangles`, with `contours` equally
/// spaced iso-lines. Non-finite values are drawn at the bottom colour.
pub fn heat_map(nodes: &[[f64; 2]], triangles: &[[usize; 3]], values: &[f64], title: &str, contours: usize) -> String {
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut s = String::new();
    let h = SIZE + 30.0;
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{h}" viewBox="0 0 {SIZE} {h}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let (cx, cy) = px([0.0, 0.0]);
    let r = 0.5 * (SIZE - 2.0 * MARGIN);
    writeln!(s, r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="none" stroke="#999" stroke-width="0.5"/>"##).unwrap();
    for t in triangles {
        let v = (values[t[0]] + values[t[1]] + values[t[2]]) / 3.0;
        let c = colour((v - lo) / span);
        let pts: Vec<String> = t
            .iter()
            .map(|&i| {
                let (x, y) = px(nodes[i]);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        writeln!(s, r#"<polygon points="{}" fill="{c}" stroke="{c}" stroke-width="0.3"/>"#, pts.join(" ")).unwrap();
    }
    for k in 1..=contours {
        let level = lo + span * k as f64 / (contours + 1) as f64;
        let mut d = String::new();
        for t in triangles {
            let seg = crossing(nodes, values, t, level);
            if let Some((a, b)) = seg {
                let (ax, ay) = px(a);
                let (bx, by) = px(b);
                write!(d, "M{ax:.2} {ay:.2}L{bx:.2} {by:.2}").unwrap();
            }
        }
        if !d.is_empty() {
            writeln!(s, r#"<path d="{d}" fill="none" stroke="black" stroke-width="0.6"/>"#).unwrap();
        }
    }
    writeln!(
        s,
        r#"<text x="{MARGIN}" y="{:.0}" font-family="sans-serif" font-size="12">{} (min {lo:.4e}, max {hi:.4e})</text>"#,
        SIZE + 15.0,
        escape(title)
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

/// Segment where the linear interpolant on triangle `t` equals `level`.
fn crossing(nodes: &[[f64; 2]], values: &[f64], t: &[usize; 3], level: f64) -> Option<([f64; 2], [f64; 2])> {
    let mut pts = Vec::with_capacity(2);
    for e in 0..3 {
        let (i, j) = (t[e], t[(e + 1) % 3]);
        let (a, b) = (values[i] - level, values[j] - level);
        if !(a.is_finite() && b.is_finite()) || (a < 0.0) == (b < 0.0) {
            continue;
        }
        let w = a / (a - b);
        pts.push([
            nodes[i][0] + w * (nodes[j][0] - nodes[i][0]),
            nodes[i][1] + w * (nodes[j][1] - nodes[i][1]),
        ]);
    }
    (pts.len() == 2).then(|| (pts[0], pts[1]))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contour_crosses_the_middle_of_a_ramp() {
        let nodes = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let (a, b) = crossing(&nodes, &[0.0, 1.0, 0.0], &[0, 1, 2], 0.5).unwrap();
        assert_eq!(a[0].max(b[0]), 0.5);
        assert!(crossing(&nodes, &[0.0, 0.0, 0.0], &[0, 1, 2], 0.5).is_none());
    }

    #[test]
    fn svg_is_well_formed_text() {
        let nodes = [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]];
        let s = heat_map(&nodes, &[[0, 1, 2]], &[0.0, 1.0, 2.0], "a < b", 3);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("a &lt; b"));
        assert_eq!(colour(0.0), "#440154");
        assert_eq!(colour(1.0), "#fde725");
    }
}
