//! Minimal self-contained SVG scatter rendering (no plotting dependency).

/// Predicted-vs-experimental scatter. The identity diagonal is always drawn;
/// `band` adds two dashed lines at identity ± band (the ±10 s acceptance
/// corridor for disintegration time).
pub struct ScatterPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    pub band: Option<f64>,
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;

impl ScatterPlot {
    pub fn render(&self) -> String {
        let (mut lo, mut hi) = self
            .points
            .iter()
            .flat_map(|&(x, y)| [x, y])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        if !lo.is_finite() || !hi.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        if hi - lo < 1e-9 {
            hi = lo + 1.0;
        }
        let pad = 0.05 * (hi - lo);
        let (lo, hi) = (lo - pad, hi + pad);
        let scale = (W - 2.0 * MARGIN) / (hi - lo);
        let px = |v: f64| MARGIN + (v - lo) * scale;
        let py = |v: f64| H - MARGIN - (v - lo) * scale;

        let mut s = String::new();
        s.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
        ));
        s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>\n",
            W / 2.0,
            xml_escape(&self.title)
        ));

        // axes
        s.push_str(&format!(
            "<line x1=\"{m:.2}\" y1=\"{b:.2}\" x2=\"{r:.2}\" y2=\"{b:.2}\" stroke=\"black\"/>\n",
            m = MARGIN,
            b = H - MARGIN,
            r = W - MARGIN
        ));
        s.push_str(&format!(
            "<line x1=\"{m:.2}\" y1=\"{t:.2}\" x2=\"{m:.2}\" y2=\"{b:.2}\" stroke=\"black\"/>\n",
            m = MARGIN,
            t = MARGIN,
            b = H - MARGIN
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            W / 2.0,
            H - 18.0,
            xml_escape(&self.x_label)
        ));
        s.push_str(&format!(
            "<text x=\"18\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 18 {:.2})\">{}</text>\n",
            H / 2.0,
            H / 2.0,
            xml_escape(&self.y_label)
        ));

        // axis extent labels
        for (v, x, y, anchor) in [
            (lo, px(lo), H - MARGIN + 16.0, "middle"),
            (hi, px(hi), H - MARGIN + 16.0, "middle"),
        ] {
            s.push_str(&format!(
                "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"10\">{v:.1}</text>\n"
            ));
        }

        // identity diagonal
        s.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888888\"/>\n",
            px(lo),
            py(lo),
            px(hi),
            py(hi)
        ));
        // dashed acceptance band
        if let Some(band) = self.band {
            for offset in [band, -band] {
                let y1 = (lo + offset).clamp(lo, hi);
                let x1 = y1 - offset;
                let y2 = (hi + offset).clamp(lo, hi);
                let x2 = y2 - offset;
                s.push_str(&format!(
                    "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#555555\" stroke-dasharray=\"6 4\"/>\n",
                    px(x1),
                    py(y1),
                    px(x2),
                    py(y2)
                ));
            }
        }

        for &(x, y) in &self.points {
            s.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.75\"/>\n",
                px(x),
                py(y)
            ));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_renders_two_dashed_lines() {
        let plot = ScatterPlot {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            points: vec![(10.0, 12.0), (40.0, 35.0)],
            band: Some(10.0),
        };
        let svg = plot.render();
        assert_eq!(svg.matches("stroke-dasharray").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn no_band_means_no_dashes() {
        let plot = ScatterPlot {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            points: vec![(1.0, 1.0)],
            band: None,
        };
        assert_eq!(plot.render().matches("stroke-dasharray").count(), 0);
    }

    #[test]
    fn render_is_deterministic() {
        let plot = ScatterPlot {
            title: "d".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            points: vec![(0.123456789, 0.987654321)],
            band: Some(10.0),
        };
        assert_eq!(plot.render(), plot.render());
    }
}
