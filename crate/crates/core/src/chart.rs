//! Self-contained SVG bar charts: fixed canvas, 0.0-1.0 axis with 0.1
//! gridlines, grouped bars in series order. Rendering is a pure function
//! of the inputs, so identical series give byte-identical documents.

use crate::report::ReportError;

/// Fixed series palette, in series order.
const PALETTE: [&str; 6] = [
    "#4e79a7", "#f28e2b", "#59a14c", "#e15759", "#b07aa1", "#76b7b2",
];

/// Validated chart input: category labels plus named series of values in
/// `[0, 1]`, one value per label.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSeries {
    title: String,
    labels: Vec<String>,
    series: Vec<(String, Vec<f64>)>,
}

impl ChartSeries {
    pub fn new(
        title: impl Into<String>,
        labels: Vec<String>,
        series: Vec<(String, Vec<f64>)>,
    ) -> Result<Self, ReportError> {
        if labels.is_empty() || series.is_empty() {
            return Err(ReportError::EmptySeries);
        }
        for (name, values) in &series {
            if values.len() != labels.len() {
                return Err(ReportError::LengthMismatch {
                    name: name.clone(),
                    len: values.len(),
                    labels: labels.len(),
                });
            }
            for value in values {
                if !value.is_finite() || !(0.0..=1.0).contains(value) {
                    return Err(ReportError::InvalidValue {
                        name: name.clone(),
                        value: *value,
                    });
                }
            }
        }
        Ok(ChartSeries {
            title: title.into(),
            labels,
            series,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn series(&self) -> &[(String, Vec<f64>)] {
        &self.series
    }
}

/// Canvas dimensions; everything else is fixed layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartStyle {
    pub width: f64,
    pub height: f64,
}

impl Default for ChartStyle {
    fn default() -> Self {
        ChartStyle {
            width: 900.0,
            height: 480.0,
        }
    }
}

fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Render a grouped bar chart as a standalone SVG document.
pub fn render_bar_chart(series: &ChartSeries, style: &ChartStyle) -> String {
    let width = style.width;
    let height = style.height;
    let left = 62.0;
    let right = 16.0;
    let top = 42.0;
    let bottom = 86.0;
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let baseline = top + plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        width / 2.0,
        xml_escape(&series.title)
    ));

    // Horizontal gridlines and tick labels at 0.1 steps.
    for step in 0..=10 {
        let value = step as f64 / 10.0;
        let y = baseline - value * plot_h;
        let stroke = if step == 0 { "#444444" } else { "#d8d8d8" };
        svg.push_str(&format!(
            "  <line x1=\"{left}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"{stroke}\" stroke-width=\"1\"/>\n",
            left + plot_w
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{value:.1}</text>\n",
            left - 8.0,
            y + 4.0
        ));
    }
    // Y axis.
    svg.push_str(&format!(
        "  <line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{baseline}\" stroke=\"#444444\" stroke-width=\"1\"/>\n"
    ));

    let n_labels = series.labels.len() as f64;
    let n_series = series.series.len() as f64;
    let slot_w = plot_w / n_labels;
    let group_w = slot_w * 0.84;
    let bar_w = group_w / n_series;
    let rotate_labels = series.labels.iter().any(|l| l.chars().count() > 10);

    for (series_index, (_, values)) in series.series.iter().enumerate() {
        let fill = PALETTE[series_index % PALETTE.len()];
        for (label_index, value) in values.iter().enumerate() {
            let bar_h = value * plot_h;
            let x = left + label_index as f64 * slot_w + slot_w * 0.08 + series_index as f64 * bar_w;
            let y = baseline - bar_h;
            svg.push_str(&format!(
                "  <rect class=\"bar\" x=\"{x}\" y=\"{y}\" width=\"{bar_w}\" height=\"{bar_h}\" fill=\"{fill}\"/>\n"
            ));
        }
    }

    for (label_index, label) in series.labels.iter().enumerate() {
        let x = left + (label_index as f64 + 0.5) * slot_w;
        let y = baseline + 16.0;
        if rotate_labels {
            svg.push_str(&format!(
                "  <text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\" transform=\"rotate(-30 {x} {y})\">{}</text>\n",
                xml_escape(label)
            ));
        } else {
            svg.push_str(&format!(
                "  <text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
                xml_escape(label)
            ));
        }
    }

    // Legend row under the label band.
    let mut legend_x = left;
    let legend_y = height - 18.0;
    for (series_index, (name, _)) in series.series.iter().enumerate() {
        let fill = PALETTE[series_index % PALETTE.len()];
        svg.push_str(&format!(
            "  <rect x=\"{legend_x}\" y=\"{}\" width=\"11\" height=\"11\" fill=\"{fill}\"/>\n",
            legend_y - 10.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{legend_y}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            legend_x + 16.0,
            xml_escape(name)
        ));
        legend_x += 16.0 + 7.0 * name.chars().count() as f64 + 22.0;
    }

    svg.push_str("</svg>\n");
    svg
}
