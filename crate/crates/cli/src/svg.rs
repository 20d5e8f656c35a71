//! Single-panel line plots.

use starkdisk::analysis::SweepResult;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 140.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLOURS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f",
];

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

pub fn render(result: &SweepResult, title: &str) -> String {
    let (x0, x1) = range(result.grid.iter().copied());
    let (y0, y1) = range(
        result
            .curves
            .iter()
            .flat_map(|c| c.energies.iter().copied()),
    );
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" width=\"{WIDTH}\" height=\"{HEIGHT}\">\n"
    ));
    s.push_str(&format!("<title>{title}</title>\n"));
    s.push_str(&format!(
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>\n"
    ));
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{:.4}</text>\n",
            sx(xv),
            TOP + ph + 18.0,
            xv
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{:.4}</text>\n",
            LEFT - 6.0,
            sy(yv) + 4.0,
            yv
        ));
    }
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        result.parameter_name()
    ));
    s.push_str(&format!(
        "<text x=\"20\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">E</text>\n",
        TOP + ph / 2.0,
        TOP + ph / 2.0
    ));
    for (k, c) in result.curves.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let points: Vec<String> = result
            .grid
            .iter()
            .zip(&c.energies)
            .filter(|(_, e)| e.is_finite())
            .map(|(&x, &e)| format!("{:.2},{:.2}", sx(x), sy(e)))
            .collect();
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"{colour}\">{}</text>\n",
            WIDTH - RIGHT + 10.0,
            TOP + 16.0 * (k as f64 + 1.0),
            c.label
        ));
    }
    s.push_str("</svg>\n");
    s
}
