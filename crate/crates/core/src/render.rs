//! SVG drawing of a cheese: unit circle, deleted discs, dashed guides at `R_n`.

use std::fmt::Write;

use crate::geometry::SwissCheese;

fn num(x: f64) -> String {
    format!("{x:.9}")
}

/// Renders `cheese` in the box `[-1.05, 1.05]²` with the imaginary axis up.
pub fn render_svg(cheese: &SwissCheese) -> String {
    let mut out = String::new();
    out.push_str(concat!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.05 -1.05 2.1 2.1" width="800" height="800">"#,
        "\n",
        r#"<rect x="-1.05" y="-1.05" width="2.1" height="2.1" fill="white"/>"#,
        "\n",
        r#"<g transform="scale(1,-1)">"#,
        "\n",
        r##"<circle class="unit" cx="0" cy="0" r="1" fill="#f4e3a1" stroke="black" stroke-width="0.004"/>"##,
        "\n",
    ));
    for annulus in cheese.annuli.iter().filter(|a| a.r_n > 0.0) {
        let _ = writeln!(
            out,
            r##"<circle class="guide" data-n="{}" cx="0" cy="0" r="{}" fill="none" stroke="#7a7a7a" stroke-width="0.002" stroke-dasharray="0.02 0.015"/>"##,
            annulus.n,
            num(annulus.r_n)
        );
    }
    for (k, disc) in cheese.discs().enumerate() {
        let _ = writeln!(
            out,
            r##"<circle class="disc" data-index="{k}" cx="{}" cy="{}" r="{}" fill="#203864"/>"##,
            num(disc.center.re),
            num(disc.center.im),
            num(disc.radius)
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
