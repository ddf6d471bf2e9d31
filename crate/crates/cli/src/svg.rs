//! Plain-text SVG of a configuration: one filled path per domain (holes cut
//! out with the even-odd rule), every oval outlined, and a legend.

use std::fmt::Write;

use smoothrig::geometry::{Domain, OvalConfiguration, Point};

fn subpath(out: &mut String, vertices: &[Point]) {
    for (i, v) in vertices.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        // y flipped so the picture has the usual orientation
        let _ = write!(out, "{cmd}{:.6} {:.6} ", v[0], -v[1]);
    }
    out.push('Z');
}

fn color(i: usize) -> String {
    let hue = (i as f64 * 137.508) % 360.0;
    format!("hsl({hue:.1},65%,72%)")
}

pub fn render_svg(config: &OvalConfiguration, domains: &[Domain]) -> String {
    let ovals = config.ovals();
    let (min, max) = match config.bbox() {
        Some(b) => (b.min, b.max),
        None => ([-1.0, -1.0], [1.0, 1.0]),
    };
    let margin = 0.05 * (max[0] - min[0]).max(max[1] - min[1]).max(1e-6);
    let width = max[0] - min[0] + 2.0 * margin;
    let height = max[1] - min[1] + 2.0 * margin;
    let row = height / (domains.len().max(8) as f64 + 1.0);
    let legend_w = 12.0 * row;
    let stroke = 0.004 * width.max(height);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}" width="{}" height="{}">"#,
        min[0] - margin,
        -max[1] - margin,
        width + legend_w,
        height,
        ((width + legend_w) / height * 600.0).round(),
        600
    );
    for (i, d) in domains.iter().enumerate() {
        let mut path = String::new();
        subpath(&mut path, &ovals[d.outer].vertices);
        for &h in &d.holes {
            path.push(' ');
            subpath(&mut path, &ovals[h].vertices);
        }
        let _ = writeln!(
            s,
            r#"  <path class="domain" data-oval="{}" fill="{}" fill-rule="evenodd" d="{}"/>"#,
            d.outer_id,
            color(i),
            path.trim_end()
        );
    }
    for o in ovals {
        let mut path = String::new();
        subpath(&mut path, &o.vertices);
        let _ = writeln!(
            s,
            r##"  <path class="oval" data-oval="{}" fill="none" stroke="#222" stroke-width="{stroke:.6}" d="{path}"/>"##,
            o.id
        );
    }
    let x0 = max[0] + margin;
    let _ = writeln!(s, r#"  <g class="legend" font-size="{:.6}" font-family="monospace">"#, 0.6 * row);
    for (i, d) in domains.iter().enumerate() {
        let y = -max[1] - margin + row * (i as f64 + 1.0);
        let _ = writeln!(
            s,
            r##"    <rect x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="{}" stroke="#222" stroke-width="{:.6}"/>"##,
            x0 + 0.5 * row,
            y - 0.7 * row,
            0.8 * row,
            0.8 * row,
            color(i),
            stroke / 2.0
        );
        let _ = writeln!(
            s,
            r#"    <text x="{:.6}" y="{:.6}">W{}: area {:.6}</text>"#,
            x0 + 1.6 * row,
            y,
            d.outer_id,
            d.area
        );
    }
    s.push_str("  </g>\n</svg>\n");
    s
}
