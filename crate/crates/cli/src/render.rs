//! Plain SVG drawings of webs (in a disk) and profiles (two stacked contours).

use std::f64::consts::PI;
use std::fmt::Write;

use anyhow::Result;

use webmod::evaluation::leaf_lists;
use webmod::profiles::Rank2Profile;
use webmod::webs::Web;

const SIZE: f64 = 400.0;
const CENTER: f64 = SIZE / 2.0;
const RADIUS: f64 = 160.0;
const INNER: f64 = 0.55;

type Pt = (f64, f64);

fn boundary(label: usize, n: usize) -> Pt {
    let theta = -PI / 2.0 + 2.0 * PI * (label - 1) as f64 / n as f64;
    (CENTER + RADIUS * theta.cos(), CENTER + RADIUS * theta.sin())
}

/// Point at radius `INNER * RADIUS` in the direction of the circular mean of
/// the leaves; the center if the mean vanishes.
fn angular_centroid(labels: &[usize], n: usize) -> Pt {
    let (mut sx, mut sy) = (0.0, 0.0);
    for &l in labels {
        let theta = 2.0 * PI * (l - 1) as f64 / n as f64 - PI / 2.0;
        sx += theta.cos();
        sy += theta.sin();
    }
    if sx.hypot(sy) < 1e-9 {
        return (CENTER, CENTER);
    }
    let theta = sy.atan2(sx);
    let r = INNER * RADIUS;
    (CENTER + r * theta.cos(), CENTER + r * theta.sin())
}

fn line(svg: &mut String, a: Pt, b: Pt) {
    let _ = writeln!(
        svg,
        r#"  <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1.5"/>"#,
        a.0, a.1, b.0, b.1
    );
}

fn dot(svg: &mut String, p: Pt, r: f64, fill: &str, class: &str) {
    let _ = writeln!(
        svg,
        r#"  <circle class="{class}" cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}" stroke="black" stroke-width="1.5"/>"#,
        p.0, p.1
    );
}

fn header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    )
}

pub fn render_web(w: &Web) -> Result<String> {
    let n = w.n();
    let mut svg = header(SIZE, SIZE);
    let _ = writeln!(
        svg,
        r#"  <circle cx="{CENTER}" cy="{CENTER}" r="{RADIUS}" fill="none" stroke="gray"/>"#
    );
    let mut whites: Vec<Pt> = Vec::new();
    let mut edges: Vec<(Pt, Pt)> = Vec::new();
    let mut black = None;
    match w {
        Web::Rank1(r) => {
            let c = angular_centroid(r.leaves().as_slice(), n);
            let c = (CENTER + (c.0 - CENTER) * 0.3, CENTER + (c.1 - CENTER) * 0.3);
            for l in r.leaves().iter() {
                edges.push((c, boundary(l, n)));
            }
            whites.push(c);
        }
        Web::Rank2(r) => {
            let lists = leaf_lists(r)?;
            let base = [r.r(), r.s(), r.t()];
            for (set, leaves) in base.iter().zip(&lists) {
                let c = angular_centroid(set.as_slice(), n);
                for &l in leaves {
                    edges.push((c, boundary(l, n)));
                }
                whites.push(c);
            }
            let b = (
                whites.iter().map(|p| p.0).sum::<f64>() / 3.0,
                whites.iter().map(|p| p.1).sum::<f64>() / 3.0,
            );
            for &c in &whites {
                edges.push((c, b));
            }
            black = Some(b);
        }
        Web::Tree(_) => anyhow::bail!("only rank-1 and rank-2 webs are rendered"),
    }
    for (a, b) in edges {
        line(&mut svg, a, b);
    }
    for l in 1..=n {
        let p = boundary(l, n);
        dot(&mut svg, p, 4.0, "black", "boundary");
        let theta = -PI / 2.0 + 2.0 * PI * (l - 1) as f64 / n as f64;
        let _ = writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle" dominant-baseline="middle">{l}</text>"#,
            CENTER + (RADIUS + 16.0) * theta.cos(),
            CENTER + (RADIUS + 16.0) * theta.sin()
        );
    }
    for c in whites {
        dot(&mut svg, c, 7.0, "white", "white");
    }
    if let Some(b) = black {
        dot(&mut svg, b, 7.0, "black", "black");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

const STEP: f64 = 30.0;

/// Top contour `I` and bottom contour `J` as lattice paths read from a
/// vertex where they meet, with every box shaded.
pub fn render_profile(p: &Rank2Profile) -> Result<String> {
    let n = p.n();
    let boxes = p.decompose_boxes()?;
    let depth = p.depths();
    let start = (0..n).find(|&i| depth[i] == 0).unwrap_or(0);
    let labels: Vec<usize> = (1..=n).map(|s| (start + s - 1) % n + 1).collect();
    let walk = |downs: &webmod::cyclic::LabelSet| {
        let mut h = vec![0i64];
        for &l in &labels {
            h.push(h.last().unwrap() + if downs.contains(l) { -1 } else { 1 });
        }
        h
    };
    let (top, bottom) = (walk(p.top()), walk(p.bottom()));
    let hmax = top.iter().chain(&bottom).copied().max().unwrap();
    let hmin = top.iter().chain(&bottom).copied().min().unwrap();
    let margin = 30.0;
    let width = 2.0 * margin + STEP * n as f64;
    let height = 2.0 * margin + STEP * (hmax - hmin) as f64 + 20.0;
    let at = |s: usize, h: i64| (margin + STEP * s as f64, margin + STEP * (hmax - h) as f64);
    let mut svg = header(width, height);
    for b in &boxes {
        let first = labels.iter().position(|&l| l == b.span[0]).unwrap();
        let last = first + b.span.len();
        let mut pts: Vec<Pt> = (first..=last).map(|s| at(s, top[s])).collect();
        pts.extend((first..=last).rev().map(|s| at(s, bottom[s])));
        let path: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", p.0, p.1))
            .collect();
        let _ = writeln!(
            svg,
            r##"  <polygon class="box" points="{}" fill="#c8c8c8" stroke="none"/>"##,
            path.join(" ")
        );
    }
    for (class, h, colour) in [("top", &top, "black"), ("bottom", &bottom, "#1f4fa0")] {
        let pts: Vec<String> = (0..=n)
            .map(|s| {
                let q = at(s, h[s]);
                format!("{:.2},{:.2}", q.0, q.1)
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"  <polyline class="{class}" points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
            pts.join(" ")
        );
    }
    for (s, l) in labels.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{l}</text>"#,
            margin + STEP * (s as f64 + 0.5),
            height - 8.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
