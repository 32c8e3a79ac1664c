//! SVG rendering of patches, supertile outlines and overlays.
//!
//! Coordinates are in tile units through the `viewBox`, with `y` flipped so
//! the patch origin is the lower-left corner. Elements are emitted in paint
//! order: tiles, outlines (finest level first), then overlays.

use std::fmt::Write as _;

use anyhow::{bail, Result};

use tilescope_core::fusion::Patch;
use tilescope_core::shear::find_fault_lines;

/// Default limit on the rendered image area, in pixels.
pub const DEFAULT_PIXEL_BUDGET: u64 = 64_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Overlay {
    /// Every level-`level` fault line, as a dashed segment.
    FaultLines { level: u32, stroke: f64 },
    /// A lattice polyline, drawn bold.
    Path { points: Vec<(i64, i64)>, stroke: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderSpec {
    /// Fill colour per label index.
    pub palette: Vec<String>,
    /// `(level, stroke width in pixels)`.
    pub outlines: Vec<(u32, f64)>,
    pub overlays: Vec<Overlay>,
    /// Pixels per tile edge.
    pub scale: u32,
    pub pixel_budget: u64,
}

impl RenderSpec {
    pub fn new(labels: usize) -> Self {
        Self {
            palette: default_palette(labels),
            outlines: Vec::new(),
            overlays: Vec::new(),
            scale: 8,
            pixel_budget: DEFAULT_PIXEL_BUDGET,
        }
    }
}

/// Dark, two medium hues, light; further labels get spread-out hues.
pub fn default_palette(labels: usize) -> Vec<String> {
    const BASE: [&str; 4] = ["#2b2b2b", "#4f86c6", "#d08a3c", "#ececec"];
    (0..labels)
        .map(|i| match BASE.get(i) {
            Some(c) => c.to_string(),
            None => format!("hsl({}, 55%, 55%)", (i * 137) % 360),
        })
        .collect()
}

/// Parses `a=#123456,c=red` into a palette over `labels`, starting from the
/// default one.
pub fn parse_palette(text: &str, labels: &[String]) -> Result<Vec<String>> {
    let mut palette = default_palette(labels.len());
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let Some((name, colour)) = item.split_once('=') else {
            bail!("palette entry `{item}` is not of the form label=colour");
        };
        let Some(i) = labels.iter().position(|l| l == name.trim()) else {
            bail!("palette names unknown label `{}`", name.trim());
        };
        let colour = colour.trim();
        if colour.is_empty() || colour.contains(['"', '<', '>', '&']) {
            bail!("bad colour `{colour}` for label `{name}`");
        }
        palette[i] = colour.to_string();
    }
    Ok(palette)
}

fn check(patch: &Patch, spec: &RenderSpec) -> Result<()> {
    let labels = patch.rule().labels.len();
    if spec.palette.len() < labels {
        bail!("palette has {} colours for {labels} labels", spec.palette.len());
    }
    for &(level, _) in &spec.outlines {
        if level >= patch.level() {
            bail!("outline level {level} is not below the patch level {}", patch.level());
        }
    }
    for o in &spec.overlays {
        if let Overlay::FaultLines { level, .. } = o {
            if *level >= patch.level() {
                bail!("fault-line level {level} is not below the patch level {}", patch.level());
            }
        }
    }
    if spec.scale == 0 {
        bail!("scale must be positive");
    }
    let s = u128::from(spec.scale);
    let pixels = patch.width() as u128 * s * patch.height() as u128 * s;
    if pixels > u128::from(spec.pixel_budget) {
        bail!(
            "a {}x{} patch at scale {} needs {pixels} pixels, above the budget of {}",
            patch.width(),
            patch.height(),
            spec.scale,
            spec.pixel_budget
        );
    }
    Ok(())
}

/// Stroke width in tile units.
fn units(px: f64, scale: u32) -> String {
    let w = px / f64::from(scale);
    let s = format!("{w:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn render_svg(patch: &Patch, spec: &RenderSpec) -> Result<String> {
    check(patch, spec)?;
    let (w, h) = (patch.width(), patch.height());
    let s = i64::from(spec.scale);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {w} {h}" shape-rendering="crispEdges">"#,
        w * s,
        h * s
    );
    out.push_str("<g id=\"tiles\">\n");
    let grid = patch.grid()?;
    let names: Vec<&str> = patch.rule().labels.iter().map(|l| l.0.as_str()).collect();
    for y in (0..h).rev() {
        let row = &grid[(y * w) as usize..((y + 1) * w) as usize];
        for (x, &l) in row.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<rect class="tile t-{}" x="{x}" y="{}" width="1" height="1" fill="{}"/>"#,
                names[l as usize],
                h - 1 - y,
                spec.palette[l as usize]
            );
        }
    }
    out.push_str("</g>\n");

    let mut outlines = spec.outlines.clone();
    outlines.sort_by_key(|o| o.0);
    for (level, stroke) in outlines {
        let _ = writeln!(
            out,
            r##"<g id="outline-{level}" fill="none" stroke="#000000" stroke-width="{}">"##,
            units(stroke, spec.scale)
        );
        for n in patch.nodes_at_level(level)? {
            let _ = writeln!(
                out,
                r#"<rect class="outline level-{level}" x="{}" y="{}" width="{}" height="{}"/>"#,
                n.x,
                h - n.top(),
                n.width,
                n.height
            );
        }
        out.push_str("</g>\n");
    }

    for overlay in &spec.overlays {
        match overlay {
            Overlay::FaultLines { level, stroke } => {
                let _ = writeln!(
                    out,
                    r##"<g id="faults-{level}" stroke="#c02020" stroke-width="{}" stroke-dasharray="{}">"##,
                    units(*stroke, spec.scale),
                    units(4.0 * stroke, spec.scale)
                );
                for line in find_fault_lines(patch, *level, 0)? {
                    let _ = writeln!(
                        out,
                        r#"<line class="fault level-{level}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                        line.x0,
                        h - line.y,
                        line.x1,
                        h - line.y
                    );
                }
                out.push_str("</g>\n");
            }
            Overlay::Path { points, stroke } => {
                let pts: Vec<String> = points.iter().map(|&(x, y)| format!("{x},{}", h - y)).collect();
                let _ = writeln!(
                    out,
                    r##"<polyline class="path" fill="none" stroke="#e01010" stroke-width="{}" stroke-linejoin="round" points="{}"/>"##,
                    units(*stroke, spec.scale),
                    pts.join(" ")
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Number of elements whose `class` attribute contains `class` as a word.
pub fn count_class(svg: &str, class: &str) -> usize {
    svg.match_indices("class=\"")
        .filter(|(i, m)| {
            let rest = &svg[i + m.len()..];
            let value = &rest[..rest.find('"').unwrap_or(rest.len())];
            let words: Vec<&str> = value.split(' ').collect();
            let wanted: Vec<&str> = class.split(' ').collect();
            wanted.iter().all(|w| words.contains(w))
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use tilescope_core::bundled;
    use tilescope_core::fusion::build_supertile;

    #[test]
    fn one_rect_per_tile() {
        let p = build_supertile(&bundled::frank_dpv(), "a", 1).unwrap();
        let svg = render_svg(&p, &RenderSpec::new(4)).unwrap();
        assert_eq!(count_class(&svg, "tile"), 16);
        assert!(svg.contains(r#"width="32" height="32""#));
    }

    #[test]
    fn outlines_follow_fills() {
        let p = build_supertile(&bundled::frank_dpv(), "a", 3).unwrap();
        let mut spec = RenderSpec::new(4);
        spec.outlines = vec![(2, 2.0), (1, 1.0)];
        spec.overlays.push(Overlay::FaultLines { level: 1, stroke: 1.0 });
        let svg = render_svg(&p, &spec).unwrap();
        assert_eq!(count_class(&svg, "outline level-1"), p.nodes_at_level(1).unwrap().len());
        assert_eq!(count_class(&svg, "outline level-2"), p.nodes_at_level(2).unwrap().len());
        let last_tile = svg.rfind("class=\"tile").unwrap();
        assert!(svg.find("class=\"outline level-1").unwrap() > last_tile);
        assert!(svg.find("class=\"outline level-2").unwrap() > svg.rfind("class=\"outline level-1").unwrap());
        assert!(svg.find("class=\"fault").unwrap() > svg.rfind("class=\"outline").unwrap());
    }

    #[test]
    fn rejects_bad_specs() {
        let p = build_supertile(&bundled::frank_dpv(), "a", 3).unwrap();
        let mut spec = RenderSpec::new(4);
        spec.outlines = vec![(3, 1.0)];
        assert!(render_svg(&p, &spec).is_err());
        let mut spec = RenderSpec::new(3);
        spec.palette.truncate(3);
        assert!(render_svg(&p, &spec).is_err());
        let mut spec = RenderSpec::new(4);
        spec.pixel_budget = 100;
        assert!(render_svg(&p, &spec).is_err());
    }

    #[test]
    fn palettes() {
        let labels: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let p = parse_palette("b=#ff0000, d=white", &labels).unwrap();
        assert_eq!((p[1].as_str(), p[3].as_str()), ("#ff0000", "white"));
        assert!(parse_palette("e=#000", &labels).is_err());
        assert!(parse_palette("a", &labels).is_err());
    }
}
