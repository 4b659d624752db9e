//! SVG rendering of floor plans, allocations and roadmaps.
//!
//! Plan coordinates have y pointing up; the SVG is flipped accordingly.
//! Output depends only on the inputs, so equal inputs give equal bytes.

use crate::floorplan::{FloorPlan, SeatKind};
use crate::geometry::Point;
use crate::hierarchy::{HierarchicalAllocation, Hierarchy};
use crate::roadmap::{NodeOrigin, Roadmap};
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

/// Team colors, assigned in team-id order and reused cyclically.
pub const PALETTE: [&str; 20] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94", "#f7b6d2", "#9edae5", "#dbdb8d", "#393b79",
];
/// Unallocated seats.
pub const NEUTRAL: &str = "#d9d9d9";
pub const BACKGROUND: &str = "#ffffff";
pub const OBSTACLE: &str = "#808080";
pub const ROADMAP: &str = "#a6bddb";
pub const INK: &str = "#222222";

/// Every color the renderer can emit.
pub fn declared_colors() -> Vec<&'static str> {
    let mut v: Vec<&str> = PALETTE.to_vec();
    v.extend([NEUTRAL, BACKGROUND, OBSTACLE, ROADMAP, INK]);
    v
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RenderError {
    #[error("level {level} does not exist (allocation has {levels} levels)")]
    UnknownLevel { level: usize, levels: usize },
}

#[derive(Clone, Copy, Default)]
pub struct RenderOptions<'a> {
    /// Allocation and the level to color by.
    pub allocation: Option<(&'a HierarchicalAllocation, usize)>,
    /// Fixes team colors to hierarchy order, so a team keeps its color even
    /// when other teams are missing from the allocation.
    pub hierarchy: Option<&'a Hierarchy>,
    pub roadmap: Option<&'a Roadmap>,
}

const CANVAS: f64 = 800.0;
const LEGEND_W: f64 = 220.0;
const MARGIN: f64 = 10.0;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

pub fn render_svg(plan: &FloorPlan, opts: RenderOptions<'_>) -> Result<String, RenderError> {
    let scale = CANVAS / plan.width().max(plan.height());
    let (w, h) = (plan.width() * scale, plan.height() * scale);
    let px = |p: Point| (MARGIN + p.x * scale, MARGIN + (plan.height() - p.y) * scale);
    let r = (plan.diagonal() * scale * 0.006).clamp(2.5, 8.0);

    let mut owner: HashMap<&str, &str> = HashMap::new();
    let mut color: HashMap<String, &'static str> = HashMap::new();
    let mut legend: Vec<&str> = Vec::new();
    if let Some((alloc, level)) = opts.allocation {
        if level >= alloc.levels.len() {
            return Err(RenderError::UnknownLevel {
                level,
                levels: alloc.levels.len(),
            });
        }
        owner = alloc.owners(level);
        let present: BTreeSet<&str> = owner.values().copied().collect();
        let order: Vec<String> = match opts.hierarchy {
            Some(hier) if level < hier.depth() => hier.level(level).iter().map(|&t| hier.team(t).id.clone()).collect(),
            _ => present.iter().map(|s| s.to_string()).collect(),
        };
        let mut k = 0;
        for id in order.iter().chain(present.iter().map(|s| s.to_string()).collect::<Vec<_>>().iter()) {
            if !color.contains_key(id) {
                color.insert(id.clone(), PALETTE[k % PALETTE.len()]);
                k += 1;
            }
        }
        legend = present.into_iter().collect();
    }

    let mut s = String::new();
    let total_w = w + 2.0 * MARGIN + LEGEND_W;
    let total_h = (h + 2.0 * MARGIN).max(MARGIN * 2.0 + 18.0 * (legend.len() as f64 + 1.0));
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.0}" height="{total_h:.0}" viewBox="0 0 {total_w:.2} {total_h:.2}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{total_w:.2}" height="{total_h:.2}" fill="{BACKGROUND}"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN:.2}" y="{MARGIN:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="{INK}" stroke-width="1"/>"#
    );

    let _ = writeln!(s, r#"<g class="obstacles">"#);
    for poly in plan.obstacles() {
        let pts: Vec<String> = poly
            .vertices
            .iter()
            .map(|&p| {
                let (x, y) = px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(s, r#"<polygon points="{}" fill="{OBSTACLE}"/>"#, pts.join(" "));
    }
    let _ = writeln!(s, "</g>");

    if let Some(rm) = opts.roadmap {
        let _ = writeln!(s, r#"<g class="roadmap">"#);
        for e in rm.edges() {
            let (x1, y1) = px(rm.nodes()[e.u].pos);
            let (x2, y2) = px(rm.nodes()[e.v].pos);
            let _ = writeln!(
                s,
                r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{ROADMAP}" stroke-width="0.6"/>"#
            );
        }
        for n in rm.nodes().iter().filter(|n| matches!(n.origin, NodeOrigin::Exploration)) {
            let (x, y) = px(n.pos);
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.2" fill="{ROADMAP}"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(s, r#"<g class="seats">"#);
    for seat in plan.seats() {
        let (x, y) = px(seat.pos);
        let fill = owner
            .get(seat.id.as_str())
            .and_then(|t| color.get(*t).copied())
            .unwrap_or(NEUTRAL);
        let title = match owner.get(seat.id.as_str()) {
            Some(t) => format!("{} ({})", escape(&seat.id), escape(t)),
            None => escape(&seat.id),
        };
        match seat.kind {
            SeatKind::Desk => {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{fill}" stroke="{INK}" stroke-width="0.5"><title>{title}</title></circle>"#
                );
            }
            SeatKind::Office => {
                let side = 2.0 * r;
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.2}" y="{:.2}" width="{side:.2}" height="{side:.2}" fill="{fill}" stroke="{INK}" stroke-width="0.5"><title>{title}</title></rect>"#,
                    x - r,
                    y - r
                );
            }
        }
    }
    let _ = writeln!(s, "</g>");

    let lx = w + 2.0 * MARGIN + 10.0;
    let _ = writeln!(s, r#"<g class="legend" font-family="sans-serif" font-size="12">"#);
    if !legend.is_empty() {
        let level = opts.allocation.map(|(_, l)| l).unwrap_or(0);
        let _ = writeln!(s, r#"<text x="{lx:.2}" y="{:.2}" fill="{INK}">Level {level}</text>"#, MARGIN + 12.0);
    }
    for (i, team) in legend.iter().enumerate() {
        let y = MARGIN + 18.0 * (i as f64 + 1.0);
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.2}" y="{:.2}" width="12" height="12" fill="{}"/>"#,
            y + 2.0,
            color[*team]
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" fill="{INK}">{}</text>"#,
            lx + 18.0,
            y + 12.0,
            escape(team)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
pub(crate) mod xml_check {
    /// Minimal well-formedness check: balanced tags, quoted attributes, known
    /// entities only.
    pub fn well_formed(doc: &str) -> Result<(), String> {
        let mut stack: Vec<String> = Vec::new();
        let mut rest = doc;
        let mut roots = 0;
        while let Some(i) = rest.find('<') {
            check_text(&rest[..i])?;
            let end = rest[i..].find('>').ok_or("unterminated tag")? + i;
            let tag = &rest[i + 1..end];
            rest = &rest[end + 1..];
            if let Some(name) = tag.strip_prefix('/') {
                let open = stack.pop().ok_or_else(|| format!("stray </{name}>"))?;
                if open != name.trim() {
                    return Err(format!("</{name}> closes <{open}>"));
                }
                continue;
            }
            let self_closing = tag.ends_with('/');
            let body = tag.trim_end_matches('/');
            let name: String = body.chars().take_while(|c| !c.is_whitespace()).collect();
            if name.is_empty() {
                return Err("empty tag name".into());
            }
            if body[name.len()..].matches('"').count() % 2 != 0 {
                return Err(format!("unbalanced quotes in <{name}>"));
            }
            if stack.is_empty() {
                roots += 1;
            }
            if !self_closing {
                stack.push(name);
            }
        }
        check_text(rest)?;
        if !stack.is_empty() {
            return Err(format!("unclosed <{}>", stack.last().unwrap()));
        }
        if roots != 1 {
            return Err(format!("{roots} root elements"));
        }
        Ok(())
    }

    fn check_text(t: &str) -> Result<(), String> {
        let mut rest = t;
        while let Some(i) = rest.find('&') {
            let end = rest[i..].find(';').ok_or("bare &")? + i;
            let ent = &rest[i + 1..end];
            if !["amp", "lt", "gt", "quot", "apos"].contains(&ent) {
                return Err(format!("unknown entity &{ent};"));
            }
            rest = &rest[end + 1..];
        }
        Ok(())
    }
}
