//! Level-set portraits of the potential: stream lines (psi) and optionally
//! equipotentials (phi), written as SVG polylines and CSV.

use crate::contour::{even_levels, Grid, Polyline};
use holoflow::potential::{build_potential, eval_potential, PotentialRep};
use holoflow::system::{PiecewiseSpec, SystemSpec};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write;

pub enum PortraitSystem {
    Single(SystemSpec),
    Piecewise(PiecewiseSpec),
}

pub enum Levels {
    Count(usize),
    Explicit(Vec<f64>),
}

pub struct PortraitRequest {
    pub system: PortraitSystem,
    /// `x_min, x_max, y_min, y_max`
    pub window: [f64; 4],
    pub grid: (usize, usize),
    pub levels: Levels,
    pub include_phi: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Psi,
    Phi,
}

impl Field {
    fn name(self) -> &'static str {
        match self {
            Field::Psi => "psi",
            Field::Phi => "phi",
        }
    }
}

pub struct Contour {
    pub field: Field,
    pub level: f64,
    pub line: Polyline,
}

pub struct Portrait {
    pub window: [f64; 4],
    pub contours: Vec<Contour>,
    pub switching_line: bool,
}

#[derive(Debug, Serialize)]
pub struct PortraitSummary {
    pub psi_levels: Vec<f64>,
    pub phi_levels: Vec<f64>,
    pub psi_polylines: usize,
    pub phi_polylines: usize,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Samples `(phi, psi)` row by row on worker threads.
fn sample(rep: &PotentialRep, xs: &[f64], ys: &[f64]) -> (Grid, Grid) {
    let nx = xs.len();
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(ys.len());
    let chunk = ys.len().div_ceil(workers.max(1));
    let rows: Vec<Vec<(f64, f64)>> = std::thread::scope(|s| {
        let handles: Vec<_> = ys
            .chunks(chunk)
            .map(|band| {
                s.spawn(move || {
                    band.iter()
                        .map(|&y| {
                            xs.iter()
                                .map(|&x| match eval_potential(rep, Complex64::new(x, y)) {
                                    Ok(w) if w.is_finite() => (w.re, w.im),
                                    _ => (f64::NAN, f64::NAN),
                                })
                                .collect::<Vec<_>>()
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sampling thread panicked"))
            .collect()
    });
    let mut phi = Vec::with_capacity(nx * ys.len());
    let mut psi = Vec::with_capacity(nx * ys.len());
    for row in rows {
        for (a, b) in row {
            phi.push(a);
            psi.push(b);
        }
    }
    (
        Grid {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            values: phi,
        },
        Grid {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            values: psi,
        },
    )
}

fn union_range(grids: &[&Grid]) -> Option<(f64, f64)> {
    grids
        .iter()
        .filter_map(|g| g.range())
        .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
}

pub fn compute(req: &PortraitRequest) -> holoflow::Result<(Portrait, PortraitSummary)> {
    let [x0, x1, y0, y1] = req.window;
    let (nx, ny) = req.grid;
    let xs = linspace(x0, x1, nx);
    let ys = linspace(y0, y1, ny);

    // each piece is contoured on its own half of the window
    let mut pieces: Vec<(Grid, Grid)> = Vec::new();
    let mut switching_line = false;
    match &req.system {
        PortraitSystem::Single(spec) => pieces.push(sample(&build_potential(spec)?, &xs, &ys)),
        PortraitSystem::Piecewise(pw) => {
            let mut upper: Vec<f64> = ys.iter().copied().filter(|&y| y > 0.0).collect();
            let mut lower: Vec<f64> = ys.iter().copied().filter(|&y| y < 0.0).collect();
            if y0 <= 0.0 && y1 >= 0.0 {
                switching_line = true;
                upper.insert(0, 0.0);
                lower.push(0.0);
            }
            if upper.len() >= 2 {
                pieces.push(sample(&build_potential(&pw.upper)?, &xs, &upper));
            }
            if lower.len() >= 2 {
                pieces.push(sample(&build_potential(&pw.lower)?, &xs, &lower));
            }
        }
    }

    let pick_levels = |grids: Vec<&Grid>| -> Vec<f64> {
        match &req.levels {
            Levels::Explicit(v) => v.clone(),
            Levels::Count(n) => {
                union_range(&grids).map_or_else(Vec::new, |(lo, hi)| even_levels(lo, hi, *n))
            }
        }
    };
    let psi_levels = pick_levels(pieces.iter().map(|p| &p.1).collect());
    let phi_levels = if req.include_phi {
        pick_levels(pieces.iter().map(|p| &p.0).collect())
    } else {
        Vec::new()
    };

    let mut contours = Vec::new();
    for (field, levels) in [(Field::Psi, &psi_levels), (Field::Phi, &phi_levels)] {
        for &level in levels {
            for (phi, psi) in &pieces {
                let grid = if field == Field::Psi { psi } else { phi };
                contours.extend(grid.contour(level).into_iter().map(|line| Contour {
                    field,
                    level,
                    line,
                }));
            }
        }
    }
    let count = |f: Field| contours.iter().filter(|c| c.field == f).count();
    let summary = PortraitSummary {
        psi_polylines: count(Field::Psi),
        phi_polylines: count(Field::Phi),
        psi_levels,
        phi_levels,
    };
    Ok((
        Portrait {
            window: req.window,
            contours,
            switching_line,
        },
        summary,
    ))
}

const WIDTH: f64 = 800.0;

impl Portrait {
    fn height(&self) -> f64 {
        let [x0, x1, y0, y1] = self.window;
        (WIDTH * (y1 - y0) / (x1 - x0)).round().max(1.0)
    }

    fn to_px(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let [x0, x1, y0, y1] = self.window;
        (
            (x - x0) / (x1 - x0) * WIDTH,
            (y1 - y) / (y1 - y0) * self.height(),
        )
    }

    pub fn to_svg(&self) -> String {
        let h = self.height();
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{h}" viewBox="0 0 {WIDTH} {h}">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{h}" fill="white"/>"#);
        for (field, style) in [
            (
                Field::Phi,
                r##"stroke="#9a9a9a" stroke-width="0.8" stroke-dasharray="4 3""##,
            ),
            (Field::Psi, r##"stroke="#1f4e79" stroke-width="1""##),
        ] {
            let _ = writeln!(s, r#"<g id="{}" fill="none" {style}>"#, field.name());
            for c in self.contours.iter().filter(|c| c.field == field) {
                let tag = if c.line.closed { "polygon" } else { "polyline" };
                let mut pts = c.line.points.iter().map(|&p| self.to_px(p));
                let mut points = String::new();
                if let Some((x, y)) = pts.next() {
                    let _ = write!(points, "{x:.3},{y:.3}");
                }
                for (x, y) in pts {
                    let _ = write!(points, " {x:.3},{y:.3}");
                }
                let _ = writeln!(s, r#"<{tag} data-level="{}" points="{points}"/>"#, c.level);
            }
            let _ = writeln!(s, "</g>");
        }
        if self.switching_line {
            let (_, y) = self.to_px((0.0, 0.0));
            let _ = writeln!(
                s,
                r##"<line id="switching-line" x1="0" y1="{y:.3}" x2="{WIDTH}" y2="{y:.3}" stroke="#b22222" stroke-width="1.5"/>"##
            );
        }
        s.push_str("</svg>\n");
        s
    }

    /// Columns `field, level, line, x, y`; one row per vertex.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["field", "level", "line", "x", "y"])?;
        for (k, c) in self.contours.iter().enumerate() {
            for (x, y) in &c.line.points {
                w.write_record([
                    c.field.name().to_string(),
                    c.level.to_string(),
                    k.to_string(),
                    x.to_string(),
                    y.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
