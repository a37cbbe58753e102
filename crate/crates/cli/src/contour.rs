//! Marching squares with linear interpolation, chained into polylines.

use std::collections::HashMap;

/// Samples `values[j * nx + i]` at `(xs[i], ys[j])`.
pub struct Grid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
}

/// A cell edge: horizontal edges join `(i, j)`-`(i+1, j)`, vertical ones `(i, j)`-`(i, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

impl Grid {
    fn nx(&self) -> usize {
        self.xs.len()
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx() + i]
    }

    /// Smallest and largest finite sample.
    pub fn range(&self) -> Option<(f64, f64)> {
        self.values
            .iter()
            .filter(|v| v.is_finite())
            .fold(None, |acc, &v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }

    fn crossing(&self, e: Edge, level: f64) -> (f64, f64) {
        let (i0, j0, i1, j1) = match e {
            Edge::H(i, j) => (i, j, i + 1, j),
            Edge::V(i, j) => (i, j, i, j + 1),
        };
        let (a, b) = (self.at(i0, j0), self.at(i1, j1));
        let t = (level - a) / (b - a);
        (
            self.xs[i0] + t * (self.xs[i1] - self.xs[i0]),
            self.ys[j0] + t * (self.ys[j1] - self.ys[j0]),
        )
    }

    fn segments(&self, level: f64) -> Vec<(Edge, Edge)> {
        let (nx, ny) = (self.xs.len(), self.ys.len());
        let mut segs = Vec::new();
        for j in 0..ny.saturating_sub(1) {
            for i in 0..nx.saturating_sub(1) {
                let v = [
                    self.at(i, j),
                    self.at(i + 1, j),
                    self.at(i + 1, j + 1),
                    self.at(i, j + 1),
                ];
                if v.iter().any(|x| !x.is_finite()) {
                    continue;
                }
                let case = v
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (k, &x)| acc | (u8::from(x > level) << k));
                let (bottom, right, top, left) = (
                    Edge::H(i, j),
                    Edge::V(i + 1, j),
                    Edge::H(i, j + 1),
                    Edge::V(i, j),
                );
                let center_above = v.iter().sum::<f64>() / 4.0 > level;
                match case {
                    0 | 15 => {}
                    1 | 14 => segs.push((left, bottom)),
                    2 | 13 => segs.push((bottom, right)),
                    3 | 12 => segs.push((left, right)),
                    4 | 11 => segs.push((right, top)),
                    6 | 9 => segs.push((bottom, top)),
                    7 | 8 => segs.push((left, top)),
                    // saddle cells: the center value picks the pairing
                    5 if center_above => {
                        segs.push((left, top));
                        segs.push((bottom, right));
                    }
                    5 => {
                        segs.push((left, bottom));
                        segs.push((right, top));
                    }
                    10 if center_above => {
                        segs.push((left, bottom));
                        segs.push((right, top));
                    }
                    10 => {
                        segs.push((left, top));
                        segs.push((bottom, right));
                    }
                    _ => unreachable!(),
                }
            }
        }
        segs
    }

    /// Level set of `level` as polylines, in a deterministic order.
    pub fn contour(&self, level: f64) -> Vec<Polyline> {
        let segs = self.segments(level);
        let mut at_edge: HashMap<Edge, Vec<usize>> = HashMap::new();
        for (k, (a, b)) in segs.iter().enumerate() {
            at_edge.entry(*a).or_default().push(k);
            at_edge.entry(*b).or_default().push(k);
        }
        let mut used = vec![false; segs.len()];
        let mut lines = Vec::new();

        let walk = |start: usize, from: Edge, used: &mut Vec<bool>| -> (Vec<Edge>, bool) {
            let mut chain = vec![from];
            let mut seg = start;
            let mut edge = from;
            loop {
                used[seg] = true;
                let (a, b) = segs[seg];
                edge = if a == edge { b } else { a };
                chain.push(edge);
                match at_edge[&edge].iter().find(|&&s| !used[s]) {
                    Some(&next) => seg = next,
                    None => break,
                }
            }
            let closed = chain.len() > 2 && chain.first() == chain.last();
            (chain, closed)
        };

        // open lines start at edges touched by a single segment
        let mut ends: Vec<Edge> = at_edge
            .iter()
            .filter(|(_, s)| s.len() == 1)
            .map(|(e, _)| *e)
            .collect();
        ends.sort();
        for e in ends {
            let s = at_edge[&e][0];
            if !used[s] {
                let (chain, closed) = walk(s, e, &mut used);
                lines.push((chain, closed));
            }
        }
        for s in 0..segs.len() {
            if !used[s] {
                let (chain, closed) = walk(s, segs[s].0, &mut used);
                lines.push((chain, closed));
            }
        }
        lines
            .into_iter()
            .map(|(chain, closed)| Polyline {
                points: chain.into_iter().map(|e| self.crossing(e, level)).collect(),
                closed,
            })
            .collect()
    }
}

/// `count` levels evenly spaced strictly inside `[lo, hi]`.
pub fn even_levels(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|k| lo + (hi - lo) * k as f64 / (count + 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(f: impl Fn(f64, f64) -> f64, n: usize, r: f64) -> Grid {
        let xs: Vec<f64> = (0..n)
            .map(|i| -r + 2.0 * r * i as f64 / (n - 1) as f64)
            .collect();
        let ys = xs.clone();
        let values = ys
            .iter()
            .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Grid { xs, ys, values }
    }

    #[test]
    fn circle_is_one_closed_loop() {
        let g = sample(|x, y| x * x + y * y, 41, 2.0);
        let lines = g.contour(1.0);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        for (x, y) in &lines[0].points {
            assert!((x.hypot(*y) - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn hyperbola_has_two_open_branches() {
        let g = sample(|x, y| x * y, 40, 2.0);
        let lines = g.contour(0.5);
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| !l.closed));
    }

    #[test]
    fn levels_avoid_extremes() {
        assert_eq!(even_levels(0.0, 4.0, 3), vec![1.0, 2.0, 3.0]);
    }
}
