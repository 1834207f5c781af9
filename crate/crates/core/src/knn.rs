//! Exact k-nearest-neighbor queries over a uniform hash grid.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::Point3;

type CellKey = [i64; 3];

pub(crate) struct GridIndex<'a> {
    points: &'a [Point3],
    cell: f64,
    origin: Point3,
    /// Point indices grouped by cell.
    order: Vec<u32>,
    /// Coordinates in `order` order.
    sorted: Vec<Point3>,
    cells: Cells,
    /// Occupied cells with their `order` ranges.
    occupied: Vec<(CellKey, u32, u32)>,
    dims: [i64; 3],
    max_ring: i64,
}

/// Cell key to `(start, end)` range in `order`. Small grids use a dense
/// table, large sparse ones a hash map.
enum Cells {
    Dense(Vec<(u32, u32)>),
    Sparse(HashMap<CellKey, (u32, u32)>),
}

const MAX_DENSE_CELLS: i64 = 1 << 22;

impl<'a> GridIndex<'a> {
    /// Builds a grid whose cells hold roughly `k / 2` points on average.
    pub(crate) fn new(points: &'a [Point3], k: usize) -> Self {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for p in points {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        if points.is_empty() {
            lo = Point3::origin();
            hi = Point3::origin();
        }
        let extent = (hi - lo).max().max(1e-9);
        let n = points.len().max(1) as f64;

        let mut cell = extent / n.cbrt();
        let target = (k as f64 / 2.0).max(1.0);
        let mut grid = Self::with_cell(points, lo, hi, cell);
        // Clouds sampled from surfaces fill cells quadratically in cell size.
        for _ in 0..2 {
            let occupancy = n / grid.occupied().max(1) as f64;
            let factor = (target / occupancy).sqrt().clamp(0.25, 4.0);
            if (factor - 1.0).abs() < 0.2 {
                break;
            }
            cell *= factor;
            grid = Self::with_cell(points, lo, hi, cell);
        }
        grid
    }

    fn with_cell(points: &'a [Point3], origin: Point3, hi: Point3, cell: f64) -> Self {
        let key_of = |p: &Point3| -> CellKey {
            let d = (p - origin) / cell;
            [d.x.floor() as i64, d.y.floor() as i64, d.z.floor() as i64]
        };
        let top = key_of(&hi);
        let dims = [top[0] + 1, top[1] + 1, top[2] + 1];
        let dense = dims[0]
            .checked_mul(dims[1])
            .and_then(|v| v.checked_mul(dims[2]))
            .is_some_and(|v| v <= MAX_DENSE_CELLS);
        let mut keyed: Vec<(CellKey, u32)> = points.iter().enumerate().map(|(i, p)| (key_of(p), i as u32)).collect();
        keyed.sort_unstable();
        let mut ranges = Vec::new();
        let mut start = 0usize;
        while start < keyed.len() {
            let key = keyed[start].0;
            let mut end = start;
            while end < keyed.len() && keyed[end].0 == key {
                end += 1;
            }
            ranges.push((key, (start as u32, end as u32)));
            start = end;
        }
        let occupied = ranges.iter().map(|&(key, (s, e))| (key, s, e)).collect();
        let cells = if dense {
            let mut table = vec![(0u32, 0u32); (dims[0] * dims[1] * dims[2]) as usize];
            for (key, range) in ranges {
                table[((key[0] * dims[1] + key[1]) * dims[2] + key[2]) as usize] = range;
            }
            Cells::Dense(table)
        } else {
            Cells::Sparse(ranges.into_iter().collect())
        };
        Self {
            points,
            cell,
            origin,
            sorted: keyed.iter().map(|&(_, i)| points[i as usize]).collect(),
            order: keyed.into_iter().map(|(_, i)| i).collect(),
            cells,
            occupied,
            dims,
            max_ring: dims.iter().copied().max().unwrap_or(1) + 1,
        }
    }

    fn occupied(&self) -> usize {
        self.occupied.len()
    }

    fn range(&self, key: CellKey) -> Option<(u32, u32)> {
        match &self.cells {
            Cells::Dense(t) => {
                if (0..3).any(|a| key[a] < 0 || key[a] >= self.dims[a]) {
                    return None;
                }
                let r = t[((key[0] * self.dims[1] + key[1]) * self.dims[2] + key[2]) as usize];
                (r.1 > r.0).then_some(r)
            }
            Cells::Sparse(m) => m.get(&key).copied(),
        }
    }

    /// Writes the `k` nearest neighbors of `query` (itself included when it is
    /// part of the cloud) into `out`, sorted by distance then index.
    pub(crate) fn knn(&self, query: &Point3, k: usize, out: &mut Vec<(f64, u32)>) {
        out.clear();
        let k = k.min(self.points.len());
        if k == 0 {
            return;
        }
        let d = (query - self.origin) / self.cell;
        let center = [d.x.floor() as i64, d.y.floor() as i64, d.z.floor() as i64];
        // distance from the query to the nearest face of its own cell
        let slack = (0..3)
            .map(|a| (d[a] - center[a] as f64).min(center[a] as f64 + 1.0 - d[a]))
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        let cell2 = self.cell * self.cell;
        for ring in 0..=self.max_ring {
            self.visit_shell(center, ring, |key, s, e| {
                if out.len() == k {
                    // squared distance from the query to the cell box
                    let gap2: f64 = (0..3)
                        .map(|a| {
                            let lo = key[a] as f64;
                            let g = (lo - d[a]).max(d[a] - lo - 1.0).max(0.0);
                            g * g
                        })
                        .sum::<f64>()
                        * cell2;
                    if gap2 > out[k - 1].0 {
                        return;
                    }
                }
                for (p, &idx) in self.sorted[s..e].iter().zip(&self.order[s..e]) {
                    insert_bounded(out, k, ((p - query).norm_squared(), idx));
                }
            });
            if out.len() == k {
                let covered = (ring as f64 + slack) * self.cell;
                if out[k - 1].0 <= covered * covered {
                    return;
                }
            }
        }
    }

    /// The `k` nearest neighbors of every indexed point, flattened: entries
    /// `i * k .. (i + 1) * k` belong to point `i`, ordered as in [`Self::knn`].
    /// Requires `k <= points.len()`.
    pub(crate) fn knn_all(&self, k: usize) -> Vec<u32> {
        assert!(k <= self.points.len());
        let per_cell: Vec<Vec<u32>> = self
            .occupied
            .par_iter()
            .map_init(
                || (Vec::new(), Vec::new()),
                |(candidates, out), &(key, s, e)| {
                    // every query in this cell shares the surrounding 3x3x3 block
                    candidates.clear();
                    self.visit_shell_range(key, 1, |_, a, b| {
                        candidates.extend(self.sorted[a..b].iter().zip(&self.order[a..b]).map(|(p, &i)| (*p, i)));
                    });
                    let mut found = Vec::with_capacity((e - s) as usize * k);
                    for q in &self.sorted[s as usize..e as usize] {
                        out.clear();
                        out.extend(candidates.iter().map(|(p, i)| ((p - q).norm_squared(), *i)));
                        let d = (q - self.origin) / self.cell;
                        let slack = (0..3)
                            .map(|a| (d[a] - key[a] as f64).min(key[a] as f64 + 1.0 - d[a]))
                            .fold(f64::INFINITY, f64::min)
                            .max(0.0);
                        let covered = (1.0 + slack) * self.cell;
                        let ok = out.len() >= k && {
                            out.select_nth_unstable_by(k - 1, cmp_neighbor);
                            out[k - 1].0 <= covered * covered
                        };
                        if ok {
                            out.truncate(k);
                            out.sort_unstable_by(cmp_neighbor);
                        } else {
                            self.knn(q, k, out);
                        }
                        found.extend(out.iter().map(|&(_, i)| i));
                    }
                    found
                },
            )
            .collect();
        let mut result = vec![0u32; self.points.len() * k];
        for (&(_, s, _), found) in self.occupied.iter().zip(&per_cell) {
            for (j, chunk) in found.chunks_exact(k).enumerate() {
                let i = self.order[s as usize + j] as usize;
                result[i * k..(i + 1) * k].copy_from_slice(chunk);
            }
        }
        result
    }

    /// Visits every occupied cell within Chebyshev distance `ring` of `c`.
    fn visit_shell_range(&self, c: CellKey, ring: i64, mut f: impl FnMut(CellKey, usize, usize)) {
        for r in 0..=ring {
            self.visit_shell(c, r, &mut f);
        }
    }

    fn visit_shell(&self, c: CellKey, ring: i64, mut f: impl FnMut(CellKey, usize, usize)) {
        for dx in -ring..=ring {
            for dy in -ring..=ring {
                let on_face = dx.abs() == ring || dy.abs() == ring;
                let mut dz = -ring;
                while dz <= ring {
                    let key = [c[0] + dx, c[1] + dy, c[2] + dz];
                    if let Some((s, e)) = self.range(key) {
                        f(key, s as usize, e as usize);
                    }
                    // interior rows only touch the two z faces
                    dz += if on_face || ring == 0 { 1 } else { 2 * ring };
                }
            }
        }
    }
}

fn cmp_neighbor(a: &(f64, u32), b: &(f64, u32)) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Inserts into a list kept sorted by (distance, index) and capped at `k`.
fn insert_bounded(out: &mut Vec<(f64, u32)>, k: usize, item: (f64, u32)) {
    let less = |a: &(f64, u32), b: &(f64, u32)| a.0 < b.0 || (a.0 == b.0 && a.1 < b.1);
    if out.len() == k {
        if !less(&item, &out[k - 1]) {
            return;
        }
        out.pop();
    }
    let mut pos = out.len();
    while pos > 0 && less(&item, &out[pos - 1]) {
        pos -= 1;
    }
    out.insert(pos, item);
}
