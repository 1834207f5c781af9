//! Voxel-grid and furthest-point downsampling.

use std::collections::BTreeMap;

use crate::{Category, Error, LabeledCloud, Point3, Result, Vector3};

/// Integer voxel coordinates of `p` for voxels of edge `voxel` anchored at the
/// world origin.
pub fn voxel_key(p: &Point3, voxel: f64) -> [i64; 3] {
    [
        (p.x / voxel).floor() as i64,
        (p.y / voxel).floor() as i64,
        (p.z / voxel).floor() as i64,
    ]
}

/// Source indices of every occupied voxel, in lexicographic voxel order.
pub fn voxel_groups(cloud: &LabeledCloud, voxel: f64) -> Result<Vec<([i64; 3], Vec<usize>)>> {
    if !(voxel.is_finite() && voxel > 0.0) {
        return Err(Error::InvalidArgument(format!("voxel size must be positive, got {voxel}")));
    }
    let mut groups: BTreeMap<[i64; 3], Vec<usize>> = BTreeMap::new();
    for (i, p) in cloud.points().iter().enumerate() {
        groups.entry(voxel_key(p, voxel)).or_default().push(i);
    }
    Ok(groups.into_iter().collect())
}

/// Replaces the points of each occupied voxel by their centroid. The label of
/// an output point is the voxel's majority label, `H` on ties.
pub fn voxel_downsample(cloud: &LabeledCloud, voxel: f64) -> Result<LabeledCloud> {
    let groups = voxel_groups(cloud, voxel)?;
    let pts = cloud.points();
    let mut out_points = Vec::with_capacity(groups.len());
    let mut out_labels = Vec::with_capacity(groups.len());
    for (key, members) in &groups {
        let sum = members.iter().fold(Vector3::zeros(), |acc, &i| acc + pts[i].coords);
        let mut c = Point3::from(sum / members.len() as f64);
        // rounding in the mean can push it across the voxel face
        for axis in 0..3 {
            let lo = key[axis] as f64 * voxel;
            let hi = (key[axis] + 1) as f64 * voxel;
            let min = members.iter().map(|&i| pts[i][axis]).fold(f64::INFINITY, f64::min);
            let max = members.iter().map(|&i| pts[i][axis]).fold(f64::NEG_INFINITY, f64::max);
            c[axis] = c[axis].clamp(min.max(lo), max.min(hi));
        }
        out_points.push(c);
        if let Some(labels) = cloud.labels() {
            let v = members.iter().filter(|&&i| labels[i] == Category::V).count();
            out_labels.push(if v * 2 > members.len() { Category::V } else { Category::H });
        }
    }
    let out = LabeledCloud::new(out_points)?;
    if cloud.labels().is_some() {
        out.replace_labels(out_labels)
    } else {
        Ok(out)
    }
}

/// Greedy furthest-point sampling. Returns the indices of the `n` selected
/// points in selection order, starting from the point closest to the
/// centroid. Exact distance ties are broken by a seeded permutation rank.
pub fn furthest_point_indices(points: &[Point3], n: usize, seed: u64) -> Result<Vec<usize>> {
    if n > points.len() {
        return Err(Error::TooFewPoints {
            needed: n,
            actual: points.len(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let rank = tie_ranks(points.len(), seed);
    let centroid = points.iter().fold(Vector3::zeros(), |acc, p| acc + p.coords) / points.len() as f64;

    let mut start = 0;
    let mut start_d = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        let d = (p.coords - centroid).norm_squared();
        if d < start_d || (d == start_d && rank[i] < rank[start]) {
            start = i;
            start_d = d;
        }
    }

    // coordinates split by axis so the update loop vectorizes
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
    let zs: Vec<f64> = points.iter().map(|p| p.z).collect();
    let mut selected = Vec::with_capacity(n);
    let mut nearest = vec![f64::INFINITY; points.len()];
    let mut current = start;
    for _ in 0..n {
        selected.push(current);
        let (cx, cy, cz) = (xs[current], ys[current], zs[current]);
        // selected points sit at -inf and never win again
        nearest[current] = f64::NEG_INFINITY;
        // four independent maxima so the reduction vectorizes
        let mut lanes = [f64::NEG_INFINITY; 4];
        let mut chunks = nearest.chunks_exact_mut(4);
        let mut coords = xs.chunks_exact(4).zip(ys.chunks_exact(4)).zip(zs.chunks_exact(4));
        for (slot, ((x, y), z)) in (&mut chunks).zip(&mut coords) {
            for l in 0..4 {
                let (dx, dy, dz) = (x[l] - cx, y[l] - cy, z[l] - cz);
                let d = dx * dx + dy * dy + dz * dz;
                let v = if d < slot[l] { d } else { slot[l] };
                slot[l] = v;
                lanes[l] = if v > lanes[l] { v } else { lanes[l] };
            }
        }
        let body = points.len() - points.len() % 4;
        for (k, slot) in chunks.into_remainder().iter_mut().enumerate() {
            let i = body + k;
            let (dx, dy, dz) = (xs[i] - cx, ys[i] - cy, zs[i] - cz);
            let d = dx * dx + dy * dy + dz * dz;
            if d < *slot {
                *slot = d;
            }
            lanes[0] = lanes[0].max(*slot);
        }
        let best = lanes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut next = usize::MAX;
        for (i, &d) in nearest.iter().enumerate() {
            if d == best && (next == usize::MAX || rank[i] < rank[next]) {
                next = i;
            }
        }
        current = next;
    }
    Ok(selected)
}

fn tie_ranks(n: usize, seed: u64) -> Vec<u32> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
    let mut rank = vec![0u32; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i as usize] = r as u32;
    }
    rank
}

/// Furthest-point sampling of a cloud down to exactly `n` points.
pub fn furthest_point_sample(cloud: &LabeledCloud, n: usize, seed: u64) -> Result<LabeledCloud> {
    let idx = furthest_point_indices(cloud.points(), n, seed)?;
    Ok(cloud.select(&idx))
}
