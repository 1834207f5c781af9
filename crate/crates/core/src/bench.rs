//! Timing harness: runs a method over a suite of scenes and reports per-stage
//! times (downsampling, classification, octree build, segmentation) next to
//! the accuracy metrics.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::classify::classify_cloud;
use crate::io::{furthest_point_indices, voxel_downsample};
use crate::metrics::{evaluate_scene, EvalReport, Segmentation};
use crate::ransac::{ransac_segment, RansacConfig};
use crate::segmenter::{segment, LabelSource, SegmentationResult, StageTimings};
use crate::synth::{add_noise, GroundTruthScene};
use crate::{Category, Error, Result, SegmenterConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Ours,
    Ransac(RansacConfig),
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Ours => "ours",
            Method::Ransac(_) => "ransac",
        }
    }
}

/// How a raw scene is reduced before segmentation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    /// Use the cloud as is.
    None,
    /// Voxel-grid downsampling at the configured voxel size.
    Voxel,
    /// Furthest-point sampling to a fixed count.
    Fps { points: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub segmenter: SegmenterConfig,
    pub method: Method,
    pub labels: LabelSource,
    pub sampler: Sampler,
    /// Timed runs per scene, after one untimed warm-up run.
    pub repeats: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            segmenter: SegmenterConfig::default(),
            method: Method::Ours,
            labels: LabelSource::Geometric,
            sampler: Sampler::Voxel,
            repeats: 5,
        }
    }
}

/// Median timings of one scene, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRecord {
    pub scene: usize,
    /// Raw point count.
    pub n_m: usize,
    /// Point count after downsampling.
    pub n_d: usize,
    pub t_d: f64,
    pub t_c: f64,
    pub t_b: f64,
    pub t_s: f64,
    pub fps: f64,
}

impl BenchRecord {
    pub fn total_ms(&self) -> f64 {
        self.t_d + self.t_c + self.t_b + self.t_s
    }
}

/// Runs `scene` through the configured method once and returns the segmented
/// (downsampled) scene with the result.
pub fn run_once(scene: &GroundTruthScene, cfg: &BenchConfig) -> Result<(GroundTruthScene, SegmentationResult)> {
    let start = Instant::now();
    let reduced = match cfg.sampler {
        Sampler::None => scene.clone(),
        Sampler::Fps { points, seed } => scene.select(&furthest_point_indices(scene.cloud.points(), points, seed)?),
        Sampler::Voxel => voxel_reduce(scene, cfg.segmenter.voxel_size)?,
    };
    let t_d = start.elapsed();

    let mut result = match cfg.method {
        Method::Ours => {
            let start = Instant::now();
            let labeled = match cfg.labels {
                LabelSource::Geometric => classify_cloud(&reduced.cloud, &cfg.segmenter)?,
                LabelSource::Provided => {
                    if reduced.cloud.labels().is_none() {
                        return Err(Error::Unlabeled);
                    }
                    reduced.cloud.clone()
                }
                LabelSource::Uniform => reduced.cloud.clone().with_uniform_labels(Category::H),
            };
            let t_c = start.elapsed();
            let mut r = segment(&labeled, &cfg.segmenter)?;
            r.timings.classify = t_c;
            r
        }
        Method::Ransac(rc) => ransac_segment(&reduced.cloud, &rc)?,
    };
    result.timings.downsample = t_d;
    Ok((reduced, result))
}

/// Voxel downsampling that keeps ground truth: each output point inherits
/// the plurality ground-truth plane of its voxel (lower id on ties).
pub fn voxel_reduce(scene: &GroundTruthScene, voxel: f64) -> Result<GroundTruthScene> {
    let cloud = voxel_downsample(&scene.cloud, voxel)?;
    let groups = crate::io::voxel_groups(&scene.cloud, voxel)?;
    let mut counts = vec![0usize; scene.plane_count()];
    let ids = groups
        .iter()
        .map(|(_, members)| {
            counts.iter_mut().for_each(|c| *c = 0);
            for &i in members {
                counts[scene.gt_plane_id[i] as usize] += 1;
            }
            counts
                .iter()
                .enumerate()
                .rev()
                .max_by_key(|(_, c)| **c)
                .map_or(0, |(id, _)| id as u32)
        })
        .collect();
    Ok(GroundTruthScene {
        cloud,
        gt_plane_id: ids,
        gt_normals: scene.gt_normals.clone(),
        spec: scene.spec,
    })
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort_unstable();
    v[v.len() / 2]
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

/// Times every scene sequentially: one warm-up run, then the per-stage median
/// of `repeats` runs. Accuracy is evaluated on the last run.
pub fn run_bench(scenes: &[GroundTruthScene], cfg: &BenchConfig) -> Result<(Vec<BenchRecord>, EvalReport)> {
    if scenes.is_empty() {
        return Err(Error::InvalidArgument("benchmark suite is empty".into()));
    }
    if cfg.repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    let mut records = Vec::with_capacity(scenes.len());
    let mut metrics = Vec::with_capacity(scenes.len());
    let mut medians = Vec::with_capacity(scenes.len());
    for (id, scene) in scenes.iter().enumerate() {
        run_once(scene, cfg)?;
        let mut runs = Vec::with_capacity(cfg.repeats);
        let mut last = None;
        for _ in 0..cfg.repeats {
            let (reduced, result) = run_once(scene, cfg)?;
            runs.push(result.timings);
            last = Some((reduced, result));
        }
        let (reduced, result) = last.expect("at least one run");
        let stage = |f: fn(&StageTimings) -> Duration| median(runs.iter().map(f).collect());
        let t = StageTimings {
            downsample: stage(|t| t.downsample),
            classify: stage(|t| t.classify),
            build: stage(|t| t.build),
            traverse: stage(|t| t.traverse),
        };
        let mut record = BenchRecord {
            scene: id,
            n_m: scene.cloud.len(),
            n_d: reduced.cloud.len(),
            t_d: ms(t.downsample),
            t_c: ms(t.classify),
            t_b: ms(t.build),
            t_s: ms(t.traverse),
            fps: 0.0,
        };
        record.fps = 1000.0 / record.total_ms();
        records.push(record);
        medians.push(t);
        metrics.push(evaluate_scene(&Segmentation::from_result(&result), &reduced)?);
    }
    let report = EvalReport::from_scenes(metrics)?.with_timings(&medians);
    Ok((records, report))
}

/// Furthest-point samples each scene to `points` and then adds Gaussian
/// noise of `sigma` meters. Scene `i` draws from `seed + i`.
pub fn prepare_suite(scenes: &[GroundTruthScene], points: usize, sigma: f64, seed: u64) -> Result<Vec<GroundTruthScene>> {
    scenes
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let scene_seed = seed.wrapping_add(i as u64);
            let sampled = s.select(&furthest_point_indices(s.cloud.points(), points, scene_seed)?);
            add_noise(&sampled, sigma, scene_seed.rotate_left(32))
        })
        .collect()
}

/// Table with one row per scene and a final mean row.
pub fn format_bench_table(records: &[BenchRecord]) -> String {
    let mut s = format!(
        "{:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
        "scene", "N_m", "N_d", "t_d", "t_c", "t_b", "t_s", "FPS"
    );
    let row = |s: &mut String, label: &str, n_m: f64, n_d: f64, t: [f64; 4], fps: f64| {
        let _ = writeln!(
            s,
            "{label:>6} {n_m:>8.0} {n_d:>8.0} {:>8.2} {:>8.2} {:>8.2} {:>8.2} {fps:>8.1}",
            t[0], t[1], t[2], t[3]
        );
    };
    for r in records {
        row(&mut s, &r.scene.to_string(), r.n_m as f64, r.n_d as f64, [r.t_d, r.t_c, r.t_b, r.t_s], r.fps);
    }
    if !records.is_empty() {
        let n = records.len() as f64;
        let mean = |f: fn(&BenchRecord) -> f64| records.iter().map(f).sum::<f64>() / n;
        let t = [mean(|r| r.t_d), mean(|r| r.t_c), mean(|r| r.t_b), mean(|r| r.t_s)];
        row(&mut s, "mean", mean(|r| r.n_m as f64), mean(|r| r.n_d as f64), t, 1000.0 / t.iter().sum::<f64>());
    }
    s
}

pub fn format_bench_csv(records: &[BenchRecord]) -> String {
    let mut s = String::from("scene,n_m,n_d,t_d_ms,t_c_ms,t_b_ms,t_s_ms,fps\n");
    for r in records {
        let _ = writeln!(s, "{},{},{},{},{},{},{},{}", r.scene, r.n_m, r.n_d, r.t_d, r.t_c, r.t_b, r.t_s, r.fps);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::gen_staircase;

    #[test]
    fn empty_suite_is_an_error() {
        assert!(run_bench(&[], &BenchConfig::default()).is_err());
    }

    #[test]
    fn single_scene_record() {
        let scene = gen_staircase(2, 0.3, 0.6, 0.2, 5e3, 1).unwrap();
        let cfg = BenchConfig {
            repeats: 3,
            ..Default::default()
        };
        let (records, report) = run_bench(&[scene.clone()], &cfg).unwrap();
        assert_eq!(records.len(), 1);
        let r = records[0];
        assert_eq!(r.n_m, scene.cloud.len());
        assert!(r.n_d < r.n_m);
        assert!((r.fps - 1000.0 / (r.t_d + r.t_c + r.t_b + r.t_s)).abs() < 1e-9);
        assert_eq!(report.per_scene.len(), 1);
        assert!(format_bench_table(&records).lines().count() == 3);
        assert_eq!(format_bench_csv(&records).lines().count(), 2);
    }

    #[test]
    fn voxel_reduce_keeps_plurality_ids() {
        let scene = gen_staircase(1, 0.3, 0.3, 0.2, 2e3, 2).unwrap();
        let reduced = voxel_reduce(&scene, 0.02).unwrap();
        assert_eq!(reduced.cloud.len(), reduced.gt_plane_id.len());
        assert!(reduced.gt_plane_id.contains(&0) && reduced.gt_plane_id.contains(&1));
    }
}
