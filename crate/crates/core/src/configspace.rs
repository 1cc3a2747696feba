//! Configurations up to relabelling, the coincidence set, and lifts of
//! reduced curves back to labelled configuration space.

use std::cmp::Ordering;
use std::io::Write;

use crate::configuration::{distance, Configuration};
use crate::error::{param, Result};
use crate::integrator::{write_trajectory_rows, Sample, Trajectory};
use crate::permutations::Permutation;
use crate::tolerances::MAX_LIFT_N;

/// A configuration with its particles in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPoint {
    representative: Configuration,
}

impl ReducedPoint {
    pub fn representative(&self) -> &Configuration {
        &self.representative
    }

    pub fn into_configuration(self) -> Configuration {
        self.representative
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Sorting permutation `P` with `apply(P, x)` canonical.
pub fn canonical_order(x: &Configuration) -> Permutation {
    let mut order: Vec<usize> = (0..x.particles()).collect();
    order.sort_by(|&a, &b| lexicographic(x.position(a), x.position(b)));
    // order[slot] = particle; apply needs image[particle] = slot.
    let mut images = vec![0; order.len()];
    for (slot, &p) in order.iter().enumerate() {
        images[p] = slot;
    }
    Permutation::from_images_unchecked(images)
}

pub fn reduced_representative(x: &Configuration) -> ReducedPoint {
    let mut positions: Vec<&[f64]> = x.positions().collect();
    positions.sort_by(|a, b| lexicographic(a, b));
    let coords = positions.concat();
    ReducedPoint { representative: x.with_coords_unchecked(coords) }
}

pub fn min_pairwise_distance(x: &Configuration) -> Result<f64> {
    if x.particles() < 2 {
        return param("pair distances need at least two particles");
    }
    Ok(min_pairwise_distance_flat(x.coords(), x.particles(), x.dim()))
}

pub(crate) fn min_pairwise_distance_flat(coords: &[f64], n: usize, d: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            best = best.min(distance(&coords[i * d..(i + 1) * d], &coords[j * d..(j + 1) * d]));
        }
    }
    best
}

/// Canonicalises every sample of a labelled trajectory.
pub fn reduce_trajectory(traj: &Trajectory) -> Trajectory {
    let samples = traj
        .samples
        .iter()
        .map(|s| Sample { t: s.t, x: reduced_representative(&s.x).into_configuration() })
        .collect();
    Trajectory { samples, meta: traj.meta.clone() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lifts {
    pub curves: Vec<Trajectory>,
    /// Some sample lies on the coincidence set, so distinct labellings
    /// agree there; curves that agree at every sample were merged.
    pub degenerate: bool,
}

/// All `N!` labelled curves over a reduced curve, one per permutation.
pub fn lift_trajectory(traj: &Trajectory) -> Result<Lifts> {
    let n = traj.particles();
    if n > MAX_LIFT_N {
        return param(format!("lifting is limited to N <= {MAX_LIFT_N}, got {n}"));
    }
    let degenerate = n >= 2 && traj.samples.iter().any(|s| min_pairwise_distance_flat(s.x.coords(), n, s.x.dim()) == 0.0);
    let mut curves: Vec<Trajectory> = Vec::new();
    for p in Permutation::all(n) {
        let samples: Vec<Sample> = traj
            .samples
            .iter()
            .map(|s| Sample { t: s.t, x: s.x.with_coords_unchecked(p.apply_flat(s.x.coords(), s.x.dim())) })
            .collect();
        if degenerate && curves.iter().any(|c| c.samples == samples) {
            continue;
        }
        curves.push(Trajectory { samples, meta: traj.meta.clone() });
    }
    Ok(Lifts { curves, degenerate })
}

/// Reduced trajectory CSV: the trajectory schema preceded by a
/// `# canonical=true` line.
pub fn write_reduced_csv<W: Write>(traj: &Trajectory, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# canonical=true")?;
    write_trajectory_rows(&reduce_trajectory(traj), &mut out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, d: usize, c: &[f64]) -> Configuration {
        Configuration::new(n, d, c.to_vec()).unwrap()
    }

    #[test]
    fn sorts_one_dimensional_pairs() {
        let r = reduced_representative(&cfg(2, 1, &[2.0, 1.0]));
        assert_eq!(r.representative().coords(), &[1.0, 2.0]);
        let again = reduced_representative(r.representative());
        assert_eq!(again, r);
    }

    #[test]
    fn ties_fall_through_to_the_next_axis() {
        let r = reduced_representative(&cfg(3, 2, &[1.0, 5.0, 1.0, -2.0, 0.0, 9.0]));
        assert_eq!(r.representative().coords(), &[0.0, 9.0, 1.0, -2.0, 1.0, 5.0]);
    }

    #[test]
    fn canonical_order_agrees_with_representative() {
        let x = cfg(4, 2, &[3.0, 0.0, -1.0, 2.0, 3.0, -1.0, 0.5, 0.5]);
        let p = canonical_order(&x);
        assert_eq!(p.apply(&x).unwrap(), reduced_representative(&x).into_configuration());
    }

    #[test]
    fn three_four_five() {
        assert_eq!(min_pairwise_distance(&cfg(2, 2, &[0.0, 0.0, 3.0, 4.0])).unwrap(), 5.0);
        assert_eq!(min_pairwise_distance(&cfg(2, 2, &[1.0, 1.0, 1.0, 1.0])).unwrap(), 0.0);
        assert!(min_pairwise_distance(&cfg(1, 2, &[1.0, 1.0])).is_err());
    }

    fn reduced_curve(points: &[[f64; 2]]) -> Trajectory {
        let mut t = Trajectory::single(cfg(2, 1, &points[0]), 0.0);
        for (i, p) in points.iter().enumerate().skip(1) {
            t.samples.push(Sample { t: i as f64, x: cfg(2, 1, p) });
        }
        t
    }

    #[test]
    fn pair_lifts_are_mirror_images() {
        let l = lift_trajectory(&reduced_curve(&[[0.0, 1.0], [0.5, 2.0]])).unwrap();
        assert!(!l.degenerate);
        assert_eq!(l.curves.len(), 2);
        assert_eq!(l.curves[1].samples[1].x.coords(), &[2.0, 0.5]);
    }

    #[test]
    fn coincident_curve_merges_lifts() {
        let l = lift_trajectory(&reduced_curve(&[[1.0, 1.0], [2.0, 2.0]])).unwrap();
        assert!(l.degenerate);
        assert_eq!(l.curves.len(), 1);
        let touching = lift_trajectory(&reduced_curve(&[[1.0, 1.0], [1.0, 2.0]])).unwrap();
        assert!(touching.degenerate);
        assert_eq!(touching.curves.len(), 2);
    }

    #[test]
    fn reduced_csv_has_marker_line() {
        let mut buf = Vec::new();
        write_reduced_csv(&reduced_curve(&[[2.0, 1.0]]), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# canonical=true"));
        assert_eq!(lines.next(), Some("t,particle,axis,value"));
        assert!(lines.next().unwrap().ends_with(",0,0,1.0000000000000000e0"));
    }
}
