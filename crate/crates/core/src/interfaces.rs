//! Interfaces: extraction of zeros from snapshots, counting, the Sturm
//! monotonicity check and matching of zeros into continuous branches.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::snapshot::Snapshot;

/// Zeros of one profile at time `t`, strictly increasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub t: f64,
    pub zeros: Vec<f64>,
    /// `+1` for a − → + crossing, `−1` for + → −, `0` when grazing or
    /// unresolved.
    pub signs: Vec<i8>,
}

impl ZeroSet {
    pub fn new(t: f64, zeros: Vec<f64>, signs: Vec<i8>) -> Result<Self> {
        if zeros.len() != signs.len() {
            return Err(Error::DimensionMismatch {
                expected: zeros.len(),
                got: signs.len(),
            });
        }
        if zeros.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain(format!("zeros at t = {t} not strictly increasing")));
        }
        Ok(Self { t, zeros, signs })
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

/// Time series of zero sets, strictly increasing in time.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InterfaceTrack {
    samples: Vec<ZeroSet>,
}

impl InterfaceTrack {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, set: ZeroSet) -> Result<()> {
        if let Some(last) = self.samples.last() {
            if !(set.t > last.t) {
                return Err(Error::Domain(format!(
                    "track times must increase: {} after {}",
                    set.t, last.t
                )));
            }
        }
        self.samples.push(set);
        Ok(())
    }

    pub fn samples(&self) -> &[ZeroSet] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

impl TryFrom<Vec<ZeroSet>> for InterfaceTrack {
    type Error = Error;

    fn try_from(sets: Vec<ZeroSet>) -> Result<Self> {
        let mut track = InterfaceTrack::new();
        for s in sets {
            track.push(s)?;
        }
        Ok(track)
    }
}

/// Root of the secant through `(x0, u0)`, `(x1, u1)`, kept strictly inside
/// the open cell.
fn interpolate_root(x0: f64, u0: f64, x1: f64, u1: f64) -> f64 {
    let xi = (u0 * x1 - u1 * x0) / (u0 - u1);
    if xi <= x0 {
        x0.next_up()
    } else if xi >= x1 {
        x1.next_down()
    } else {
        xi
    }
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Zeros of `u` sampled on `grid`, scanning nodes `first..`.
///
/// Adjacent nodes of strictly opposite sign give a linearly interpolated
/// root. Nodes with `|u| ≤ threshold` count as exact zeros; a maximal run
/// of them collapses to its midpoint, signed by the neighbours on either
/// side (0 when they agree or one is missing).
pub fn zeros_of(grid: &SpatialGrid, u: &[f64], t: f64, threshold: f64, first: usize) -> ZeroSet {
    let n = u.len();
    let is_zero = |k: usize| u[k].abs() <= threshold;
    let mut zeros = Vec::new();
    let mut signs = Vec::new();
    let mut k = first;
    while k < n {
        if is_zero(k) {
            let mut j = k;
            while j + 1 < n && is_zero(j + 1) {
                j += 1;
            }
            let left = if k > first { sign_of(u[k - 1]) } else { 0 };
            let right = if j + 1 < n { sign_of(u[j + 1]) } else { 0 };
            let sign = if left != 0 && right != 0 && left != right { right } else { 0 };
            zeros.push(0.5 * (grid.x(k) + grid.x(j)));
            signs.push(sign);
            k = j + 1;
            continue;
        }
        if k + 1 < n && !is_zero(k + 1) && u[k] * u[k + 1] < 0.0 {
            zeros.push(interpolate_root(grid.x(k), u[k], grid.x(k + 1), u[k + 1]));
            signs.push(if u[k] < 0.0 { 1 } else { -1 });
        }
        k += 1;
    }
    ZeroSet { t, zeros, signs }
}

pub fn extract_zeros(snap: &Snapshot, threshold: f64) -> ZeroSet {
    zeros_of(snap.grid(), snap.values(), snap.t(), threshold, 0)
}

/// Like [`extract_zeros`] but ignores node 0, where a Dirichlet condition
/// pins the solution to zero.
pub fn extract_interior_zeros(snap: &Snapshot, threshold: f64) -> ZeroSet {
    zeros_of(snap.grid(), snap.values(), snap.t(), threshold, 1)
}

pub fn count_zeros(track: &InterfaceTrack) -> Vec<(f64, usize)> {
    track.samples.iter().map(|s| (s.t, s.len())).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sturm {
    Ok,
    Violation { t_before: f64, t_after: f64 },
}

impl Sturm {
    pub fn is_ok(&self) -> bool {
        matches!(self, Sturm::Ok)
    }
}

/// Checks that zero counts never increase in time.
pub fn sturm_check(track: &InterfaceTrack) -> Sturm {
    track
        .samples
        .windows(2)
        .find(|w| w[1].len() > w[0].len())
        .map_or(Sturm::Ok, |w| Sturm::Violation {
            t_before: w[0].t,
            t_after: w[1].t,
        })
}

/// A continuous interface `ξᵢ(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub id: usize,
    pub t: Vec<f64>,
    pub xi: Vec<f64>,
    /// Midpoint between the last sample carrying the branch and the first
    /// without it; `None` if the branch survives to the end of the track.
    pub end: Option<f64>,
}

impl Branch {
    pub fn last_position(&self) -> f64 {
        *self.xi.last().expect("branches are never empty")
    }

    pub fn last_time(&self) -> f64 {
        *self.t.last().expect("branches are never empty")
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().copied().zip(self.xi.iter().copied())
    }
}

/// Greedy nearest-neighbour matching of zeros between consecutive samples,
/// restricted to pairs closer than `window` and never letting branches
/// cross. Unmatched zeros open new branches.
pub fn match_tracks(track: &InterfaceTrack, window: f64) -> Vec<Branch> {
    let mut branches: Vec<Branch> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut prev_t = f64::NAN;

    for set in &track.samples {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (i, &b) in active.iter().enumerate() {
            let p = branches[b].last_position();
            for (j, &q) in set.zeros.iter().enumerate() {
                let d = (q - p).abs();
                if d <= window {
                    pairs.push((d, i, j));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let mut zero_to_branch: Vec<Option<usize>> = vec![None; set.zeros.len()];
        let mut branch_used = vec![false; active.len()];
        let mut accepted: Vec<(usize, usize)> = Vec::new();
        for &(_, i, j) in &pairs {
            if branch_used[i] || zero_to_branch[j].is_some() {
                continue;
            }
            let crosses = accepted
                .iter()
                .any(|&(i2, j2)| (i2 < i && j2 > j) || (i2 > i && j2 < j));
            if crosses {
                continue;
            }
            branch_used[i] = true;
            zero_to_branch[j] = Some(active[i]);
            accepted.push((i, j));
        }

        for (i, &b) in active.iter().enumerate() {
            if !branch_used[i] {
                branches[b].end = Some(0.5 * (prev_t + set.t));
            }
        }

        let mut next_active = Vec::with_capacity(set.zeros.len());
        for (j, &q) in set.zeros.iter().enumerate() {
            let b = match zero_to_branch[j] {
                Some(b) => b,
                None => {
                    branches.push(Branch {
                        id: branches.len(),
                        t: Vec::new(),
                        xi: Vec::new(),
                        end: None,
                    });
                    branches.len() - 1
                }
            };
            branches[b].t.push(set.t);
            branches[b].xi.push(q);
            next_active.push(b);
        }
        active = next_active;
        prev_t = set.t;
    }
    branches
}

/// The branch whose disappearance is the coalescence event of interest:
/// among branches that terminate, the one ending furthest right;
/// otherwise the rightmost branch.
pub fn select_coalescing_branch(branches: &[Branch]) -> Option<&Branch> {
    let by_position = |a: &&Branch, b: &&Branch| a.last_position().total_cmp(&b.last_position());
    branches
        .iter()
        .filter(|b| b.end.is_some())
        .max_by(by_position)
        .or_else(|| branches.iter().max_by(by_position))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snapshot::build_snapshot;
    use proptest::prelude::*;

    fn snap(u: Vec<f64>, h: f64) -> Snapshot {
        let g = SpatialGrid::new(0.0, h * (u.len() - 1) as f64, u.len()).unwrap();
        Snapshot::new(g, 0.0, u).unwrap()
    }

    fn set(t: f64, zeros: Vec<f64>) -> ZeroSet {
        let n = zeros.len();
        ZeroSet::new(t, zeros, vec![0; n]).unwrap()
    }

    #[test]
    fn two_point_crossing() {
        let g = SpatialGrid::new(0.0, 0.02, 3).unwrap();
        let z = extract_zeros(&Snapshot::new(g, 0.0, vec![-1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(z.zeros, vec![0.005]);
        assert_eq!(z.signs, vec![1]);
    }

    #[test]
    fn no_crossing() {
        let z = extract_zeros(&snap(vec![1.0, 3.0, 2.0], 0.01), 0.0);
        assert!(z.is_empty());
    }

    #[test]
    fn tanh_root_matches_bisection() {
        let g = SpatialGrid::with_spacing(0.0, 5.0, 0.01).unwrap();
        let s = build_snapshot(&g, 0.0, |x| (x - 1.0).tanh()).unwrap();
        let z = extract_zeros(&s, 0.0);
        let (mut lo, mut hi) = (0.5f64, 1.5f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (mid - 1.0).tanh() < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert_eq!(z.len(), 1);
        assert!((z.zeros[0] - lo).abs() < 1e-6);
    }

    #[test]
    fn zero_runs_collapse_to_midpoint() {
        let z = extract_zeros(&snap(vec![-1.0, 0.0, 0.0, 0.0, 2.0], 0.1), 0.0);
        assert_eq!(z.len(), 1);
        assert!((z.zeros[0] - 0.2).abs() < 1e-15);
        assert_eq!(z.signs, vec![1]);
        let grazing = extract_zeros(&snap(vec![1.0, 0.0, 1.0], 0.1), 0.0);
        assert_eq!(grazing.signs, vec![0]);
    }

    #[test]
    fn dirichlet_boundary_node_is_skipped() {
        let s = snap(vec![0.0, -0.5, -0.2, 0.3], 0.1);
        assert_eq!(extract_zeros(&s, 0.0).len(), 2);
        let z = extract_interior_zeros(&s, 0.0);
        assert_eq!(z.len(), 1);
        assert!(z.zeros[0] > 0.2 && z.zeros[0] < 0.3);
    }

    #[test]
    fn counts_and_sturm() {
        assert!(count_zeros(&InterfaceTrack::new()).is_empty());
        let t: InterfaceTrack = vec![
            set(0.0, vec![-1.0, 0.0, 1.0]),
            set(0.1, vec![-1.0, 0.0, 1.0]),
            set(0.2, vec![0.0]),
            set(0.3, vec![0.0]),
        ]
        .try_into()
        .unwrap();
        let counts: Vec<usize> = count_zeros(&t).into_iter().map(|c| c.1).collect();
        assert_eq!(counts, vec![3, 3, 1, 1]);
        assert!(sturm_check(&t).is_ok());
        let bad: InterfaceTrack = vec![set(0.0, vec![0.0]), set(0.5, vec![-1.0, 1.0])]
            .try_into()
            .unwrap();
        assert_eq!(
            sturm_check(&bad),
            Sturm::Violation {
                t_before: 0.0,
                t_after: 0.5
            }
        );
    }

    #[test]
    fn single_persistent_branch() {
        let t: InterfaceTrack = (0..10)
            .map(|m| set(m as f64 * 0.1, vec![1.0 - 0.01 * m as f64]))
            .collect::<Vec<_>>()
            .try_into()
            .unwrap();
        let b = match_tracks(&t, 0.2);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].t.len(), 10);
        assert_eq!(b[0].end, None);
    }

    #[test]
    fn pitchfork_topology() {
        let mut sets = Vec::new();
        for m in 0..20 {
            let t = m as f64 * 0.01;
            let a = (6.0 * (0.1 - t)).max(0.0).sqrt();
            sets.push(if t < 0.1 { set(t, vec![-a, 0.0, a]) } else { set(t, vec![0.0]) });
        }
        let b = match_tracks(&sets.try_into().unwrap(), 0.5);
        assert_eq!(b.len(), 3);
        let ended: Vec<f64> = b.iter().filter_map(|b| b.end).collect();
        assert_eq!(ended.len(), 2);
        assert_eq!(ended[0], ended[1]);
        assert!(b.iter().any(|b| b.end.is_none() && b.t.len() == 20));
    }

    #[test]
    fn fold_branches_terminate_together() {
        let tau = 1e-4;
        let mut sets = Vec::new();
        for m in 0..6000 {
            let t = m as f64 * tau;
            if t < 0.5 - tau / 2.0 {
                let a = (2.0 * (0.5 - t)).sqrt();
                sets.push(set(t, vec![-a, a]));
            } else {
                sets.push(set(t, vec![]));
            }
        }
        let b = match_tracks(&sets.try_into().unwrap(), 0.2);
        assert_eq!(b.len(), 2);
        for br in &b {
            assert!((br.end.unwrap() - 0.5).abs() <= tau);
        }
        let chosen = select_coalescing_branch(&b).unwrap();
        assert!(chosen.last_position() > 0.0);
    }

    proptest! {
        #[test]
        fn count_equals_sign_changes(u in prop::collection::vec(
            prop_oneof![-10.0f64..-1e-3, 1e-3f64..10.0], 3..200)) {
            let s = snap(u.clone(), 0.01);
            let z = extract_zeros(&s, 0.0);
            let changes = u.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
            prop_assert_eq!(z.len(), changes);
            let g = s.grid();
            for &xi in &z.zeros {
                let k = ((xi - g.x_min()) / g.h()).floor() as usize;
                prop_assert!(xi > g.x(k) && xi < g.x(k + 1));
            }
        }

        #[test]
        fn branches_are_continuous_and_ordered(
            drift in prop::collection::vec(-0.008f64..0.008, 3),
            steps in 5usize..60,
        ) {
            let mut sets = Vec::new();
            let mut pos = vec![-1.0, 0.0, 1.0];
            for m in 0..steps {
                sets.push(set(m as f64, pos.clone()));
                for (p, d) in pos.iter_mut().zip(&drift) { *p += d; }
            }
            let window = 0.2;
            let branches = match_tracks(&sets.try_into().unwrap(), window);
            prop_assert_eq!(branches.len(), 3);
            for b in &branches {
                for w in b.xi.windows(2) {
                    prop_assert!((w[1] - w[0]).abs() <= window);
                }
            }
            for m in 0..steps {
                prop_assert!(branches[0].xi[m] < branches[1].xi[m]);
                prop_assert!(branches[1].xi[m] < branches[2].xi[m]);
            }
        }
    }
}
