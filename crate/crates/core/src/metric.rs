//! Network distance: half the smallest worst-case dissimilarity discrepancy
//! over correspondences between two node sets.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::{Dissimilarity, Network};
use crate::properties::{AuditReport, Property, Verdict, Witness, WitnessDetail};
use crate::representable::{cluster_representable, RepresenterFamily};

/// Default node cap for exact distance computation.
pub const DEFAULT_EXACT_CAP: usize = 5;

/// Absolute slack in the stability inequality.
pub const STABILITY_SLACK: f64 = 1e-9;

/// A relation between two node sets covering both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(pairs: Vec<(usize, usize)>, nx: usize, ny: usize) -> Result<Self> {
        let mut hit_x = vec![false; nx];
        let mut hit_y = vec![false; ny];
        for &(x, y) in &pairs {
            if x >= nx || y >= ny {
                return Err(Error::InvalidCorrespondence(format!(
                    "pair ({x},{y}) out of range"
                )));
            }
            hit_x[x] = true;
            hit_y[y] = true;
        }
        if let Some(x) = hit_x.iter().position(|h| !h) {
            return Err(Error::InvalidCorrespondence(format!(
                "x node {x} is uncovered"
            )));
        }
        if let Some(y) = hit_y.iter().position(|h| !h) {
            return Err(Error::InvalidCorrespondence(format!(
                "y node {y} is uncovered"
            )));
        }
        Ok(Correspondence { pairs })
    }

    pub fn identity(n: usize) -> Self {
        Correspondence {
            pairs: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn full(nx: usize, ny: usize) -> Self {
        Correspondence {
            pairs: (0..nx).flat_map(|x| (0..ny).map(move |y| (x, y))).collect(),
        }
    }

    /// `graph(f) ∪ graph(g)` for `f: X -> Y` and `g: Y -> X`.
    pub fn from_functions(f: &[usize], g: &[usize]) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = f.iter().enumerate().map(|(x, &y)| (x, y)).collect();
        pairs.extend(g.iter().enumerate().map(|(y, &x)| (x, y)));
        pairs.sort_unstable();
        pairs.dedup();
        Correspondence::new(pairs, f.len(), g.len())
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    fn fits(&self, nx: usize, ny: usize) -> bool {
        self.pairs.iter().all(|&(x, y)| x < nx && y < ny)
    }
}

/// Largest `|A_X(x, x') - A_Y(y, y')|` over pairs of related pairs, without
/// the factor one half.
pub fn distortion<X: Dissimilarity, Y: Dissimilarity>(
    r: &Correspondence,
    nx: &X,
    ny: &Y,
) -> Result<f64> {
    if !r.fits(nx.len(), ny.len()) {
        return Err(Error::InvalidCorrespondence(
            "correspondence does not match the networks".into(),
        ));
    }
    Ok(r.pairs
        .iter()
        .flat_map(|&(x, y)| r.pairs.iter().map(move |&(x2, y2)| (x, y, x2, y2)))
        .map(|(x, y, x2, y2)| (nx.at(x, x2) - ny.at(y, y2)).abs())
        .fold(0.0, f64::max))
}

fn check_cap(size: usize, cap: usize) -> Result<()> {
    if size > cap {
        return Err(Error::InstanceTooLarge { size, cap });
    }
    Ok(())
}

/// Exact network distance for instances within the default cap.
pub fn network_distance_exact<X: Dissimilarity + Sync, Y: Dissimilarity + Sync>(
    nx: &X,
    ny: &Y,
) -> Result<f64> {
    network_distance_exact_with_cap(nx, ny, DEFAULT_EXACT_CAP)
}

/// Exact network distance by branch and bound over function pairs.
///
/// Any correspondence contains `graph(f) ∪ graph(g)` for some
/// `f: X -> Y`, `g: Y -> X` (pick one partner per node), that union is itself
/// a correspondence, and removing pairs never increases distortion. So the
/// minimum over all correspondences is attained on a function pair.
pub fn network_distance_exact_with_cap<X: Dissimilarity + Sync, Y: Dissimilarity + Sync>(
    nx: &X,
    ny: &Y,
    cap: usize,
) -> Result<f64> {
    check_cap(nx.len(), cap)?;
    check_cap(ny.len(), cap)?;
    let (n, m) = (nx.len(), ny.len());
    let ax: Vec<f64> = (0..n * n).map(|k| nx.at(k / n, k % n)).collect();
    let ay: Vec<f64> = (0..m * m).map(|k| ny.at(k / m, k % m)).collect();
    let search = PairSearch {
        n,
        m,
        ax: &ax,
        ay: &ay,
        // Non-negative floats order the same way as their bit patterns.
        best: AtomicU64::new(f64::INFINITY.to_bits()),
    };
    let total_f = (m as u64).pow(n as u32);
    (0..total_f).into_par_iter().for_each(|code| {
        let mut f = vec![0usize; n];
        let mut c = code;
        for slot in f.iter_mut() {
            *slot = (c % m as u64) as usize;
            c /= m as u64;
        }
        search.run(&f);
    });
    Ok(0.5 * f64::from_bits(search.best.load(Ordering::Relaxed)))
}

struct PairSearch<'a> {
    n: usize,
    m: usize,
    ax: &'a [f64],
    ay: &'a [f64],
    best: AtomicU64,
}

impl PairSearch<'_> {
    fn best(&self) -> f64 {
        f64::from_bits(self.best.load(Ordering::Relaxed))
    }

    fn offer(&self, v: f64) {
        self.best.fetch_min(v.to_bits(), Ordering::Relaxed);
    }

    fn run(&self, f: &[usize]) {
        let (n, m) = (self.n, self.m);
        let mut cost = 0.0f64;
        for x in 0..n {
            for x2 in 0..n {
                cost = cost.max((self.ax[x * n + x2] - self.ay[f[x] * m + f[x2]]).abs());
            }
        }
        if cost >= self.best() {
            return;
        }
        let mut g = vec![0usize; m];
        self.descend(f, &mut g, 0, cost);
    }

    fn descend(&self, f: &[usize], g: &mut [usize], y: usize, running: f64) {
        let (n, m) = (self.n, self.m);
        if y == m {
            self.offer(running);
            return;
        }
        for x0 in 0..n {
            let mut cost = running;
            for (y2, &x2) in g[..y].iter().enumerate() {
                cost = cost
                    .max((self.ax[x0 * n + x2] - self.ay[y * m + y2]).abs())
                    .max((self.ax[x2 * n + x0] - self.ay[y2 * m + y]).abs());
            }
            for (x, &fx) in f.iter().enumerate() {
                cost = cost
                    .max((self.ax[x0 * n + x] - self.ay[y * m + fx]).abs())
                    .max((self.ax[x * n + x0] - self.ay[fx * m + y]).abs());
            }
            if cost >= self.best() {
                continue;
            }
            g[y] = x0;
            self.descend(f, g, y + 1, cost);
        }
    }
}

fn pair_distortion(ax: &[f64], n: usize, ay: &[f64], m: usize, f: &[usize], g: &[usize]) -> f64 {
    let mut pairs: Vec<(usize, usize)> = f.iter().enumerate().map(|(x, &y)| (x, y)).collect();
    pairs.extend(g.iter().enumerate().map(|(y, &x)| (x, y)));
    let mut worst = 0.0f64;
    for &(x, y) in &pairs {
        for &(x2, y2) in &pairs {
            worst = worst.max((ax[x * n + x2] - ay[y * m + y2]).abs());
        }
    }
    worst
}

/// Upper bound on the network distance from `trials` seeded random function
/// pairs, each refined by greedy single-coordinate moves. The first trial
/// starts from the label-matching pair when labels coincide. Trials share
/// one random stream, so more trials never give a larger bound.
pub fn network_distance_upper<X: Dissimilarity, Y: Dissimilarity>(
    nx: &X,
    ny: &Y,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let (n, m) = (nx.len(), ny.len());
    let ax: Vec<f64> = (0..n * n).map(|k| nx.at(k / n, k % n)).collect();
    let ay: Vec<f64> = (0..m * m).map(|k| ny.at(k / m, k % m)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for trial in 0..trials {
        let mut f: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
        let mut g: Vec<usize> = (0..m).map(|_| rng.random_range(0..n)).collect();
        if trial == 0 {
            for (x, slot) in f.iter_mut().enumerate() {
                if let Some(y) = ny.labels().iter().position(|l| *l == nx.labels()[x]) {
                    *slot = y;
                }
            }
            for (y, slot) in g.iter_mut().enumerate() {
                if let Some(x) = nx.labels().iter().position(|l| *l == ny.labels()[y]) {
                    *slot = x;
                }
            }
        }
        let mut cur = pair_distortion(&ax, n, &ay, m, &f, &g);
        loop {
            let mut improved = false;
            for x in 0..n {
                for y in 0..m {
                    let old = f[x];
                    f[x] = y;
                    let c = pair_distortion(&ax, n, &ay, m, &f, &g);
                    if c < cur {
                        cur = c;
                        improved = true;
                    } else {
                        f[x] = old;
                    }
                }
            }
            for y in 0..m {
                for x in 0..n {
                    let old = g[y];
                    g[y] = x;
                    let c = pair_distortion(&ax, n, &ay, m, &f, &g);
                    if c < cur {
                        cur = c;
                        improved = true;
                    } else {
                        g[y] = old;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        best = best.min(cur);
    }
    Ok(0.5 * best)
}

/// Checks `d(H(N_X), H(N_Y)) <= d(N_X, N_Y) / sep + slack` with exact distances.
pub fn check_stability(
    family: &RepresenterFamily,
    nx: &Network,
    ny: &Network,
    cap: usize,
) -> Result<AuditReport> {
    check_cap(nx.size(), cap)?;
    check_cap(ny.size(), cap)?;
    let input = network_distance_exact_with_cap(nx, ny, cap)?;
    let hx = cluster_representable(family, nx)?;
    let hy = cluster_representable(family, ny)?;
    let output = network_distance_exact_with_cap(&hx, &hy, cap)?;
    let bound = family.lipschitz_constant() * input;
    if output <= bound + STABILITY_SLACK {
        return Ok(AuditReport {
            property: Property::Stability,
            verdict: Verdict::Holds,
            probes: 1,
            witness: None,
        });
    }
    Ok(AuditReport {
        property: Property::Stability,
        verdict: Verdict::Violated,
        probes: 1,
        witness: Some(Witness {
            method: format!("representable:{}", family.name()),
            network: nx.clone(),
            detail: WitnessDetail::Stability {
                other: ny.clone(),
                input_distance: input,
                output_distance: output,
                bound,
            },
        }),
    })
}
