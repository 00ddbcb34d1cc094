//! The sampling solver: sphere samples in the span of the top `r` singular
//! pairs, a two-step projection per sample, and best-of-T selection.

use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, RankRFactors, SvdOptions};
use crate::matrix_io::CrossCov;
use crate::projections::{sq_norm_on, ConstraintSpec, Projection, Scratch, SparseVector};
use crate::rng;

/// δ used to translate an explicit round count back into an accuracy ε.
pub const DEFAULT_DELTA: f64 = 0.1;

/// How many rounds to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Samples {
    /// Exactly `T` rounds.
    Count(u64),
    /// Enough rounds for an ε/2-net of the sphere with probability `1 − δ`.
    Accuracy { epsilon: f64, delta: f64 },
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub rank: usize,
    pub samples: Samples,
    pub constraint_u: ConstraintSpec,
    pub constraint_v: ConstraintSpec,
    pub seed: u64,
    pub workers: usize,
    /// Report `uᵀ M v` for the selected pair.
    pub rescore_full: bool,
    /// Select by `uᵀ M v` instead of the low-rank objective.
    pub select_on_full: bool,
    pub svd: SvdOptions,
    /// Power iterations for the residual norm estimate.
    pub residual_iters: usize,
}

impl SolverConfig {
    pub fn new(
        rank: usize,
        samples: Samples,
        constraint_u: ConstraintSpec,
        constraint_v: ConstraintSpec,
    ) -> Self {
        Self {
            rank,
            samples,
            constraint_u,
            constraint_v,
            seed: 0,
            workers: 1,
            rescore_full: true,
            select_on_full: false,
            svd: SvdOptions::default(),
            residual_iters: 50,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    /// Resolved round count and the (ε, δ) pair the bound is reported for.
    pub fn resolve_samples(&self) -> Result<(u64, f64, f64)> {
        match self.samples {
            Samples::Count(t) => {
                if t == 0 {
                    return Err(Error::InvalidParameter(
                        "round count must be at least 1".into(),
                    ));
                }
                Ok((
                    t,
                    implied_epsilon(self.rank, t, DEFAULT_DELTA),
                    DEFAULT_DELTA,
                ))
            }
            Samples::Accuracy { epsilon, delta } => Ok((
                samples_for_epsilon(self.rank, epsilon, delta)?,
                epsilon,
                delta,
            )),
        }
    }
}

/// One round's output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub u: SparseVector,
    pub v: SparseVector,
    pub obj_lowrank: f64,
    pub round: u64,
}

/// A round whose projection had nothing to project.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Discarded(pub u64);

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub svd: Duration,
    pub residual: Duration,
    pub rounds: Duration,
    pub total: Duration,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub best: Candidate,
    pub obj_full: Option<f64>,
    pub sigma1: f64,
    pub sigma_r_plus_1: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub rounds: u64,
    pub theorem1_slack: f64,
    pub rounds_discarded: u64,
    pub timings: PhaseTimings,
}

/// Uniform point on the unit sphere in `r` dimensions.
pub fn sample_sphere<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Vec<f64> {
    let mut c = vec![0.0; r];
    sample_sphere_into(rng, &mut c);
    c
}

/// Fills `c` with a uniform sphere point; redraws the (measure-zero) all-zero
/// Gaussian vector.
#[inline]
pub fn sample_sphere_into<R: Rng + ?Sized>(rng: &mut R, c: &mut [f64]) {
    loop {
        let mut sq = 0.0;
        for x in c.iter_mut() {
            *x = StandardNormal.sample(rng);
            sq += *x * *x;
        }
        if sq > 0.0 {
            let n = sq.sqrt();
            c.iter_mut().for_each(|x| *x /= n);
            return;
        }
    }
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {x} must lie in (0, 1)"
        )))
    }
}

fn samples_real(r: usize, epsilon: f64, delta: f64) -> f64 {
    let r_f = r as f64;
    r_f * (4.0 / epsilon).powf(r_f) * (4.0 / (epsilon * delta)).ln()
}

/// Round count `⌈r·(ε/4)^(−r)·ln(4/(εδ))⌉` for an ε/2-net with probability
/// `1 − δ` (hidden constant fixed to 1).
pub fn samples_for_epsilon(r: usize, epsilon: f64, delta: f64) -> Result<u64> {
    if r == 0 {
        return Err(Error::InvalidParameter("rank must be at least 1".into()));
    }
    check_unit_interval("epsilon", epsilon)?;
    check_unit_interval("delta", delta)?;
    let t = samples_real(r, epsilon, delta).ceil();
    if !t.is_finite() || t > i64::MAX as f64 {
        return Err(Error::Capacity {
            what: format!("rank {r}, epsilon {epsilon}, delta {delta}"),
            required: format!("{t:e} rounds"),
        });
    }
    Ok(t as u64)
}

/// Smallest ε for which `samples_for_epsilon(r, ε, δ) ≤ t`; 1 if no ε < 1
/// qualifies.
pub fn implied_epsilon(r: usize, t: u64, delta: f64) -> f64 {
    let t = t as f64;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    if samples_real(r, 1.0 - 1e-12, delta).ceil() > t {
        return 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if samples_real(r, mid, delta).ceil() <= t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Additive offset `ε·σ₁ + 2·σ_{r+1}` of the approximation guarantee.
pub fn theorem1_slack(sigma1: f64, sigma_r_plus_1: f64, epsilon: f64) -> f64 {
    epsilon * sigma1 + 2.0 * sigma_r_plus_1
}

/// Buffers for one worker's rounds.
struct RoundWorkspace {
    c: Vec<f64>,
    a: Vec<f64>,
    coeff: Vec<f64>,
    b: Vec<f64>,
    u: SparseVector,
    v: SparseVector,
    scratch_u: Scratch,
    scratch_v: Scratch,
}

impl RoundWorkspace {
    fn new(f: &RankRFactors) -> Self {
        Self {
            c: vec![0.0; f.rank()],
            a: vec![0.0; f.m()],
            coeff: vec![0.0; f.rank()],
            b: vec![0.0; f.n()],
            u: SparseVector::empty(f.m()),
            v: SparseVector::empty(f.n()),
            scratch_u: Scratch::default(),
            scratch_v: Scratch::default(),
        }
    }

    /// Sample point used by `round`: rounds 0 and 1 are `±e₁`, the rest are
    /// drawn from the round's own stream.
    #[inline]
    fn load_sample(&mut self, seed: u64, round: u64) {
        if round < 2 {
            self.c.iter_mut().for_each(|x| *x = 0.0);
            self.c[0] = if round == 0 { 1.0 } else { -1.0 };
        } else {
            // only the direction of c matters: both projections are scale
            // invariant, so the Gaussian draw is used unnormalized
            let mut g = rng::stream(seed, rng::DOMAIN_ROUND, round);
            self.c
                .iter_mut()
                .for_each(|x| *x = StandardNormal.sample(&mut g));
        }
    }

    /// Two-step maximization for the loaded sample without materializing
    /// `u` and `v`. Returns `bᵀv = ‖b restricted to supp(v)‖`; rounds that
    /// provably cannot beat `floor` stop early. Leaves `a` and `b` for
    /// [`Self::materialize`] when it returns [`Eval::Value`].
    #[inline]
    fn evaluate(
        &mut self,
        f: &RankRFactors,
        pu: &dyn Projection,
        pv: &dyn Projection,
        floor: f64,
    ) -> Eval {
        f.left_apply_into(&self.c, &mut self.a);
        let su = pu.support_into(&self.a, &mut self.scratch_u);
        let nu = sq_norm_on(&self.a, su).sqrt();
        if nu == 0.0 || !nu.is_finite() {
            return Eval::Discarded;
        }
        f.restricted_coeff_into(&self.a, su, 1.0 / nu, &mut self.coeff);
        // ‖b_S‖ ≤ ‖b‖; the slack covers rounding in both. A zero bound falls
        // through so the round is counted as discarded wherever it runs.
        let bound = f.right_norm_bound(&self.coeff);
        if bound > 0.0 && bound * (1.0 + PRUNE_SLACK) < floor {
            return Eval::Pruned;
        }
        f.right_from_coeff_into(&self.coeff, &mut self.b);
        let sv = pv.support_into(&self.b, &mut self.scratch_v);
        let nv = sq_norm_on(&self.b, sv).sqrt();
        if nv == 0.0 || !nv.is_finite() {
            return Eval::Discarded;
        }
        Eval::Value(nv)
    }

    /// Builds `u` and `v` for the last successful [`Self::evaluate`].
    fn materialize(&mut self, pu: &dyn Projection, pv: &dyn Projection) {
        pu.project_into(&self.a, &mut self.scratch_u, &mut self.u)
            .expect("evaluated round has a nonzero left vector");
        pv.project_into(&self.b, &mut self.scratch_v, &mut self.v)
            .expect("evaluated round has a nonzero right vector");
    }
}

/// Relative margin a bound must clear before a round is skipped.
const PRUNE_SLACK: f64 = 1e-10;

enum Eval {
    Value(f64),
    /// Cannot exceed the current best.
    Pruned,
    /// A projection input was exactly zero.
    Discarded,
}

/// One round for an explicit sample `c` (any nonzero scale).
pub fn run_round(
    f: &RankRFactors,
    c: &[f64],
    pu: &dyn Projection,
    pv: &dyn Projection,
    round: u64,
) -> Result<Candidate, Discarded> {
    assert_eq!(c.len(), f.rank(), "sample length must equal the rank");
    let mut ws = RoundWorkspace::new(f);
    ws.c.copy_from_slice(c);
    let Eval::Value(obj) = ws.evaluate(f, pu, pv, f64::NEG_INFINITY) else {
        return Err(Discarded(round));
    };
    ws.materialize(pu, pv);
    Ok(Candidate {
        u: ws.u,
        v: ws.v,
        obj_lowrank: obj,
        round,
    })
}

struct ChunkBest {
    score: f64,
    candidate: Option<Candidate>,
    discarded: u64,
}

fn run_chunk(
    f: &RankRFactors,
    m: &CrossCov,
    pu: &dyn Projection,
    pv: &dyn Projection,
    seed: u64,
    select_on_full: bool,
    rounds: std::ops::Range<u64>,
) -> ChunkBest {
    let mut ws = RoundWorkspace::new(f);
    let mut best = ChunkBest {
        score: f64::NEG_INFINITY,
        candidate: None,
        discarded: 0,
    };
    for round in rounds {
        ws.load_sample(seed, round);
        // a pruned round is strictly below the best, so skipping it never
        // changes the selection
        let floor = if select_on_full {
            f64::NEG_INFINITY
        } else {
            best.score
        };
        let obj = match ws.evaluate(f, pu, pv, floor) {
            Eval::Value(obj) => obj,
            Eval::Pruned => continue,
            Eval::Discarded => {
                best.discarded += 1;
                continue;
            }
        };
        let score = if select_on_full {
            ws.materialize(pu, pv);
            bilinear(m, &ws.u, &ws.v)
        } else {
            obj
        };
        if score > best.score {
            if !select_on_full {
                ws.materialize(pu, pv);
            }
            best.score = score;
            match &mut best.candidate {
                Some(c) => {
                    c.u.clone_from(&ws.u);
                    c.v.clone_from(&ws.v);
                    c.obj_lowrank = obj;
                    c.round = round;
                }
                None => {
                    best.candidate = Some(Candidate {
                        u: ws.u.clone(),
                        v: ws.v.clone(),
                        obj_lowrank: obj,
                        round,
                    })
                }
            }
        }
    }
    best
}

/// `uᵀ M v` for sparse `u`, `v`.
pub fn bilinear(m: &CrossCov, u: &SparseVector, v: &SparseVector) -> f64 {
    let mut acc = 0.0;
    for (i, ui) in u.pairs() {
        let row = m.row(i);
        acc += ui * v.dot_dense(row);
    }
    acc
}

/// Runs `T` rounds over a static contiguous partition across `workers`
/// threads and reduces by (score, lower round).
#[allow(clippy::too_many_arguments)]
pub fn run_rounds(
    f: &RankRFactors,
    m: &CrossCov,
    pu: &dyn Projection,
    pv: &dyn Projection,
    seed: u64,
    total: u64,
    workers: usize,
    select_on_full: bool,
) -> (Option<Candidate>, u64) {
    let workers = (workers.max(1) as u64).min(total.max(1));
    let chunk = total.div_ceil(workers);
    let ranges: Vec<_> = (0..workers)
        .map(|w| (w * chunk).min(total)..((w + 1) * chunk).min(total))
        .collect();

    let results: Vec<ChunkBest> = if workers == 1 {
        vec![run_chunk(f, m, pu, pv, seed, select_on_full, 0..total)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .into_iter()
                .map(|range| {
                    scope.spawn(move || run_chunk(f, m, pu, pv, seed, select_on_full, range))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("round worker panicked"))
                .collect()
        })
    };

    let mut best: Option<(f64, Candidate)> = None;
    let mut discarded = 0;
    for r in results {
        discarded += r.discarded;
        if let Some(c) = r.candidate {
            if best.as_ref().is_none_or(|(s, _)| r.score > *s) {
                best = Some((r.score, c));
            }
        }
    }
    (best.map(|(_, c)| c), discarded)
}

/// Full solve: truncated SVD, residual estimate, `T` rounds, selection.
pub fn solve(m: &CrossCov, config: &SolverConfig) -> Result<SolveReport> {
    let start = Instant::now();
    let (total, epsilon, delta) = config.resolve_samples()?;
    let pu = config.constraint_u.resolve(m.m())?;
    let pv = config.constraint_v.resolve(m.n())?;

    let t0 = Instant::now();
    let f = linalg::truncated_svd(m, config.rank, config.svd, config.seed)?;
    let svd_time = t0.elapsed();

    let t0 = Instant::now();
    let est = linalg::spectral_estimates(m, &f, config.residual_iters, config.seed);
    let residual_time = t0.elapsed();

    let t0 = Instant::now();
    let (best, discarded) = run_rounds(
        &f,
        m,
        pu.as_ref(),
        pv.as_ref(),
        config.seed,
        total,
        config.workers,
        config.select_on_full,
    );
    let rounds_time = t0.elapsed();

    let mut best = best.ok_or(Error::DegenerateInput { rounds: total })?;
    if best.u.canonicalize_sign() {
        best.v.negate();
    }
    let obj_full = config.rescore_full.then(|| bilinear(m, &best.u, &best.v));

    Ok(SolveReport {
        best,
        obj_full,
        sigma1: est.sigma1,
        sigma_r_plus_1: est.sigma_r_plus_1,
        epsilon,
        delta,
        rounds: total,
        theorem1_slack: theorem1_slack(est.sigma1, est.sigma_r_plus_1, epsilon),
        rounds_discarded: discarded,
        timings: PhaseTimings {
            svd: svd_time,
            residual: residual_time,
            rounds: rounds_time,
            total: start.elapsed(),
        },
    })
}
