//! Microscopic cross-check of the Markovian description: sample the
//! stochastic field as an Ornstein-Uhlenbeck process, evolve unitary
//! trajectories under the piecewise-constant field, and average. Every
//! trajectory is exactly unitary, so the ensemble mean is positive by
//! construction, in contrast with the Markovian map.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::algebra::{bloch_compose, tensor, BlochVector, ComplexMatrix, HERM_TOL};
use crate::error::{Error, Result};
use crate::generators::{GeneratorParams, PhysicalParams};
use crate::propagation::propagate_bloch_analytic;

/// How a noise path was constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    OnSiteOnly,
    SharedComponent,
}

/// A sampled realization of the field component V3 on an even grid.
#[derive(Clone, Debug)]
pub struct NoisePath {
    pub dt: f64,
    pub values: Vec<f64>,
    pub seed: u64,
    pub kind: NoiseKind,
}

/// Default integration step: fifty points per correlation time and per
/// splitting period scale.
pub fn default_step(p: &PhysicalParams) -> f64 {
    (1.0 / (50.0 * p.mu)).min(1.0 / (50.0 * p.omega0))
}

/// Exact-discretization recursion for the stationary Gaussian process
/// with covariance g^2 e^{-mu |tau|}: the sampled chain has exactly that
/// covariance at the grid lags, for any dt.
fn ou_values(g2: f64, decay: f64, dt: f64, n_steps: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let g = g2.sqrt();
    let phi = (-decay * dt).exp();
    let step_sd = g * (1.0 - phi * phi).sqrt();
    let mut values = Vec::with_capacity(n_steps + 1);
    let normal = StandardNormal;
    let first: f64 = normal.sample(rng);
    values.push(g * first);
    for _ in 0..n_steps {
        let xi: f64 = normal.sample(rng);
        let prev = *values.last().expect("non-empty");
        values.push(phi * prev + step_sd * xi);
    }
    values
}

fn step_count(dt: f64, t_max: f64) -> usize {
    (t_max / dt - 1e-9).ceil().max(1.0) as usize
}

/// Stationary Ornstein-Uhlenbeck path with variance g^2 and decay mu,
/// sampled on 0, dt, 2 dt, ..; the initial value is drawn from the
/// stationary distribution. Reproducible from the seed.
pub fn ou_path(g2: f64, mu: f64, dt: f64, t_max: f64, seed: u64) -> Result<NoisePath> {
    if mu <= 0.0 {
        return Err(Error::ParamOutOfRange {
            name: "mu",
            value: mu,
        });
    }
    if dt <= 0.0 || dt >= 1.0 / mu {
        return Err(Error::StepTooCoarse { dt, tau: 1.0 / mu });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = ou_values(g2, mu, dt, step_count(dt, t_max), &mut rng);
    Ok(NoisePath {
        dt,
        values,
        seed,
        kind: NoiseKind::OnSiteOnly,
    })
}

/// Pair of field paths with cross covariance f^2 e^{-nu |tau|}, realized
/// as independent on-site processes plus a shared component. The shared
/// construction adds f^2 e^{-nu |tau|} to each auto-covariance; exact
/// agreement with the on-site covariance therefore holds only at f2 = 0,
/// and the regime of interest keeps f2 subdominant.
pub fn correlated_pair_paths(
    g2: f64,
    f2: f64,
    mu: f64,
    nu: f64,
    dt: f64,
    t_max: f64,
    seed: u64,
) -> Result<(NoisePath, NoisePath)> {
    if f2 > g2 {
        return Err(Error::CrossDominant { f2, g2 });
    }
    if nu <= 0.0 {
        return Err(Error::ParamOutOfRange {
            name: "nu",
            value: nu,
        });
    }
    if dt <= 0.0 || dt >= 1.0 / mu || dt >= 1.0 / nu {
        return Err(Error::StepTooCoarse {
            dt,
            tau: (1.0 / mu).min(1.0 / nu),
        });
    }
    let n_steps = step_count(dt, t_max);
    let kind = if f2 == 0.0 {
        NoiseKind::OnSiteOnly
    } else {
        NoiseKind::SharedComponent
    };

    let draw = |stream: u64, strength: f64, decay: f64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        ou_values(strength, decay, dt, n_steps, &mut rng)
    };
    let y1 = draw(0, g2, mu);
    let y2 = draw(1, g2, mu);
    let shared = draw(2, f2, nu);

    let v1: Vec<f64> = y1.iter().zip(&shared).map(|(a, b)| a + b).collect();
    let v2: Vec<f64> = y2.iter().zip(&shared).map(|(a, b)| a + b).collect();
    Ok((
        NoisePath {
            dt,
            values: v1,
            seed,
            kind,
        },
        NoisePath {
            dt,
            values: v2,
            seed,
            kind,
        },
    ))
}

/// Exact one-step unitary for the piecewise-constant Hamiltonian
/// (omega0/2) sigma1 + v sigma3, as a flat 2x2 complex array.
fn step_unitary(omega0: f64, v: f64, dt: f64) -> [Complex64; 4] {
    let a = 0.5 * omega0;
    let w = (a * a + v * v).sqrt();
    if w == 0.0 {
        return [
            Complex64::ONE,
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::ONE,
        ];
    }
    let (s, c) = (w * dt).sin_cos();
    let n1 = a / w;
    let n3 = v / w;
    [
        Complex64::new(c, -s * n3),
        Complex64::new(0.0, -s * n1),
        Complex64::new(0.0, -s * n1),
        Complex64::new(c, s * n3),
    ]
}

/// rho -> U rho U' on flat 2x2 arrays.
fn conjugate_2x2(u: &[Complex64; 4], r: &[Complex64; 4]) -> [Complex64; 4] {
    let ur = [
        u[0] * r[0] + u[1] * r[2],
        u[0] * r[1] + u[1] * r[3],
        u[2] * r[0] + u[3] * r[2],
        u[2] * r[1] + u[3] * r[3],
    ];
    [
        ur[0] * u[0].conj() + ur[1] * u[1].conj(),
        ur[0] * u[2].conj() + ur[1] * u[3].conj(),
        ur[2] * u[0].conj() + ur[3] * u[1].conj(),
        ur[2] * u[2].conj() + ur[3] * u[3].conj(),
    ]
}

fn flat(m: &ComplexMatrix) -> [Complex64; 4] {
    [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

fn unflat(r: &[Complex64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_rows(2, r)
}

/// Evolve a state along sampled noise paths with the field held constant
/// over each step and the step exponential taken exactly: each step
/// preserves trace and positivity. One path drives a single qubit; two
/// paths drive the two factors of a 4x4 pair state.
pub fn trajectory_evolve(
    rho0: &ComplexMatrix,
    paths: &[&NoisePath],
    omega0: f64,
) -> Result<Vec<ComplexMatrix>> {
    rho0.check_hermitian(HERM_TOL)?;
    match (rho0.dim(), paths.len()) {
        (2, 1) => {}
        (4, 2) => {}
        (d, p) => {
            return Err(Error::GridMismatch {
                detail: format!("{p} path(s) for a {d}x{d} state"),
            })
        }
    }
    let n = paths[0].values.len();
    let dt = paths[0].dt;
    if paths.iter().any(|p| p.values.len() != n || p.dt != dt) {
        return Err(Error::GridMismatch {
            detail: "paths differ in length or step".into(),
        });
    }

    let mut out = Vec::with_capacity(n);
    out.push(rho0.clone());
    if rho0.dim() == 2 {
        let mut r = flat(rho0);
        for k in 0..n - 1 {
            let u = step_unitary(omega0, paths[0].values[k], dt);
            r = conjugate_2x2(&u, &r);
            out.push(unflat(&r));
        }
    } else {
        let mut r = rho0.clone();
        for k in 0..n - 1 {
            let u1 = unflat(&step_unitary(omega0, paths[0].values[k], dt));
            let u2 = unflat(&step_unitary(omega0, paths[1].values[k], dt));
            let u = tensor(&u1, &u2);
            r = &(&u * &r) * &u.adjoint();
            out.push(r.clone());
        }
    }
    Ok(out)
}

/// Ensemble mean with per-component standard errors.
#[derive(Clone, Debug)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    /// Mean density matrix per output time, assembled from the averaged
    /// Pauli coefficients so the trace is exactly one.
    pub mean_states: Vec<ComplexMatrix>,
    /// Standard error per Pauli coefficient (identity excluded) per time.
    pub stderr: Vec<Vec<f64>>,
    pub n_traj: usize,
    pub seed: u64,
}

/// Time grid and resolution of an ensemble run.
#[derive(Clone, Copy, Debug)]
pub struct EnsembleGrid {
    pub t_max: f64,
    /// Number of output intervals; states are captured at
    /// j * t_max / n_out for j = 0..=n_out.
    pub n_out: usize,
    /// Requested integration step; rounded down so an integer number of
    /// steps lands exactly on each output time.
    pub dt: f64,
}

impl EnsembleGrid {
    fn resolve(&self) -> (usize, f64) {
        let span = self.t_max / self.n_out as f64;
        let per_interval = (span / self.dt - 1e-9).ceil().max(1.0) as usize;
        (per_interval, span / per_interval as f64)
    }
}

/// Per-trajectory seed derivation (splitmix64 of the base seed and index).
fn trajectory_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Bloch components of one trajectory at the output times, flattened.
fn run_trajectory(
    rho0_flat: &[Complex64; 4],
    p: &PhysicalParams,
    per_interval: usize,
    n_out: usize,
    dt: f64,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_steps = per_interval * n_out;
    let path = ou_values(p.g2, p.mu, dt, n_steps, &mut rng);
    let mut comps = Vec::with_capacity((n_out + 1) * 3);
    let push = |comps: &mut Vec<f64>, r: &[Complex64; 4]| {
        comps.push(0.5 * (r[1] + r[2]).re);
        comps.push(0.5 * (r[2] - r[1]).im);
        comps.push(0.5 * (r[0] - r[3]).re);
    };
    let mut r = *rho0_flat;
    push(&mut comps, &r);
    for j in 0..n_out {
        for k in 0..per_interval {
            let u = step_unitary(p.omega0, path[j * per_interval + k], dt);
            r = conjugate_2x2(&u, &r);
        }
        push(&mut comps, &r);
    }
    comps
}

/// Average `n_traj` unitary trajectories of a single qubit in fixed seed
/// order. The reduction order is independent of the thread count, so the
/// result is bitwise reproducible from the seed.
pub fn ensemble_average(
    rho0: &ComplexMatrix,
    n_traj: usize,
    p: &PhysicalParams,
    grid: &EnsembleGrid,
    seed: u64,
) -> Result<EnsembleResult> {
    assert!(n_traj >= 1, "at least one trajectory");
    assert_eq!(
        rho0.dim(),
        2,
        "ensemble averaging is implemented for single qubits"
    );
    rho0.check_hermitian(HERM_TOL)?;
    let (per_interval, dt) = grid.resolve();
    if dt >= 1.0 / p.mu {
        return Err(Error::StepTooCoarse {
            dt,
            tau: 1.0 / p.mu,
        });
    }
    let n_out = grid.n_out;
    let n_comp = 3 * (n_out + 1);
    let rho0_flat = flat(rho0);

    let mut sum = vec![0.0f64; n_comp];
    let mut sumsq = vec![0.0f64; n_comp];

    const CHUNK: usize = 256;
    let mut start = 0;
    while start < n_traj {
        let stop = (start + CHUNK).min(n_traj);
        let chunk: Vec<Vec<f64>> = (start..stop)
            .into_par_iter()
            .map(|i| {
                run_trajectory(
                    &rho0_flat,
                    p,
                    per_interval,
                    n_out,
                    dt,
                    trajectory_seed(seed, i as u64),
                )
            })
            .collect();
        for series in &chunk {
            for (k, &x) in series.iter().enumerate() {
                sum[k] += x;
                sumsq[k] += x * x;
            }
        }
        start = stop;
    }

    let n = n_traj as f64;
    let mut times = Vec::with_capacity(n_out + 1);
    let mut mean_states = Vec::with_capacity(n_out + 1);
    let mut stderr = Vec::with_capacity(n_out + 1);
    for j in 0..=n_out {
        times.push(grid.t_max * j as f64 / n_out as f64);
        let mean: Vec<f64> = (0..3).map(|c| sum[3 * j + c] / n).collect();
        let se: Vec<f64> = (0..3)
            .map(|c| {
                if n_traj < 2 {
                    return 0.0;
                }
                let m = mean[c];
                let var = ((sumsq[3 * j + c] - n * m * m) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            })
            .collect();
        mean_states.push(bloch_compose(&BlochVector::state(
            mean[0], mean[1], mean[2],
        )));
        stderr.push(se);
    }
    Ok(EnsembleResult {
        times,
        mean_states,
        stderr,
        n_traj,
        seed,
    })
}

/// Deviation of an ensemble mean from the Markovian prediction, per time
/// and Bloch component, in units of the standard error.
#[derive(Clone, Debug)]
pub struct MarkovGapReport {
    pub times: Vec<f64>,
    pub deviations: Vec<[f64; 3]>,
    pub ratios: Vec<[f64; 3]>,
    pub max_ratio: f64,
    pub max_abs_deviation: f64,
}

/// Compare an ensemble against the Markovian solution started from the
/// same initial state. Zero deviation at zero standard error counts as a
/// zero ratio.
pub fn markov_gap_report(ens: &EnsembleResult, gp: &GeneratorParams) -> Result<MarkovGapReport> {
    let v0 = crate::algebra::bloch_decompose(&ens.mean_states[0])?;
    let mut deviations = Vec::with_capacity(ens.times.len());
    let mut ratios = Vec::with_capacity(ens.times.len());
    let mut max_ratio: f64 = 0.0;
    let mut max_dev: f64 = 0.0;
    for (j, &t) in ens.times.iter().enumerate() {
        let predict = propagate_bloch_analytic(&v0, t, gp)?;
        let mean = crate::algebra::bloch_decompose(&ens.mean_states[j])?;
        let dev = [
            mean.eta1 - predict.eta1,
            mean.eta2 - predict.eta2,
            mean.eta3 - predict.eta3,
        ];
        let mut ratio = [0.0; 3];
        for c in 0..3 {
            let se = ens.stderr[j][c];
            ratio[c] = if dev[c] == 0.0 {
                0.0
            } else if se == 0.0 {
                f64::INFINITY
            } else {
                dev[c].abs() / se
            };
            max_ratio = max_ratio.max(ratio[c]);
            max_dev = max_dev.max(dev[c].abs());
        }
        deviations.push(dev);
        ratios.push(ratio);
    }
    Ok(MarkovGapReport {
        times: ens.times.clone(),
        deviations,
        ratios,
        max_ratio,
        max_abs_deviation: max_dev,
    })
}
