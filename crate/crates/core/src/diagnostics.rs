//! Quantifies the failure of positivity: the witness eigenvalue along the
//! (1,0,0,-1) direction, curvatures at t = 0, entanglement thresholds,
//! Choi-matrix complete-positivity tests, admissible-domain scans, and
//! entropy/purity bookkeeping.

use num_complex::Complex64;

use crate::algebra::{
    bloch_compose, bloch_decompose, herm_eig, herm_eigvals, ComplexMatrix, HERM_TOL,
};
use crate::error::{Error, Result};
use crate::generators::GeneratorParams;
use crate::propagation::{
    bloch_propagator, pair_from_coefficients, pair_pauli_coefficients, phase_factors, product_map,
    propagate_bloch_analytic,
};

/// Eigenvalues above this (negative) tolerance count as positive. Genuine
/// order-t^2 negativity reaches magnitudes far beyond eigensolver noise.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Residual below which the fixed witness vector is accepted as an exact
/// eigenvector.
pub const WITNESS_RESIDUAL_TOL: f64 = 1e-9;

/// Closed-form witness eigenvalue of the evolved singlet:
/// (1/4) { 1 + e^{-4 alpha t} - 2 e^{-2 alpha t} [cos^2 2*Omega*t
/// + ((2 omega^2 - Omega^2)/Omega^2) sin^2 2*Omega*t] }.
pub fn lambda_closed_form(t: f64, gp: &GeneratorParams) -> f64 {
    let (c, s) = phase_factors(gp.big_omega_sq(), t);
    let bracket = c * c + (2.0 * gp.omega * gp.omega - gp.big_omega_sq()) * s * s;
    0.25 * (1.0 + (-4.0 * gp.alpha * t).exp() - 2.0 * (-2.0 * gp.alpha * t).exp() * bracket)
}

/// The tracked eigenvalue of a pair state, and whether it came from the
/// fixed witness direction or fell back to the minimum of the spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lambda {
    pub value: f64,
    pub witness_branch: bool,
}

/// The normalized witness direction (1, 0, 0, -1)/sqrt(2).
pub fn witness_vector() -> [Complex64; 4] {
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [a, Complex64::ZERO, Complex64::ZERO, -a]
}

/// Eigenvalue along the witness direction when that direction is an exact
/// eigenvector (checked by residual); otherwise the minimum eigenvalue,
/// flagged as the fallback branch.
pub fn lambda_from_state(rho: &ComplexMatrix) -> Result<Lambda> {
    assert_eq!(
        rho.dim(),
        4,
        "the witness eigenvalue is defined for pair states"
    );
    rho.check_hermitian(HERM_TOL)?;
    let w = witness_vector();
    let rho_w = rho.apply(&w);
    let value: f64 = w
        .iter()
        .zip(rho_w.iter())
        .map(|(wi, ri)| (wi.conj() * ri).re)
        .sum();
    let residual: f64 = rho_w
        .iter()
        .zip(w.iter())
        .map(|(ri, wi)| (ri - wi * value).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual < WITNESS_RESIDUAL_TOL {
        Ok(Lambda {
            value,
            witness_branch: true,
        })
    } else {
        let vals = herm_eigvals(rho)?;
        Ok(Lambda {
            value: vals[0],
            witness_branch: false,
        })
    }
}

/// The 2x2 sector spanned by (|00>-|11>)/sqrt2 and (|01>-|10>)/sqrt2 is
/// invariant under the factorized dynamics for the singlet and the
/// partially entangled family. Its lower eigenvalue is the branch that
/// starts at zero with the curvature formulas below; the spectrum of the
/// evolved state also contains a complement-sector branch that can turn
/// negative at first order in t, so tracking by global minimum would
/// follow the wrong branch. Returns `None` when the sector couples to
/// its complement beyond the residual tolerance.
pub fn tracked_sector_lambda(rho: &ComplexMatrix) -> Result<Option<f64>> {
    assert_eq!(
        rho.dim(),
        4,
        "the tracked sector is defined for pair states"
    );
    rho.check_hermitian(HERM_TOL)?;
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let w1 = [
        Complex64::new(inv, 0.0),
        Complex64::ZERO,
        Complex64::ZERO,
        Complex64::new(-inv, 0.0),
    ];
    let w2 = [
        Complex64::ZERO,
        Complex64::new(inv, 0.0),
        Complex64::new(-inv, 0.0),
        Complex64::ZERO,
    ];
    let dot = |a: &[Complex64; 4], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
    };
    let rho_w1 = rho.apply(&w1);
    let rho_w2 = rho.apply(&w2);
    let m11 = dot(&w1, &rho_w1);
    let m12 = dot(&w1, &rho_w2);
    let m22 = dot(&w2, &rho_w2);
    // residuals of the sector-invariance: rho w must stay in span{w1, w2}
    let mut coupling: f64 = 0.0;
    for k in 0..4 {
        coupling = coupling
            .max((rho_w1[k] - m11 * w1[k] - m12.conj() * w2[k]).norm())
            .max((rho_w2[k] - m12 * w1[k] - m22 * w2[k]).norm());
    }
    if coupling > WITNESS_RESIDUAL_TOL {
        return Ok(None);
    }
    let mean = 0.5 * (m11.re + m22.re);
    let disc = (0.25 * (m11.re - m22.re) * (m11.re - m22.re) + m12.norm_sqr()).sqrt();
    Ok(Some(mean - disc))
}

/// Second derivative of the tracked eigenvalue at t = 0: -8 beta^2 for the
/// singlet, 2 (alpha^2 cos^2 2 theta - 4 beta^2 sin^2 2 theta) for the
/// partially entangled family.
pub fn lambda_curvature_at_zero(gp: &GeneratorParams, theta: Option<f64>) -> f64 {
    match theta {
        None => -8.0 * gp.beta * gp.beta,
        Some(th) => {
            let (s2, c2) = (2.0 * th).sin_cos();
            2.0 * (gp.alpha * gp.alpha * c2 * c2 - 4.0 * gp.beta * gp.beta * s2 * s2)
        }
    }
}

/// Smallest entanglement angle at which the curvature turns negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThetaThreshold {
    /// theta* = (1/2) arctan(alpha / 2 beta).
    Angle(f64),
    /// Without the beta coupling the curvature is 2 alpha^2 cos^2 2theta,
    /// never negative.
    NoViolationPossible,
}

pub fn theta_threshold(gp: &GeneratorParams) -> ThetaThreshold {
    if gp.beta == 0.0 {
        ThetaThreshold::NoViolationPossible
    } else {
        ThetaThreshold::Angle(0.5 * (gp.alpha / (2.0 * gp.beta)).atan())
    }
}

/// Werner mixing weight above which the evolved state turns negative:
/// p* = (omega^2 - beta^2) / (omega^2 + 3 beta^2), valid when the
/// oscillation frequency is real.
pub fn werner_threshold(gp: &GeneratorParams) -> Result<f64> {
    let w2 = gp.omega * gp.omega;
    let b2 = gp.beta * gp.beta;
    if w2 <= b2 {
        return Err(Error::ParamOutOfRange {
            name: "omega^2 - beta^2",
            value: w2 - b2,
        });
    }
    Ok((w2 - b2) / (w2 + 3.0 * b2))
}

/// Closed-form witness eigenvalue of the evolved Werner state for the
/// purely oscillatory generator (alpha = 0); periodic with period
/// pi / (2 Omega).
pub fn werner_lambda(t: f64, p: f64, gp: &GeneratorParams) -> Result<f64> {
    if gp.alpha != 0.0 {
        return Err(Error::AlphaNotZero { alpha: gp.alpha });
    }
    let omega_sq = gp.big_omega_sq();
    let (c, s) = phase_factors(omega_sq, t);
    let bracket = c * c + (2.0 * gp.omega * gp.omega - omega_sq) * s * s;
    Ok(0.25 * (1.0 + p * (1.0 - 2.0 * bracket)))
}

/// Grid scan plus ternary refinement of min_t lambda_W over [0, t_max].
/// Returns (argmin, min).
pub fn werner_lambda_minimum(
    p: f64,
    gp: &GeneratorParams,
    t_max: f64,
    n_grid: usize,
) -> Result<(f64, f64)> {
    assert!(n_grid >= 3 && t_max > 0.0, "scan grid too small");
    let f = |t: f64| werner_lambda(t, p, gp);
    let step = t_max / (n_grid - 1) as f64;
    let mut best_k = 0;
    let mut best = f(0.0)?;
    for k in 1..n_grid {
        let v = f(step * k as f64)?;
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let mut lo = step * best_k.saturating_sub(1) as f64;
    let mut hi = (step * (best_k + 1) as f64).min(t_max);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1)? < f(m2)? {
            hi = m2;
        } else {
            lo = m1;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let t_min = 0.5 * (lo + hi);
    Ok((t_min, f(t_min)?))
}

/// A threshold estimated two ways: the closed formula and a sign-change
/// scan of the measured quantity.
#[derive(Clone, Copy, Debug)]
pub struct ThresholdReport {
    pub predicted: f64,
    pub measured: f64,
    /// |predicted - measured|; at most the scan resolution when the
    /// formula is right.
    pub agreement: f64,
    /// Scan step used for the measurement.
    pub resolution: f64,
}

/// Measured curvature at t = 0 of the branch through zero, by Richardson
/// extrapolation of the second difference of the tracked-sector
/// eigenvalue along the evolution.
pub fn measured_curvature_at_zero(
    rho0: &ComplexMatrix,
    gp: &GeneratorParams,
    h: f64,
) -> Result<f64> {
    let eval = |t: f64| -> Result<f64> {
        let rho = product_map(rho0, t, gp)?;
        match tracked_sector_lambda(&rho)? {
            Some(lam) => Ok(lam),
            // sector coupled to its complement: use the witness rule
            None => Ok(lambda_from_state(&rho)?.value),
        }
    };
    Ok((7.0 * eval(0.0)? - 16.0 * eval(0.5 * h)? + 10.0 * eval(h)? - eval(2.0 * h)?) / (h * h))
}

/// Scan the measured curvature across the entanglement angle and locate
/// its sign change; compared against the closed threshold formula.
pub fn theta_threshold_scan(gp: &GeneratorParams, step: f64) -> Result<ThresholdReport> {
    assert!(step > 0.0, "scan step must be positive");
    let predicted = match theta_threshold(gp) {
        ThetaThreshold::Angle(th) => th,
        ThetaThreshold::NoViolationPossible => {
            return Err(Error::ParamOutOfRange {
                name: "beta",
                value: gp.beta,
            })
        }
    };
    let n = (std::f64::consts::FRAC_PI_2 / step).floor() as usize;
    let curvature_at = |theta: f64| -> Result<f64> {
        let rho0 = crate::propagation::make_theta(theta)?.rho;
        measured_curvature_at_zero(&rho0, gp, 1e-3)
    };
    let mut prev = curvature_at(0.0)?;
    for k in 1..=n {
        let theta = (k as f64 * step).min(std::f64::consts::FRAC_PI_2);
        let cur = curvature_at(theta)?;
        if prev >= 0.0 && cur < 0.0 {
            let measured = theta - 0.5 * step;
            return Ok(ThresholdReport {
                predicted,
                measured,
                agreement: (predicted - measured).abs(),
                resolution: step,
            });
        }
        prev = cur;
    }
    Err(Error::ParamOutOfRange {
        name: "theta scan (no sign change found)",
        value: step,
    })
}

/// Scan the measured minimum of the Werner eigenvalue across the mixing
/// weight and locate where it turns negative; alpha = 0 only.
pub fn werner_threshold_scan(gp: &GeneratorParams, step: f64) -> Result<ThresholdReport> {
    assert!(step > 0.0, "scan step must be positive");
    let predicted = werner_threshold(gp)?;
    if gp.alpha != 0.0 {
        return Err(Error::AlphaNotZero { alpha: gp.alpha });
    }
    let omega = gp.big_omega().ok_or(Error::ParamOutOfRange {
        name: "big_omega_sq",
        value: gp.big_omega_sq(),
    })?;
    let period = std::f64::consts::PI / (2.0 * omega);
    let lo = -1.0 / 3.0;
    let n = ((1.0 - lo) / step).floor() as usize;
    let mut prev = werner_lambda_minimum(lo, gp, period, 4001)?.1;
    for k in 1..=n {
        let p = (lo + k as f64 * step).min(1.0);
        let cur = werner_lambda_minimum(p, gp, period, 4001)?.1;
        if prev >= -POSITIVITY_TOL && cur < -POSITIVITY_TOL {
            let measured = p - 0.5 * step;
            return Ok(ThresholdReport {
                predicted,
                measured,
                agreement: (predicted - measured).abs(),
                resolution: step,
            });
        }
        prev = cur;
    }
    Err(Error::ParamOutOfRange {
        name: "werner scan (no sign change found)",
        value: step,
    })
}

/// Choi matrix of the single-qubit map at time t: (id (x) gamma_t) applied
/// to the maximally entangled projector in the computational basis. The
/// map is completely positive at t exactly when the spectrum is
/// nonnegative.
pub fn choi_matrix(t: f64, gp: &GeneratorParams) -> ComplexMatrix {
    assert!(t >= 0.0, "the Choi test is defined for t >= 0");
    let mut projector = ComplexMatrix::zeros(4);
    let half = Complex64::new(0.5, 0.0);
    for &i in &[0usize, 3] {
        for &j in &[0usize, 3] {
            projector[(i, j)] = half;
        }
    }
    let m = bloch_propagator(t, gp);
    let r = pair_pauli_coefficients(&projector);
    // The map acts on the second tensor factor only: R' = R M^T.
    let mut out = [[Complex64::ZERO; 4]; 4];
    for (out_row, r_row) in out.iter_mut().zip(r.iter()) {
        for (nu, out_entry) in out_row.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for (b, &r_mb) in r_row.iter().enumerate() {
                if m[nu][b] != 0.0 {
                    acc += r_mb * m[nu][b];
                }
            }
            *out_entry = acc;
        }
    }
    pair_from_coefficients(&out)
}

/// Positivity along a time grid.
#[derive(Clone, Debug)]
pub struct PositivityReport {
    pub times: Vec<f64>,
    pub min_eigenvalues: Vec<f64>,
    /// Smallest time at which the minimum eigenvalue crosses below the
    /// positivity tolerance, refined by bisection between grid points.
    pub first_negative_time: Option<f64>,
    /// Time of the most negative grid point (argmin of the scan).
    pub most_negative_time: f64,
    /// Eigenvector of the minimum eigenvalue at the most negative point.
    pub witness_eigenvector: Vec<Complex64>,
    /// Verdict at the positivity tolerance over the whole grid.
    pub admissible: bool,
}

fn min_eig_at(rho0: &ComplexMatrix, gp: &GeneratorParams, t: f64) -> Result<f64> {
    let evolved = evolve_state(rho0, gp, t)?;
    Ok(herm_eigvals(&evolved)?[0])
}

fn evolve_state(rho0: &ComplexMatrix, gp: &GeneratorParams, t: f64) -> Result<ComplexMatrix> {
    match rho0.dim() {
        2 => {
            let v = bloch_decompose(rho0)?;
            Ok(bloch_compose(&propagate_bloch_analytic(&v, t, gp)?))
        }
        4 => product_map(rho0, t, gp),
        d => panic!("admissibility scan supports dimensions 2 and 4, got {d}"),
    }
}

/// Scan the minimum eigenvalue of the evolved state over an even grid on
/// [0, t_max]. Single-qubit inputs evolve analytically; pair inputs go
/// through the factorized map.
pub fn admissible_scan(
    rho0: &ComplexMatrix,
    gp: &GeneratorParams,
    t_max: f64,
    n_grid: usize,
) -> Result<PositivityReport> {
    assert!(n_grid >= 2 && t_max > 0.0, "scan grid too small");
    let step = t_max / (n_grid - 1) as f64;
    let mut times = Vec::with_capacity(n_grid);
    let mut mins = Vec::with_capacity(n_grid);
    for k in 0..n_grid {
        let t = step * k as f64;
        times.push(t);
        mins.push(min_eig_at(rho0, gp, t)?);
    }

    let first_idx = mins.iter().position(|&m| m < -POSITIVITY_TOL);
    let first_negative_time = match first_idx {
        None => None,
        Some(0) => Some(0.0),
        Some(k) => Some(refine_crossing(rho0, gp, times[k - 1], times[k])?),
    };

    let (most_idx, _) = mins
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("non-empty grid");
    let evolved = evolve_state(rho0, gp, times[most_idx])?;
    let (_, vecs) = herm_eig(&evolved)?;
    let witness: Vec<Complex64> = (0..evolved.dim()).map(|k| vecs[(k, 0)]).collect();

    Ok(PositivityReport {
        admissible: first_idx.is_none(),
        most_negative_time: times[most_idx],
        witness_eigenvector: witness,
        first_negative_time,
        times,
        min_eigenvalues: mins,
    })
}

fn refine_crossing(
    rho0: &ComplexMatrix,
    gp: &GeneratorParams,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64> {
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if min_eig_at(rho0, gp, mid)? < -POSITIVITY_TOL {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// First time at which the evolved state leaves the positive cone, or
/// `None` if it stays admissible on the grid.
pub fn first_negative_time(
    rho0: &ComplexMatrix,
    gp: &GeneratorParams,
    t_max: f64,
    n_grid: usize,
) -> Result<Option<f64>> {
    assert!(n_grid >= 2 && t_max > 0.0, "scan grid too small");
    let step = t_max / (n_grid - 1) as f64;
    let mut prev_t = 0.0;
    for k in 0..n_grid {
        let t = step * k as f64;
        if min_eig_at(rho0, gp, t)? < -POSITIVITY_TOL {
            return if k == 0 {
                Ok(Some(0.0))
            } else {
                Ok(Some(refine_crossing(rho0, gp, prev_t, t)?))
            };
        }
        prev_t = t;
    }
    Ok(None)
}

/// Von Neumann entropy -Tr[rho ln rho]. Eigenvalues within the positivity
/// tolerance of zero are clamped; a genuinely negative spectrum has no
/// entropy and is reported as such.
pub fn entropy(rho: &ComplexMatrix) -> Result<f64> {
    let vals = herm_eigvals(rho)?;
    if vals[0] < -POSITIVITY_TOL {
        return Err(Error::EntropyUndefined {
            min_eigenvalue: vals[0],
        });
    }
    Ok(vals
        .iter()
        .map(|&v| {
            let v = v.max(0.0);
            if v > 0.0 {
                -v * v.ln()
            } else {
                0.0
            }
        })
        .sum())
}

/// Tr[rho^2]; defined for any Hermitian input.
pub fn purity(rho: &ComplexMatrix) -> Result<f64> {
    rho.check_hermitian(HERM_TOL)?;
    Ok((rho * rho).trace().re)
}
