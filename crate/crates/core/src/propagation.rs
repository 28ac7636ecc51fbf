//! Finite-time evolution: the exact single-qubit propagator, generic RK4
//! integration of any generator, the factorized pair map gamma_t (x)
//! gamma_t, the closed-form evolved singlet, and the initial states of
//! the pair analysis.

use num_complex::Complex64;

use crate::algebra::{pauli, tensor, BlochVector, ComplexMatrix};
use crate::error::{Error, Result};
use crate::generators::GeneratorParams;

/// Integrator trace-conservation tolerance; drift beyond this aborts.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;

/// Below this |Omega| the trigonometric factors switch to their Taylor
/// expansion in Omega^2 t^2 (removable singularity, not an error).
pub const OMEGA_DEGENERATE_EPS: f64 = 1e-6;

/// Oscillation factors (cos 2*Omega*t, sin(2*Omega*t)/Omega) as functions
/// of the *squared* frequency, analytically continued: hyperbolic for
/// negative Omega^2 (overdamped) and a series fallback near zero.
pub(crate) fn phase_factors(omega_sq: f64, t: f64) -> (f64, f64) {
    let eps2 = OMEGA_DEGENERATE_EPS * OMEGA_DEGENERATE_EPS;
    if omega_sq > eps2 {
        let w = omega_sq.sqrt();
        ((2.0 * w * t).cos(), (2.0 * w * t).sin() / w)
    } else if omega_sq < -eps2 {
        let w = (-omega_sq).sqrt();
        ((2.0 * w * t).cosh(), (2.0 * w * t).sinh() / w)
    } else {
        let x = omega_sq * t * t;
        let c = 1.0 + x * (-2.0 + x * (2.0 / 3.0 - x * (4.0 / 45.0)));
        let s = 2.0 * t * (1.0 + x * (-2.0 / 3.0 + x * (2.0 / 15.0 - x * (4.0 / 315.0))));
        (c, s)
    }
}

/// Entries of the analytic propagator: the eta1 factor and the 2x2 block
/// acting on (eta2, eta3).
fn propagator_entries(t: f64, gp: &GeneratorParams) -> (f64, [[f64; 2]; 2]) {
    let (c, s) = phase_factors(gp.big_omega_sq(), t);
    let ea = (-gp.alpha * t).exp();
    let half_as = 0.5 * gp.alpha * s;
    let block = [
        [ea * (c - half_as), -ea * (gp.omega + gp.beta) * s],
        [ea * (gp.omega - gp.beta) * s, ea * (c + half_as)],
    ];
    ((-2.0 * gp.alpha * t).exp(), block)
}

/// 4x4 matrix of the single-qubit map on Pauli coordinates
/// (eta0, eta1, eta2, eta3). The generator is unital, so the eta0 row and
/// column stay trivial.
pub fn bloch_propagator(t: f64, gp: &GeneratorParams) -> [[f64; 4]; 4] {
    let (m11, b) = propagator_entries(t, gp);
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, m11, 0.0, 0.0],
        [0.0, 0.0, b[0][0], b[0][1]],
        [0.0, 0.0, b[1][0], b[1][1]],
    ]
}

/// Exact finite-time evolution of Bloch coordinates under the single-site
/// generator.
pub fn propagate_bloch_analytic(
    v: &BlochVector,
    t: f64,
    gp: &GeneratorParams,
) -> Result<BlochVector> {
    if t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    let (m11, b) = propagator_entries(t, gp);
    Ok(BlochVector::new(
        v.eta0,
        m11 * v.eta1,
        b[0][0] * v.eta2 + b[0][1] * v.eta3,
        b[1][0] * v.eta2 + b[1][1] * v.eta3,
    ))
}

/// How a [`PropagatorResult`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Rk4,
    ExpmOracle,
}

/// States captured along a propagation, in ascending time order.
#[derive(Clone, Debug)]
pub struct PropagatorResult {
    pub times: Vec<f64>,
    pub states: Vec<ComplexMatrix>,
    pub method: Method,
}

/// Single-qubit states along a time grid from the exact propagator.
pub fn propagate_analytic_grid(
    rho0: &ComplexMatrix,
    times: &[f64],
    gp: &GeneratorParams,
) -> Result<PropagatorResult> {
    assert_eq!(rho0.dim(), 2, "the exact propagator acts on single qubits");
    let v0 = crate::algebra::bloch_decompose(rho0)?;
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        states.push(crate::algebra::bloch_compose(&propagate_bloch_analytic(&v0, t, gp)?));
    }
    Ok(PropagatorResult {
        times: times.to_vec(),
        states,
        method: Method::Analytic,
    })
}

/// Classical fixed-step fourth-order integration of `d rho/dt = rhs(t, rho)`
/// from t = 0, capturing the state at each requested time. The state is
/// re-symmetrized every step; the trace is monitored, never repaired.
pub fn propagate_numeric<F>(
    rho0: &ComplexMatrix,
    mut rhs: F,
    times: &[f64],
    dt: f64,
) -> Result<PropagatorResult>
where
    F: FnMut(f64, &ComplexMatrix) -> Result<ComplexMatrix>,
{
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::ParamOutOfRange {
            name: "dt",
            value: dt,
        });
    }
    assert!(
        times.windows(2).all(|w| w[0] <= w[1]),
        "capture times must be sorted ascending"
    );
    let trace0 = rho0.trace().re;
    let mut rho = rho0.clone();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());

    for &target in times {
        if target < 0.0 {
            return Err(Error::NegativeTime { t: target });
        }
        let span = target - t;
        if span > 0.0 {
            let n_steps = (span / dt).ceil().max(1.0) as usize;
            let h = span / n_steps as f64;
            for _ in 0..n_steps {
                let k1 = rhs(t, &rho)?;
                let k2 = rhs(t + 0.5 * h, &(&rho + &k1.scale_re(0.5 * h)))?;
                let k3 = rhs(t + 0.5 * h, &(&rho + &k2.scale_re(0.5 * h)))?;
                let k4 = rhs(t + h, &(&rho + &k3.scale_re(h)))?;
                let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_re(2.0);
                rho = (&rho + &incr.scale_re(h / 6.0)).symmetrize();
                t += h;
                if !rho.is_finite() {
                    return Err(Error::NonFinite { t });
                }
                let drift = (rho.trace().re - trace0).abs();
                if drift > TRACE_DRIFT_TOL {
                    return Err(Error::TraceDrift { t, drift });
                }
            }
            t = target;
        }
        out.push(rho.clone());
    }
    Ok(PropagatorResult {
        times: times.to_vec(),
        states: out,
        method: Method::Rk4,
    })
}

/// Pauli-basis coefficients R_{mu nu} of a 4x4 matrix:
/// rho = sum R_{mu nu} sigma_mu (x) sigma_nu.
pub fn pair_pauli_coefficients(rho: &ComplexMatrix) -> [[Complex64; 4]; 4] {
    assert_eq!(rho.dim(), 4, "pair coefficients require a 4x4 matrix");
    let mut r = [[Complex64::ZERO; 4]; 4];
    for (mu, row) in r.iter_mut().enumerate() {
        for (nu, entry) in row.iter_mut().enumerate() {
            let basis = tensor(&pauli(mu), &pauli(nu));
            *entry = (&basis * rho).trace() * 0.25;
        }
    }
    r
}

/// Inverse of [`pair_pauli_coefficients`].
pub fn pair_from_coefficients(r: &[[Complex64; 4]; 4]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4);
    for (mu, row) in r.iter().enumerate() {
        for (nu, &coeff) in row.iter().enumerate() {
            if coeff == Complex64::ZERO {
                continue;
            }
            out = &out + &tensor(&pauli(mu), &pauli(nu)).scale(coeff);
        }
    }
    out
}

/// Factorized pair map Gamma_t = gamma_t (x) gamma_t: expands the state
/// in the Pauli (x) Pauli basis and applies the one-qubit Bloch map to
/// each factor index. Linear and trace preserving.
pub fn product_map(rho: &ComplexMatrix, t: f64, gp: &GeneratorParams) -> Result<ComplexMatrix> {
    assert_eq!(rho.dim(), 4, "the pair map acts on 4x4 matrices");
    if t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    let m = bloch_propagator(t, gp);
    let r = pair_pauli_coefficients(rho);
    let mut out = [[Complex64::ZERO; 4]; 4];
    for (mu, out_row) in out.iter_mut().enumerate() {
        for (nu, out_entry) in out_row.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for (a, r_row) in r.iter().enumerate() {
                if m[mu][a] == 0.0 {
                    continue;
                }
                for (b, &r_ab) in r_row.iter().enumerate() {
                    if m[nu][b] == 0.0 {
                        continue;
                    }
                    acc += r_ab * (m[mu][a] * m[nu][b]);
                }
            }
            *out_entry = acc;
        }
    }
    Ok(pair_from_coefficients(&out))
}

/// Closed-form evolved singlet. The four distinct entry functions are
/// built from the same oscillation factors as the propagator, so the
/// overdamped regime is covered by the hyperbolic continuation
/// (`gp.is_overdamped()` reports when that happened).
pub fn evolve_singlet_closed_form(t: f64, gp: &GeneratorParams) -> Result<ComplexMatrix> {
    if t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    let (c, s) = phase_factors(gp.big_omega_sq(), t);
    let ep2 = (-2.0 * gp.alpha * t).exp();
    let ep4 = (-4.0 * gp.alpha * t).exp();
    let half_as = 0.5 * gp.alpha * s;
    let wm = (gp.omega - gp.beta) * s;
    let wp = (gp.omega + gp.beta) * s;

    let p = (c + half_as) * (c + half_as) + wm * wm;
    let q = (c - half_as) * (c - half_as) + wp * wp;
    let a_plus = 1.0 + ep2 * p;
    let a_minus = 1.0 - ep2 * p;
    let b_plus = -ep4 + ep2 * q;
    let b_minus = -ep4 - ep2 * q;
    // Off-diagonal function, cross-checked against the factorized map and
    // direct integration of the pair equation.
    let c_im = -ep2 * (2.0 * gp.beta * s * c + gp.alpha * gp.omega * s * s);

    let re = |x: f64| Complex64::new(0.25 * x, 0.0);
    let im = |x: f64| Complex64::new(0.0, 0.25 * x);
    Ok(ComplexMatrix::from_rows(
        4,
        &[
            re(a_minus),
            im(c_im),
            im(c_im),
            re(b_plus), //
            -im(c_im),
            re(a_plus),
            re(b_minus),
            -im(c_im), //
            -im(c_im),
            re(b_minus),
            re(a_plus),
            -im(c_im), //
            re(b_plus),
            im(c_im),
            im(c_im),
            re(a_minus),
        ],
    ))
}

/// How a pair state was constructed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairLabel {
    Singlet,
    Theta(f64),
    Werner(f64),
    Product,
    Custom,
}

/// A two-qubit state with its construction label.
#[derive(Clone, Debug)]
pub struct PairState {
    pub rho: ComplexMatrix,
    pub label: PairLabel,
}

fn eta_plus() -> ComplexMatrix {
    (&pauli(0) + &pauli(1)).scale_re(0.5)
}

fn eta_minus() -> ComplexMatrix {
    (&pauli(0) - &pauli(1)).scale_re(0.5)
}

fn eta_raise() -> ComplexMatrix {
    (&pauli(3) + &pauli(2).scale(Complex64::I)).scale_re(0.5)
}

fn eta_lower() -> ComplexMatrix {
    (&pauli(3) - &pauli(2).scale(Complex64::I)).scale_re(0.5)
}

/// Maximally entangled antisymmetric combination of the free-Hamiltonian
/// eigenstates.
pub fn make_singlet() -> PairState {
    let sym = &tensor(&eta_plus(), &eta_minus()) + &tensor(&eta_minus(), &eta_plus());
    let off = &tensor(&eta_raise(), &eta_lower()) + &tensor(&eta_lower(), &eta_raise());
    PairState {
        rho: (&sym - &off).scale_re(0.5),
        label: PairLabel::Singlet,
    }
}

/// Partially entangled pure state cos(theta)|+->| - sin(theta)|-+>,
/// theta in [0, pi/2]; theta = pi/4 recovers the singlet.
pub fn make_theta(theta: f64) -> Result<PairState> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::ParamOutOfRange {
            name: "theta",
            value: theta,
        });
    }
    let (sin, cos) = theta.sin_cos();
    let diag = &tensor(&eta_plus(), &eta_minus()).scale_re(cos * cos)
        + &tensor(&eta_minus(), &eta_plus()).scale_re(sin * sin);
    let off = (&tensor(&eta_raise(), &eta_lower()) + &tensor(&eta_lower(), &eta_raise()))
        .scale_re(cos * sin);
    Ok(PairState {
        rho: &diag - &off,
        label: PairLabel::Theta(theta),
    })
}

/// Werner mixture of the singlet and the maximally mixed state,
/// p in [-1/3, 1]; positive on the whole range.
pub fn make_werner(p: f64) -> Result<PairState> {
    if !(-1.0 / 3.0..=1.0).contains(&p) {
        return Err(Error::ParamOutOfRange {
            name: "p",
            value: p,
        });
    }
    let singlet = make_singlet().rho;
    let mixed = ComplexMatrix::identity(4).scale_re(0.25 * (1.0 - p));
    Ok(PairState {
        rho: &singlet.scale_re(p) + &mixed,
        label: PairLabel::Werner(p),
    })
}

/// Product of two single-qubit states.
pub fn make_product(a: &ComplexMatrix, b: &ComplexMatrix) -> PairState {
    PairState {
        rho: tensor(a, b),
        label: PairLabel::Product,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bloch_compose, bloch_decompose, herm_eigvals, partial_trace, Subsystem};
    use crate::generators::{pair_rhs, single_site_rhs};

    fn gp(alpha: f64, beta: f64, omega: f64) -> GeneratorParams {
        GeneratorParams::independent(alpha, beta, omega).unwrap()
    }

    #[test]
    fn maximally_mixed_is_fixed_point() {
        let g = gp(0.3, 0.2, 1.0);
        let v = BlochVector::state(0.0, 0.0, 0.0);
        for t in [0.0, 0.7, 5.0, 40.0] {
            let w = propagate_bloch_analytic(&v, t, &g).unwrap();
            assert!(w.max_abs_diff(&v) < 1e-15);
        }
    }

    #[test]
    fn sigma1_component_decays_unmixed() {
        let g = gp(0.3, 0.2, 1.0);
        let v = BlochVector::state(0.5, 0.0, 0.0);
        for t in [0.1, 1.0, 3.5] {
            let w = propagate_bloch_analytic(&v, t, &g).unwrap();
            assert!((w.eta1 - 0.5 * (-2.0 * g.alpha * t).exp()).abs() < 1e-15);
            assert!(w.eta2.abs() < 1e-15 && w.eta3.abs() < 1e-15);
        }
    }

    #[test]
    fn negative_time_rejected() {
        let g = gp(0.1, 0.1, 1.0);
        let v = BlochVector::state(0.0, 0.0, 0.5);
        assert!(matches!(
            propagate_bloch_analytic(&v, -0.1, &g),
            Err(Error::NegativeTime { .. })
        ));
        assert!(matches!(
            product_map(&make_singlet().rho, -1.0, &g),
            Err(Error::NegativeTime { .. })
        ));
    }

    #[test]
    fn bloch_block_determinant_is_damping_factor() {
        let g = gp(0.17, 0.4, 1.1);
        for t in [0.2, 1.0, 4.0] {
            let m = bloch_propagator(t, &g);
            let det = m[2][2] * m[3][3] - m[2][3] * m[3][2];
            assert!((det - (-2.0 * g.alpha * t).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn analytic_grid_carries_its_tag_and_preserves_states() {
        let g = gp(0.1, 0.3, 1.0);
        let rho0 = bloch_compose(&BlochVector::state(0.1, -0.2, 0.3));
        let times = [0.0, 0.5, 2.0, 8.0];
        let res = propagate_analytic_grid(&rho0, &times, &g).unwrap();
        assert_eq!(res.method, Method::Analytic);
        assert_eq!(res.times, times);
        for (state, &t) in res.states.iter().zip(&times) {
            assert!((state.trace().re - 1.0).abs() < 1e-12);
            assert!(state.herm_deviation() < 1e-12);
            let expect = bloch_compose(
                &propagate_bloch_analytic(&bloch_decompose(&rho0).unwrap(), t, &g).unwrap(),
            );
            assert!(state.max_abs_diff(&expect) < 1e-15);
        }
    }

    #[test]
    fn rk4_matches_analytic_single_qubit() {
        let g = gp(0.1, 0.3, 1.0);
        let rho0 = bloch_compose(&BlochVector::state(0.2, -0.1, 0.35));
        let times = [0.5, 1.0, 2.0];
        let res = propagate_numeric(&rho0, |_, m| single_site_rhs(m, &g), &times, 1e-3).unwrap();
        for (k, &t) in times.iter().enumerate() {
            let expect = bloch_compose(
                &propagate_bloch_analytic(&bloch_decompose(&rho0).unwrap(), t, &g).unwrap(),
            );
            assert!(res.states[k].max_abs_diff(&expect) < 1e-9);
        }
    }

    #[test]
    fn rk4_with_zero_generator_is_identity() {
        let rho0 = bloch_compose(&BlochVector::state(0.1, 0.2, 0.3));
        let res = propagate_numeric(
            &rho0,
            |_, m| Ok(ComplexMatrix::zeros(m.dim())),
            &[1.0],
            1e-2,
        )
        .unwrap();
        assert!(res.states[0].max_abs_diff(&rho0) < 1e-15);
    }

    #[test]
    fn rk4_detects_trace_drift() {
        let rho0 = pauli(0).scale_re(0.5);
        let res = propagate_numeric(&rho0, |_, m| Ok(m.clone()), &[1.0], 1e-2);
        assert!(matches!(res, Err(Error::TraceDrift { .. })));
    }

    #[test]
    fn overdamped_continuation_matches_integrator() {
        // Omega^2 = 1 - 4 - 1 < 0
        let g = gp(2.0, 2.0, 1.0);
        assert!(g.is_overdamped());
        let v0 = BlochVector::state(0.1, 0.3, 0.2);
        let rho0 = bloch_compose(&v0);
        let res = propagate_numeric(&rho0, |_, m| single_site_rhs(m, &g), &[0.8], 1e-4).unwrap();
        let analytic = bloch_compose(&propagate_bloch_analytic(&v0, 0.8, &g).unwrap());
        assert!(res.states[0].max_abs_diff(&analytic) < 1e-9);
    }

    #[test]
    fn degenerate_frequency_uses_series() {
        // omega^2 - beta^2 - alpha^2/4 = 0 exactly
        let alpha = 0.2;
        let omega = 1.0;
        let beta = f64::sqrt(omega * omega - 0.25 * alpha * alpha);
        let g = GeneratorParams::independent(alpha, beta, omega).unwrap();
        assert!(g.big_omega_sq().abs() < 1e-12);
        let v0 = BlochVector::state(0.0, 0.25, -0.3);
        let rho0 = bloch_compose(&v0);
        let res = propagate_numeric(&rho0, |_, m| single_site_rhs(m, &g), &[1.5], 1e-4).unwrap();
        let analytic = bloch_compose(&propagate_bloch_analytic(&v0, 1.5, &g).unwrap());
        assert!(res.states[0].max_abs_diff(&analytic) < 1e-9);
    }

    #[test]
    fn product_map_at_zero_is_identity() {
        let g = gp(0.1, 0.3, 1.0);
        let rho = make_singlet().rho;
        assert!(product_map(&rho, 0.0, &g).unwrap().max_abs_diff(&rho) < 1e-14);
    }

    #[test]
    fn product_map_reproduces_closed_form_singlet() {
        let g = gp(0.1, 0.3, 1.0);
        for t in [0.0, 0.3, 1.1, 4.0, 9.5] {
            let via_map = product_map(&make_singlet().rho, t, &g).unwrap();
            let closed = evolve_singlet_closed_form(t, &g).unwrap();
            assert!(via_map.max_abs_diff(&closed) < 1e-10);
        }
    }

    #[test]
    fn product_map_factorizes_on_products() {
        let g = gp(0.2, 0.15, 0.9);
        let a = bloch_compose(&BlochVector::state(0.1, 0.05, -0.2));
        let b = bloch_compose(&BlochVector::state(-0.15, 0.2, 0.1));
        for t in [0.4, 2.0] {
            let lhs = product_map(&make_product(&a, &b).rho, t, &g).unwrap();
            let fa = bloch_compose(
                &propagate_bloch_analytic(&bloch_decompose(&a).unwrap(), t, &g).unwrap(),
            );
            let fb = bloch_compose(
                &propagate_bloch_analytic(&bloch_decompose(&b).unwrap(), t, &g).unwrap(),
            );
            assert!(lhs.max_abs_diff(&tensor(&fa, &fb)) < 1e-13);
        }
    }

    #[test]
    fn pair_generator_rk4_factorizes_on_products() {
        let g = gp(0.2, 0.15, 0.9);
        let a = bloch_compose(&BlochVector::state(0.1, 0.05, -0.2));
        let b = bloch_compose(&BlochVector::state(-0.15, 0.2, 0.1));
        let rho0 = make_product(&a, &b).rho;
        let res = propagate_numeric(&rho0, |_, m| pair_rhs(m, &g), &[1.0], 1e-3).unwrap();
        let expect = product_map(&rho0, 1.0, &g).unwrap();
        assert!(res.states[0].max_abs_diff(&expect) < 1e-8);
    }

    #[test]
    fn singlet_is_pure_and_normalized() {
        let rho = make_singlet().rho;
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!(((&rho * &rho).trace().re - 1.0).abs() < 1e-14);
        assert!(rho.max_abs_diff(&(&rho * &rho)) < 1e-14);
    }

    #[test]
    fn singlet_marginals_are_maximally_mixed() {
        let rho = make_singlet().rho;
        let mixed = pauli(0).scale_re(0.5);
        assert!(partial_trace(&rho, Subsystem::First).max_abs_diff(&mixed) < 1e-15);
        assert!(partial_trace(&rho, Subsystem::Second).max_abs_diff(&mixed) < 1e-15);
    }

    #[test]
    fn closed_form_starts_at_singlet_and_mixes_asymptotically() {
        let g = gp(0.1, 0.3, 1.0);
        let at0 = evolve_singlet_closed_form(0.0, &g).unwrap();
        assert!(at0.max_abs_diff(&make_singlet().rho) < 1e-14);
        let late = evolve_singlet_closed_form(400.0, &g).unwrap();
        assert!(late.max_abs_diff(&ComplexMatrix::identity(4).scale_re(0.25)) < 1e-12);
    }

    #[test]
    fn theta_state_endpoints() {
        let quarter = make_theta(std::f64::consts::FRAC_PI_4).unwrap();
        assert!(quarter.rho.max_abs_diff(&make_singlet().rho) < 1e-15);

        let product = make_theta(0.0).unwrap();
        assert!(product.rho.max_abs_diff(&tensor(&eta_plus(), &eta_minus())) < 1e-15);
        assert!(partial_trace(&product.rho, Subsystem::First).max_abs_diff(&eta_plus()) < 1e-15);
        assert!(partial_trace(&product.rho, Subsystem::Second).max_abs_diff(&eta_minus()) < 1e-15);

        assert!(make_theta(-0.1).is_err());
        assert!(make_theta(1.8).is_err());
    }

    #[test]
    fn theta_marginals_carry_half_cos_two_theta() {
        let theta = 0.3;
        let rho = make_theta(theta).unwrap().rho;
        let expect = &pauli(0).scale_re(0.5) + &pauli(1).scale_re(0.5 * (2.0 * theta).cos());
        assert!(partial_trace(&rho, Subsystem::First).max_abs_diff(&expect) < 1e-14);
        let expect2 = &pauli(0).scale_re(0.5) - &pauli(1).scale_re(0.5 * (2.0 * theta).cos());
        assert!(partial_trace(&rho, Subsystem::Second).max_abs_diff(&expect2) < 1e-14);
    }

    #[test]
    fn werner_endpoints_and_spectrum() {
        assert!(
            make_werner(0.0)
                .unwrap()
                .rho
                .max_abs_diff(&ComplexMatrix::identity(4).scale_re(0.25))
                < 1e-15
        );
        assert!(
            make_werner(1.0)
                .unwrap()
                .rho
                .max_abs_diff(&make_singlet().rho)
                < 1e-15
        );

        for p in [-1.0 / 3.0, -0.2, 0.3, 0.8, 1.0] {
            let vals = herm_eigvals(&make_werner(p).unwrap().rho).unwrap();
            let small = 0.25 * (1.0 - p);
            let large = 0.25 * (1.0 + 3.0 * p);
            assert!((vals[3] - small.max(large)).abs() < 1e-13);
            for v in &vals {
                assert!(*v > -1e-13);
            }
            let sum: f64 = vals.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
        assert!(make_werner(-0.4).is_err());
        assert!(make_werner(1.01).is_err());
    }
}
