//! Generators of the dissipative dynamics: the single-site weak-coupling
//! generator, the coupled two-site generator with its cross term, the
//! general double-commutator (Redfield) form, and the time-dependent
//! coefficients produced by exponentially decaying field correlations.

use num_complex::Complex64;

use crate::algebra::{anticommutator, commutator, pauli, tensor, ComplexMatrix, HERM_TOL};
use crate::error::{Error, Result};

/// Microscopic constants of the stochastic-field model. All rates are in
/// units of the level splitting unless the caller says otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    /// On-site noise strength g^2.
    pub g2: f64,
    /// Cross-site correlation strength f^2.
    pub f2: f64,
    /// On-site correlation decay rate mu.
    pub mu: f64,
    /// Cross-site correlation decay rate nu.
    pub nu: f64,
    /// Level splitting omega0.
    pub omega0: f64,
}

impl PhysicalParams {
    pub fn new(g2: f64, f2: f64, mu: f64, nu: f64, omega0: f64) -> Result<Self> {
        let check = |name: &'static str, value: f64, strict: bool| {
            if value < 0.0 || (strict && value == 0.0) || !value.is_finite() {
                Err(Error::ParamOutOfRange { name, value })
            } else {
                Ok(())
            }
        };
        check("g2", g2, false)?;
        check("f2", f2, false)?;
        check("mu", mu, true)?;
        check("nu", nu, true)?;
        check("omega0", omega0, true)?;
        Ok(Self {
            g2,
            f2,
            mu,
            nu,
            omega0,
        })
    }

    /// On-site noise only.
    pub fn on_site(g2: f64, mu: f64, omega0: f64) -> Result<Self> {
        Self::new(g2, 0.0, mu, 1.0, omega0)
    }

    /// True when the cross correlations are subdominant (factor-of-ten
    /// hierarchy in strength and decay), so the factorized reduction of
    /// the pair dynamics is justified. Vanishing f^2 makes the reduction
    /// exact regardless of nu.
    pub fn subdominant(&self) -> bool {
        self.f2 == 0.0 || (10.0 * self.f2 <= self.g2 && 10.0 * self.mu <= self.nu)
    }
}

/// Which denominator the cross constant delta uses. The symmetric choice
/// pairs delta with nu the way gamma is; the other keeps mu.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DeltaVariant {
    /// delta = f^2 omega0 / (omega0^2 + mu^2).
    #[default]
    MuDenominator,
    /// delta = f^2 omega0 / (omega0^2 + nu^2), matching the memory
    /// integral of the cross correlation.
    NuDenominator,
}

/// Constants of the Markovian generator. `alpha`/`beta` weight the
/// on-site dissipation, `gamma`/`delta` the cross-site one, `omega` is
/// the shifted precession frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub omega: f64,
    pub omega0: f64,
}

impl GeneratorParams {
    /// Generator with directly chosen constants; the microscopic relations
    /// are not enforced in this mode.
    pub fn new(alpha: f64, beta: f64, omega: f64, gamma: f64, delta: f64) -> Result<Self> {
        if alpha < 0.0 || !alpha.is_finite() {
            return Err(Error::ParamOutOfRange {
                name: "alpha",
                value: alpha,
            });
        }
        if !beta.is_finite() {
            return Err(Error::ParamOutOfRange {
                name: "beta",
                value: beta,
            });
        }
        if !omega.is_finite() {
            return Err(Error::ParamOutOfRange {
                name: "omega",
                value: omega,
            });
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            delta,
            omega,
            omega0: 2.0 * (omega - beta),
        })
    }

    /// Single-site generator with independent constants and no cross term.
    pub fn independent(alpha: f64, beta: f64, omega: f64) -> Result<Self> {
        Self::new(alpha, beta, omega, 0.0, 0.0)
    }

    /// Squared oscillation frequency of the Bloch rotation,
    /// omega^2 - beta^2 - alpha^2/4. Negative in the overdamped regime.
    pub fn big_omega_sq(&self) -> f64 {
        self.omega * self.omega - self.beta * self.beta - 0.25 * self.alpha * self.alpha
    }

    /// The oscillation frequency when it is real.
    pub fn big_omega(&self) -> Option<f64> {
        let w2 = self.big_omega_sq();
        (w2 >= 0.0).then(|| w2.sqrt())
    }

    pub fn is_overdamped(&self) -> bool {
        self.big_omega_sq() < 0.0
    }
}

/// Markov-limit generator constants from the microscopic noise model:
/// alpha = 2 g^2 mu / (omega0^2 + mu^2), beta = g^2 omega0 / (omega0^2 + mu^2),
/// omega = omega0/2 + beta, gamma = 2 f^2 nu / (omega0^2 + nu^2), and delta
/// per the selected variant.
pub fn markov_params(p: &PhysicalParams, variant: DeltaVariant) -> GeneratorParams {
    let d_mu = p.omega0 * p.omega0 + p.mu * p.mu;
    let d_nu = p.omega0 * p.omega0 + p.nu * p.nu;
    let beta = p.g2 * p.omega0 / d_mu;
    GeneratorParams {
        alpha: 2.0 * p.g2 * p.mu / d_mu,
        beta,
        gamma: 2.0 * p.f2 * p.nu / d_nu,
        delta: match variant {
            DeltaVariant::MuDenominator => p.f2 * p.omega0 / d_mu,
            DeltaVariant::NuDenominator => p.f2 * p.omega0 / d_nu,
        },
        omega: 0.5 * p.omega0 + beta,
        omega0: p.omega0,
    }
}

/// Orthogonal matrix of the interaction-picture Pauli rotation generated
/// by the free Hamiltonian.
pub fn rotation_matrix(t: f64, omega0: f64) -> [[f64; 3]; 3] {
    let (s, c) = (omega0 * t).sin_cos();
    [[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]]
}

/// Stationary field covariance matrices W^{(AB)}_{ij}(tau). Only the
/// (3,3) entry is populated in this model.
#[derive(Clone, Copy, Debug)]
pub struct CorrelationMatrixSet {
    params: PhysicalParams,
}

impl CorrelationMatrixSet {
    pub fn new(params: PhysicalParams) -> Self {
        Self { params }
    }

    /// W^{(AB)}(tau) for sites `a`, `b` in {0, 1}.
    pub fn eval(&self, a: usize, b: usize, tau: f64) -> [[f64; 3]; 3] {
        assert!(a < 2 && b < 2, "site index out of range");
        let p = &self.params;
        let w33 = if a == b {
            p.g2 * (-p.mu * tau.abs()).exp()
        } else {
            p.f2 * (-p.nu * tau.abs()).exp()
        };
        let mut w = [[0.0; 3]; 3];
        w[2][2] = w33;
        w
    }
}

/// Memory-integral coefficients C^{(AB)}_{ij} of the double-commutator
/// master equation. Indexed c[a][b][i][j] with Pauli indices shifted to
/// 0..3. Only the (3,3) and (3,2) entries are nonzero here.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RedfieldCoefficients {
    pub c: [[[[f64; 3]; 3]; 2]; 2],
}

/// int_0^t w e^{-k s} cos(omega0 s) ds.
fn exp_cos_integral(w: f64, k: f64, omega0: f64, t: f64) -> f64 {
    let d = k * k + omega0 * omega0;
    let (s, c) = (omega0 * t).sin_cos();
    w * (k - (-k * t).exp() * (k * c - omega0 * s)) / d
}

/// int_0^t w e^{-k s} sin(omega0 s) ds.
fn exp_sin_integral(w: f64, k: f64, omega0: f64, t: f64) -> f64 {
    let d = k * k + omega0 * omega0;
    let (s, c) = (omega0 * t).sin_cos();
    w * (omega0 - (-k * t).exp() * (omega0 * c + k * s)) / d
}

impl RedfieldCoefficients {
    /// Coefficients with the memory integral truncated at time `t`.
    pub fn finite_time(p: &PhysicalParams, t: f64) -> Self {
        let mut c = [[[[0.0; 3]; 3]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let (w, k) = if a == b { (p.g2, p.mu) } else { (p.f2, p.nu) };
                // C_3j = int_0^t W_33(s) U_3j(s) ds with U_32 = -sin, U_33 = cos.
                c[a][b][2][1] = -exp_sin_integral(w, k, p.omega0, t);
                c[a][b][2][2] = exp_cos_integral(w, k, p.omega0, t);
            }
        }
        Self { c }
    }

    /// Markov limit (memory integral extended to infinity).
    pub fn markov(p: &PhysicalParams) -> Self {
        let mut c = [[[[0.0; 3]; 3]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let (w, k) = if a == b { (p.g2, p.mu) } else { (p.f2, p.nu) };
                let d = k * k + p.omega0 * p.omega0;
                c[a][b][2][1] = -(w * p.omega0 / d);
                c[a][b][2][2] = w * k / d;
            }
        }
        Self { c }
    }

    /// Largest deviation between the cross blocks, which the stationary
    /// covariance symmetry forces to coincide.
    pub fn cross_asymmetry(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                dev = dev.max((self.c[0][1][i][j] - self.c[1][0][i][j]).abs());
            }
        }
        dev
    }
}

/// Single-site generator acting on a 2x2 state:
/// -i[omega sigma1, eta] + alpha (sigma3 eta sigma3 - eta)
/// - beta (sigma2 eta sigma3 + sigma3 eta sigma2).
pub fn single_site_rhs(eta: &ComplexMatrix, gp: &GeneratorParams) -> Result<ComplexMatrix> {
    assert_eq!(eta.dim(), 2, "single-site generator acts on 2x2 matrices");
    eta.check_hermitian(HERM_TOL)?;
    let s1 = pauli(1);
    let s2 = pauli(2);
    let s3 = pauli(3);
    let ham = commutator(&s1, eta).scale(Complex64::new(0.0, -gp.omega));
    let deph = (&(&(&s3 * eta) * &s3) - eta).scale_re(gp.alpha);
    let mix = (&(&(&s2 * eta) * &s3) + &(&(&s3 * eta) * &s2)).scale_re(-gp.beta);
    Ok(&(&ham + &deph) + &mix)
}

/// Matrix of the single-site generator on the spatial Bloch components
/// (eta1, eta2, eta3).
pub fn bloch_generator(gp: &GeneratorParams) -> [[f64; 3]; 3] {
    let (a, b, w) = (gp.alpha, gp.beta, gp.omega);
    [
        [-2.0 * a, 0.0, 0.0],
        [0.0, -2.0 * a, -2.0 * (w + b)],
        [0.0, 2.0 * (w - b), 0.0],
    ]
}

/// Pauli operator on one factor of the pair: sigma_i x 1 or 1 x sigma_i.
fn site_op(i: usize, site: usize) -> ComplexMatrix {
    match site {
        0 => tensor(&pauli(i), &pauli(0)),
        1 => tensor(&pauli(0), &pauli(i)),
        _ => panic!("site index {site} out of range"),
    }
}

/// Cross-site dissipative term coupling the two factors, weighted by the
/// gamma and delta constants. Returns the term that the pair generator
/// subtracts.
pub fn cross_site_rhs(rho: &ComplexMatrix, gp: &GeneratorParams) -> Result<ComplexMatrix> {
    assert_eq!(rho.dim(), 4, "cross-site generator acts on 4x4 matrices");
    rho.check_hermitian(HERM_TOL)?;
    let mut out = ComplexMatrix::zeros(4);
    if gp.gamma == 0.0 && gp.delta == 0.0 {
        return Ok(out);
    }
    let s33 = tensor(&pauli(3), &pauli(3));
    let s32 = tensor(&pauli(3), &pauli(2));
    let s23 = tensor(&pauli(2), &pauli(3));
    let s3_1 = site_op(3, 0);
    let s3_2 = site_op(3, 1);
    let s2_1 = site_op(2, 0);
    let s2_2 = site_op(2, 1);

    if gp.gamma != 0.0 {
        let term =
            &(&anticommutator(&s33, rho) - &(&(&s3_1 * rho) * &s3_2)) - &(&(&s3_2 * rho) * &s3_1);
        out = &out + &term.scale_re(gp.gamma);
    }
    if gp.delta != 0.0 {
        let anti = &anticommutator(&s32, rho) + &anticommutator(&s23, rho);
        let hops = &(&(&(&s3_1 * rho) * &s2_2) + &(&(&s2_2 * rho) * &s3_1))
            + &(&(&(&s2_1 * rho) * &s3_2) + &(&(&s3_2 * rho) * &s2_1));
        out = &out + &(&anti - &hops).scale_re(-gp.delta);
    }
    Ok(out)
}

/// Full two-site generator: the single-site generator lifted to each
/// factor, minus the cross-site term.
pub fn pair_rhs(rho: &ComplexMatrix, gp: &GeneratorParams) -> Result<ComplexMatrix> {
    assert_eq!(rho.dim(), 4, "pair generator acts on 4x4 matrices");
    rho.check_hermitian(HERM_TOL)?;
    let s1_sum = &site_op(1, 0) + &site_op(1, 1);
    let ham = commutator(&s1_sum, rho).scale(Complex64::new(0.0, -gp.omega));
    let mut out = ham;
    for site in 0..2 {
        let s3 = site_op(3, site);
        let s2 = site_op(2, site);
        let deph = (&(&(&s3 * rho) * &s3) - rho).scale_re(gp.alpha);
        let mix = (&(&(&s2 * rho) * &s3) + &(&(&s3 * rho) * &s2)).scale_re(-gp.beta);
        out = &(&out + &deph) + &mix;
    }
    let cross = cross_site_rhs(rho, gp)?;
    Ok(&out - &cross)
}

fn check_cross_symmetry(c: &RedfieldCoefficients) -> Result<()> {
    let dev = c.cross_asymmetry();
    if dev > 1e-12 {
        return Err(Error::AsymmetricCoefficients { deviation: dev });
    }
    Ok(())
}

/// General double-commutator master equation, evaluated directly:
/// -i[H0, rho] - sum_{AB,ij} C^{(AB)}_{ij} [sigma_i^A, [sigma_j^B, rho]].
pub fn redfield_rhs(
    rho: &ComplexMatrix,
    c: &RedfieldCoefficients,
    omega0: f64,
) -> Result<ComplexMatrix> {
    assert_eq!(rho.dim(), 4, "general master equation acts on 4x4 matrices");
    rho.check_hermitian(HERM_TOL)?;
    check_cross_symmetry(c)?;
    let h0 = (&site_op(1, 0) + &site_op(1, 1)).scale_re(0.5 * omega0);
    let mut out = commutator(&h0, rho).scale(Complex64::new(0.0, -1.0));
    for a in 0..2 {
        for b in 0..2 {
            for i in 0..3 {
                for j in 0..3 {
                    let w = c.c[a][b][i][j];
                    if w == 0.0 {
                        continue;
                    }
                    let sa = site_op(i + 1, a);
                    let sb = site_op(j + 1, b);
                    let dc = commutator(&sa, &commutator(&sb, rho));
                    out = &out - &dc.scale_re(w);
                }
            }
        }
    }
    Ok(out)
}

fn epsilon(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (2, 1, 0) | (1, 0, 2) | (0, 2, 1) => -1.0,
        _ => 0.0,
    }
}

/// Hamiltonian correction generated by the antisymmetric part of an
/// on-site coefficient matrix: H_D = sum epsilon_{ijk} A_{ij} sigma_k.
pub(crate) fn site_hamiltonian_correction(cs: &[[f64; 3]; 3]) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(2);
    for i in 0..3 {
        for j in 0..3 {
            let anti = 0.5 * (cs[i][j] - cs[j][i]);
            if anti == 0.0 {
                continue;
            }
            for k in 0..3 {
                let e = epsilon(i, j, k);
                if e != 0.0 {
                    h = &h + &pauli(k + 1).scale_re(e * anti);
                }
            }
        }
    }
    h
}

/// Same equation as [`redfield_rhs`], evaluated through the split into a
/// corrected Hamiltonian plus on-site and cross-site dissipators. The two
/// paths agree to machine noise and are tested against each other.
pub fn redfield_rhs_split(
    rho: &ComplexMatrix,
    c: &RedfieldCoefficients,
    omega0: f64,
) -> Result<ComplexMatrix> {
    assert_eq!(rho.dim(), 4, "general master equation acts on 4x4 matrices");
    rho.check_hermitian(HERM_TOL)?;
    check_cross_symmetry(c)?;

    // Total Hamiltonian: free part plus the dissipative correction per site.
    let mut h = (&site_op(1, 0) + &site_op(1, 1)).scale_re(0.5 * omega0);
    for site in 0..2 {
        let hd = site_hamiltonian_correction(&c.c[site][site]);
        h = &h
            + &match site {
                0 => tensor(&hd, &pauli(0)),
                _ => tensor(&pauli(0), &hd),
            };
    }
    let mut out = commutator(&h, rho).scale(Complex64::new(0.0, -1.0));

    // On-site dissipators from the symmetric parts.
    for site in 0..2 {
        let cs = &c.c[site][site];
        for i in 0..3 {
            for j in 0..3 {
                let sym = 0.5 * (cs[i][j] + cs[j][i]);
                if sym == 0.0 {
                    continue;
                }
                let si = site_op(i + 1, site);
                let sj = site_op(j + 1, site);
                let term = &(&(&si * rho) * &sj).scale_re(2.0) - &anticommutator(&(&si * &sj), rho);
                out = &out + &term.scale_re(sym);
            }
        }
    }

    // Cross-site dissipator.
    for i in 0..3 {
        for j in 0..3 {
            let w = c.c[0][1][i][j] + c.c[1][0][j][i];
            if w == 0.0 {
                continue;
            }
            let si1 = site_op(i + 1, 0);
            let sj2 = site_op(j + 1, 1);
            let term = &commutator(&si1, &(rho * &sj2)) + &commutator(&(&sj2 * rho), &si1);
            out = &out + &term.scale_re(w);
        }
    }
    Ok(out)
}
