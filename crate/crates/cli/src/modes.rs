//! Mode implementations. Each mode renders a complete CSV document with a
//! `#`-prefixed comment preamble echoing the resolved parameters; output
//! is byte-deterministic for a given configuration and seed.

use bredsim_core::*;

use crate::config::{ParamBlock, RunConfig};

type CliResult<T> = std::result::Result<T, String>;

/// Fixed 15-significant-digit scientific formatting.
fn fmt(x: f64) -> String {
    format!("{x:.14e}")
}

fn header(mode: &str, cfg: &RunConfig) -> String {
    let g = cfg.params.generator();
    let mut out = String::new();
    out.push_str(&format!("# bredsim {mode}\n"));
    if let ParamBlock::Physical { params, .. } = &cfg.params {
        out.push_str(&format!(
            "# g2 = {}, f2 = {}, mu = {}, nu = {}, omega0 = {}\n",
            fmt(params.g2),
            fmt(params.f2),
            fmt(params.mu),
            fmt(params.nu),
            fmt(params.omega0)
        ));
    }
    out.push_str(&format!(
        "# alpha = {}, beta = {}, omega = {}, gamma = {}, delta = {}\n",
        fmt(g.alpha),
        fmt(g.beta),
        fmt(g.omega),
        fmt(g.gamma),
        fmt(g.delta)
    ));
    out
}

fn time_grid(t_max: f64, n_points: usize) -> Vec<f64> {
    (0..n_points)
        .map(|k| t_max * k as f64 / (n_points - 1) as f64)
        .collect()
}

fn default_rk4_step(g: &GeneratorParams) -> f64 {
    1e-3 / g.omega.abs().max(1e-3)
}

pub fn single_trace(cfg: &RunConfig) -> CliResult<String> {
    let g = cfg.params.generator();
    let s = cfg.state()?;
    let v0 = BlochVector::state(s[0], s[1], s[2]);
    let times = time_grid(cfg.grid.t_max()?, cfg.grid.n_points()?);

    // cross-check of the integrator against the exact propagator
    let dt = cfg.run.dt.unwrap_or_else(|| default_rk4_step(&g));
    let rho0 = bloch_compose(&v0);
    let rk4 = propagate_numeric(&rho0, |_, m| single_site_rhs(m, &g), &times, dt)
        .map_err(|e| e.to_string())?;
    let exact = propagate_analytic_grid(&rho0, &times, &g).map_err(|e| e.to_string())?;

    let mut out = header("single-trace", cfg);
    let mut sup_dev = 0.0f64;
    let mut rows = String::new();
    for ((state, numeric), &t) in exact.states.iter().zip(&rk4.states).zip(&times) {
        sup_dev = sup_dev.max(numeric.max_abs_diff(state));
        let v = bloch_decompose(state).map_err(|e| e.to_string())?;
        let eigs = herm_eigvals(state).map_err(|e| e.to_string())?;
        rows.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(t),
            fmt(v.eta1),
            fmt(v.eta2),
            fmt(v.eta3),
            fmt(eigs[0])
        ));
    }
    out.push_str(&format!(
        "# rk4_dt = {}, rk4_sup_deviation = {}\n",
        fmt(dt),
        fmt(sup_dev)
    ));
    out.push_str("t,eta1,eta2,eta3,min_eig\n");
    out.push_str(&rows);
    Ok(out)
}

pub fn pair_lambda(cfg: &RunConfig) -> CliResult<String> {
    let g = cfg.params.generator();
    let times = time_grid(cfg.grid.t_max()?, cfg.grid.n_points()?);
    let singlet = make_singlet().rho;
    let mut out = header("pair-lambda", cfg);
    out.push_str("t,lambda_closed,lambda_eigen,min_eig\n");
    for &t in &times {
        let closed = lambda_closed_form(t, &g);
        let rho_t = product_map(&singlet, t, &g).map_err(|e| e.to_string())?;
        let lam = lambda_from_state(&rho_t).map_err(|e| e.to_string())?;
        let eigs = herm_eigvals(&rho_t).map_err(|e| e.to_string())?;
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt(t),
            fmt(closed),
            fmt(lam.value),
            fmt(eigs[0])
        ));
    }
    Ok(out)
}

pub fn theta_scan(cfg: &RunConfig) -> CliResult<String> {
    let g = cfg.params.generator();
    let step = cfg.grid.theta_step()?;
    if step <= 0.0 {
        return Err("'theta_step' must be positive".into());
    }
    let mut out = header("theta-scan", cfg);
    match theta_threshold(&g) {
        ThetaThreshold::Angle(th) => {
            out.push_str(&format!("# theta_star = {}\n", fmt(th)));
        }
        ThetaThreshold::NoViolationPossible => {
            out.push_str("# theta_star = none (no violation possible at beta = 0)\n");
        }
    }
    let n = (std::f64::consts::FRAC_PI_2 / step).floor() as usize;
    let mut rows = String::new();
    let mut flip: Option<f64> = None;
    let mut prev_measured = f64::NAN;
    for k in 0..=n {
        let theta = (k as f64 * step).min(std::f64::consts::FRAC_PI_2);
        let rho0 = make_theta(theta).map_err(|e| e.to_string())?.rho;
        let measured = measured_curvature_at_zero(&rho0, &g, 1e-3).map_err(|e| e.to_string())?;
        if flip.is_none() && k > 0 && prev_measured >= 0.0 && measured < 0.0 {
            flip = Some(theta - 0.5 * step);
        }
        prev_measured = measured;
        let predicted = lambda_curvature_at_zero(&g, Some(theta));
        let sign = if predicted > 0.0 {
            1
        } else if predicted < 0.0 {
            -1
        } else {
            0
        };
        rows.push_str(&format!("{},{},{sign}\n", fmt(theta), fmt(measured)));
    }
    match flip {
        Some(th) => out.push_str(&format!("# theta_star_measured = {}\n", fmt(th))),
        None => out.push_str("# theta_star_measured = none\n"),
    }
    out.push_str("theta,curvature,predicted_sign\n");
    out.push_str(&rows);
    Ok(out)
}

pub fn werner_scan(cfg: &RunConfig) -> CliResult<String> {
    let g = cfg.params.generator();
    if g.alpha != 0.0 {
        return Err(format!(
            "werner-scan uses the closed form valid only at alpha = 0 (got alpha = {})",
            g.alpha
        ));
    }
    let omega = g
        .big_omega()
        .ok_or_else(|| "werner-scan requires a real oscillation frequency".to_string())?;
    let step = cfg.grid.p_step()?;
    if step <= 0.0 {
        return Err("'p_step' must be positive".into());
    }
    let period = std::f64::consts::PI / (2.0 * omega);
    let p_star = werner_threshold(&g).map_err(|e| e.to_string())?;
    let mut out = header("werner-scan", cfg);
    out.push_str(&format!(
        "# p_star = {}, scan_period = {}\n",
        fmt(p_star),
        fmt(period)
    ));
    let lo = -1.0 / 3.0;
    let n = ((1.0 - lo) / step).floor() as usize;
    let mut rows = String::new();
    let mut flip: Option<f64> = None;
    let mut prev_flag = 0u8;
    for k in 0..=n {
        let p = (lo + k as f64 * step).min(1.0);
        let (_, min) = werner_lambda_minimum(p, &g, period, 4001).map_err(|e| e.to_string())?;
        let flag = u8::from(min < -POSITIVITY_TOL);
        if flip.is_none() && k > 0 && prev_flag == 0 && flag == 1 {
            flip = Some(p - 0.5 * step);
        }
        prev_flag = flag;
        rows.push_str(&format!("{},{},{flag}\n", fmt(p), fmt(min)));
    }
    match flip {
        Some(p) => out.push_str(&format!("# p_star_measured = {}\n", fmt(p))),
        None => out.push_str("# p_star_measured = none\n"),
    }
    out.push_str("p,min_lambda_w,threshold_flag\n");
    out.push_str(&rows);
    Ok(out)
}

pub fn choi(cfg: &RunConfig) -> CliResult<String> {
    let g = cfg.params.generator();
    let times = time_grid(cfg.grid.t_max()?, cfg.grid.n_points()?);
    let mut out = header("choi", cfg);
    out.push_str("t,min_choi_eig\n");
    for &t in &times {
        let vals = herm_eigvals(&choi_matrix(t, &g)).map_err(|e| e.to_string())?;
        out.push_str(&format!("{},{}\n", fmt(t), fmt(vals[0])));
    }
    Ok(out)
}

pub fn admissible(cfg: &RunConfig) -> CliResult<String> {
    let g = cfg.params.generator();
    let s = cfg.state()?;
    let rho0 = bloch_compose(&BlochVector::state(s[0], s[1], s[2]));
    let report = admissible_scan(&rho0, &g, cfg.grid.t_max()?, cfg.grid.n_points()?)
        .map_err(|e| e.to_string())?;
    let mut out = header("admissible", cfg);
    out.push_str(&format!("# admissible = {}\n", report.admissible));
    match report.first_negative_time {
        Some(t) => out.push_str(&format!("# first_negative_time = {}\n", fmt(t))),
        None => out.push_str("# first_negative_time = none\n"),
    }
    out.push_str("t,min_eig\n");
    for (t, m) in report.times.iter().zip(&report.min_eigenvalues) {
        out.push_str(&format!("{},{}\n", fmt(*t), fmt(*m)));
    }
    Ok(out)
}

pub fn validate_mc(cfg: &RunConfig) -> CliResult<String> {
    let p = cfg.physical()?;
    let g = cfg.params.generator();
    let s = cfg.state()?;
    let rho0 = bloch_compose(&BlochVector::state(s[0], s[1], s[2]));
    let n_points = cfg.grid.n_points()?;
    let grid = EnsembleGrid {
        t_max: cfg.grid.t_max()?,
        n_out: n_points - 1,
        dt: cfg.run.dt.unwrap_or_else(|| default_step(p)),
    };
    let ens = ensemble_average(&rho0, cfg.run.n_traj, p, &grid, cfg.run.seed)
        .map_err(|e| e.to_string())?;
    let report = markov_gap_report(&ens, &g).map_err(|e| e.to_string())?;
    let mut min_eig = f64::INFINITY;
    for state in &ens.mean_states {
        min_eig = min_eig.min(herm_eigvals(state).map_err(|e| e.to_string())?[0]);
    }

    let mut out = header("validate-mc", cfg);
    out.push_str(&format!(
        "# n_traj = {}, seed = {}, dt = {}\n",
        ens.n_traj,
        ens.seed,
        fmt(grid.dt)
    ));
    out.push_str(&format!(
        "# max_gap_ratio = {}, max_abs_gap = {}, min_mean_eigenvalue = {}\n",
        fmt(report.max_ratio),
        fmt(report.max_abs_deviation),
        fmt(min_eig)
    ));
    out.push_str(
        "t,mean_eta1,stderr_eta1,markov_eta1,ratio_eta1,mean_eta2,stderr_eta2,markov_eta2,ratio_eta2,mean_eta3,stderr_eta3,markov_eta3,ratio_eta3\n",
    );
    let v0 = BlochVector::state(s[0], s[1], s[2]);
    for (j, &t) in ens.times.iter().enumerate() {
        let mean = bloch_decompose(&ens.mean_states[j]).map_err(|e| e.to_string())?;
        let markov = propagate_bloch_analytic(&v0, t, &g).map_err(|e| e.to_string())?;
        let mean_c = [mean.eta1, mean.eta2, mean.eta3];
        let markov_c = [markov.eta1, markov.eta2, markov.eta3];
        out.push_str(&fmt(t));
        for c in 0..3 {
            out.push_str(&format!(
                ",{},{},{},{}",
                fmt(mean_c[c]),
                fmt(ens.stderr[j][c]),
                fmt(markov_c[c]),
                fmt(report.ratios[j][c])
            ));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn redfield_coeffs(cfg: &RunConfig) -> CliResult<String> {
    let p = cfg.physical()?;
    let times = time_grid(cfg.grid.t_max()?, cfg.grid.n_points()?);
    let limit = RedfieldCoefficients::markov(p);
    let mut out = header("redfield-coeffs", cfg);
    out.push_str(&format!(
        "# markov limits: c33_onsite = {} (alpha/2), c32_onsite = {} (-beta), c33_cross = {} (gamma/2), c32_cross = {}\n",
        fmt(limit.c[0][0][2][2]),
        fmt(limit.c[0][0][2][1]),
        fmt(limit.c[0][1][2][2]),
        fmt(limit.c[0][1][2][1])
    ));
    out.push_str("t,c33_onsite,c32_onsite,c33_cross,c32_cross\n");
    for &t in &times {
        let c = RedfieldCoefficients::finite_time(p, t);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(t),
            fmt(c.c[0][0][2][2]),
            fmt(c.c[0][0][2][1]),
            fmt(c.c[0][1][2][2]),
            fmt(c.c[0][1][2][1])
        ));
    }
    Ok(out)
}
