//! The experiment drivers behind each subcommand.

use shellwave::coupling_calculus::{classify, inverse_design, rescale_magnetic, rescale_squeezed, Coupling};
use shellwave::dirac_algebra::dirac_rep;
use shellwave::fiber_operators::{volterra_radius, ProfileQ, QuadratureGrid};
use shellwave::green_kernels::FiberContext;
use shellwave::parallel::{try_par_map, Exec};
use shellwave::resolvent_engine::{
    default_xi_grid, default_xi_max, fiber_difference_norm, limit_shell, rate_fit, shell_norm, sup_over_fibers,
    unitary_equivalence_residual, TransverseGrid,
};
use shellwave::spectral_probe::{build_zero_mode, shell_zero_excluded, solve_a_eps, xi_eps};

use crate::config::{ConfigError, RunConfig};
use crate::report::{Report, Value};

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Library(shellwave::Error),
    Numeric(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Library(e) if e.is_precondition() => 2,
            _ => 3,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "invalid configuration: {e}"),
            RunError::Library(e) => write!(f, "{e}"),
            RunError::Numeric(s) => write!(f, "numerical failure: {s}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<shellwave::Error> for RunError {
    fn from(e: shellwave::Error) -> Self {
        RunError::Library(e)
    }
}

fn invalid(msg: String) -> RunError {
    RunError::Config(ConfigError(msg))
}

fn coupling(cfg: &RunConfig) -> Result<Coupling, ConfigError> {
    Ok(Coupling::new(cfg.real("eta")?, cfg.real("tau")?))
}

fn positive(cfg: &RunConfig, key: &str) -> Result<f64, RunError> {
    let v = cfg.real(key)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(format!("--{key} must be positive, got {v}")))
    }
}

fn nodes(cfg: &RunConfig) -> Result<QuadratureGrid, RunError> {
    let n = cfg.count("n")?;
    if n < 8 {
        return Err(invalid(format!("--n must be at least 8, got {n}")));
    }
    Ok(QuadratureGrid::new(n)?)
}

fn planar(m: f64, z: shellwave::C64, xi: f64) -> Result<FiberContext, RunError> {
    Ok(FiberContext::planar(dirac_rep(2, None)?, m, z, xi)?)
}

pub fn execute(cfg: &RunConfig) -> Result<Report, RunError> {
    match cfg.command.name {
        "rescale" => rescale(cfg),
        "classify" => classify_cmd(cfg),
        "volterra" => volterra(cfg),
        "fiber-norm" => fiber_norm(cfg),
        "converge" => converge(cfg),
        "counterexample" => counterexample(cfg),
        "unitary-check" => unitary_check(cfg),
        other => Err(invalid(format!("unknown command {other}"))),
    }
}

fn rescale(cfg: &RunConfig) -> Result<Report, RunError> {
    let c = coupling(cfg)?;
    let t = if cfg.flag("magnetic")? { rescale_magnetic(c)? } else { rescale_squeezed(c)? };
    Ok(Report::default()
        .field("eta_t", t.eta)
        .field("tau_t", t.tau)
        .field("class", classify(c).variant.name()))
}

fn classify_cmd(cfg: &RunConfig) -> Result<Report, RunError> {
    let c = coupling(cfg)?;
    let k = classify(c);
    let mut r = Report::default().field("d", k.d).field("class", k.variant.name());
    if let Some(dt) = k.d_tilde {
        r = r.field("d_tilde", dt);
    }
    Ok(r)
}

fn volterra(cfg: &RunConfig) -> Result<Report, RunError> {
    let rho = positive(cfg, "rho")?;
    let theta = cfg.count("theta")?;
    if theta != 2 && theta != 3 {
        return Err(invalid(format!("--theta must be 2 or 3, got {theta}")));
    }
    let grid = nodes(cfg)?;
    let profile = cfg.text("profile")?;
    let q = match profile.as_str() {
        "half" => ProfileQ::half_indicator(&grid),
        "bump" => ProfileQ::from_fn(&grid, |s| (1.0 - s * s).powi(2))?,
        p => return Err(invalid(format!("--profile must be half or bump, got {p}"))),
    };
    let rep = dirac_rep(theta, None)?;
    let mut w = vec![0.0; theta - 1];
    w[0] = 1.0;
    let radius = volterra_radius(rho, &w, &q, &grid, &rep);
    Ok(Report::default()
        .field("rho", rho)
        .field("theta", theta)
        .field("n", grid.n)
        .field("profile", profile.as_str())
        .field("radius", radius)
        .field("bound", 2.0 / std::f64::consts::PI))
}

fn fiber_norm(cfg: &RunConfig) -> Result<Report, RunError> {
    let c = coupling(cfg)?;
    let (m, z) = (cfg.real("m")?, cfg.complex("z")?);
    let eps = positive(cfg, "eps")?;
    let xis = cfg.reals("xi")?;
    let magnetic = cfg.flag("magnetic")?;
    let grid = nodes(cfg)?;
    let q = ProfileQ::half_indicator(&grid);
    limit_shell(c, magnetic)?;
    planar(m, z, 0.0)?;
    let rows = try_par_map(Exec::Parallel, &xis, |&xi| {
        let ctx = FiberContext::planar(dirac_rep(2, None)?, m, z, xi)?;
        let xg = TransverseGrid::for_fiber(&ctx, eps)?;
        Ok((xi, fiber_difference_norm(&ctx, c, &q, eps, magnetic, &grid, &xg)?, shell_norm(&ctx, c, magnetic, &xg)?))
    })?;
    let mut r = Report::default().field("eps", eps).table(&["xi", "difference_norm", "shell_norm"]);
    for (xi, d, s) in rows {
        r.row(vec![xi.into(), d.into(), s.into()]);
    }
    Ok(r)
}

fn converge(cfg: &RunConfig) -> Result<Report, RunError> {
    let c = coupling(cfg)?;
    let (m, z) = (cfg.real("m")?, cfg.complex("z")?);
    let eps = cfg.reals("eps")?;
    if eps.len() < 4 {
        return Err(invalid(format!("--eps needs at least 4 values, got {}", eps.len())));
    }
    if let Some(e) = eps.iter().find(|e| !(**e > 0.0)) {
        return Err(invalid(format!("--eps values must be positive, got {e}")));
    }
    let magnetic = cfg.flag("magnetic")?;
    let points = cfg.count("xi-points")?;
    if points < 2 {
        return Err(invalid(format!("--xi-points must be at least 2, got {points}")));
    }
    let xi_max = if cfg.has("xi-max") { Some(positive(cfg, "xi-max")?) } else { None };
    let grid = nodes(cfg)?;
    let q = ProfileQ::half_indicator(&grid);
    limit_shell(c, magnetic)?;
    let base = planar(m, z, 0.0)?;
    let mut r = Report::default().table(&["eps", "sup_norm"]);
    let mut norms = Vec::with_capacity(eps.len());
    for &e in &eps {
        let xi = default_xi_grid(xi_max.unwrap_or_else(|| default_xi_max(c, e)), points);
        let s = sup_over_fibers(&base, c, &q, e, magnetic, &xi, &grid, Exec::Parallel)?;
        if s.tail_warning {
            eprintln!("warning: fiber norms at eps = {e} are not decreasing at the end of the xi grid");
        }
        r.row(vec![e.into(), s.value.into()]);
        norms.push(s.value);
    }
    let fit = rate_fit(&eps, &norms)?;
    Ok(r.field("slope", fit.slope)
        .field("intercept", fit.intercept)
        .field("max_abs_residual", fit.max_abs_residual))
}

fn counterexample(cfg: &RunConfig) -> Result<Report, RunError> {
    let c = coupling(cfg)?;
    let m = cfg.real("m")?;
    let eps = positive(cfg, "eps")?;
    let a = solve_a_eps(c.d(), c.tau, m, eps)?;
    let xi = xi_eps(c.d(), c.tau, m, eps, a)?;
    let cert = build_zero_mode(xi, eps, c, m)?;
    let shell = limit_shell(c, false)?;
    let mut r = Report::default()
        .field("eta", c.eta)
        .field("tau", c.tau)
        .field("m", m)
        .field("eps", eps)
        .field("d", c.d())
        .field("a_eps", cert.a_eps)
        .field("xi_eps", cert.xi)
        .field("mu", cert.mu)
        .field("c1", cert.c1)
        .field("c3", cert.c3);
    for (name, w) in [("w1", cert.w1), ("w2", cert.w2), ("w3", cert.w3)] {
        r = r.field(&format!("{name}_1"), w[0]).field(&format!("{name}_2"), w[1]);
    }
    let excluded = match shell_zero_excluded(m, shell) {
        Ok(b) => Value::Bool(b),
        Err(e) => Value::Text(e.to_string()),
    };
    Ok(r.field("residual_condition", cert.residual_condition)
        .field("residual_ode", cert.residual_ode)
        .field("residual_continuity", cert.residual_continuity)
        .field("residual_decay", cert.residual_decay)
        .field("shell_eta", shell.eta)
        .field("shell_tau", shell.tau)
        .field("shell_zero_excluded", excluded))
}

fn unitary_check(cfg: &RunConfig) -> Result<Report, RunError> {
    let target = coupling(cfg)?;
    let (m, z) = (cfg.real("m")?, cfg.complex("z")?);
    let xis = cfg.reals("xi")?;
    let dt = target.d();
    let (pre, _) = inverse_design(target.scaled(-4.0 / dt))?;
    let grid = QuadratureGrid::new(40)?;
    let q = ProfileQ::half_indicator(&grid);
    let rows = try_par_map(Exec::Parallel, &xis, |&xi| {
        let ctx = FiberContext::planar(dirac_rep(2, None)?, m, z, xi)?;
        let xg = TransverseGrid::for_fiber(&ctx, 0.0)?;
        Ok((xi, unitary_equivalence_residual(&ctx, target, &q, &grid, &xg)?))
    })?;
    let mut r = Report::default()
        .field("d_tilde", dt)
        .field("preimage_eta", pre.eta)
        .field("preimage_tau", pre.tau)
        .table(&["xi", "residual"]);
    for (xi, res) in rows {
        r.row(vec![xi.into(), res.into()]);
    }
    Ok(r)
}
