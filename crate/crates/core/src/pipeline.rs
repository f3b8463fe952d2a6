//! End-to-end orchestration: wrinkle family → patched Hamiltonians →
//! push maps → symplectization trace → verifier, plus figure rendering
//! and parameter sweeps. Used by the CLI and the Python bindings.

use crate::config::RunConfig;
use crate::contact::{alpha_eval, ContactPoint, ScalarField};
use crate::error::{Result, WclError};
use crate::flow::{contact_flow, BoundingBox};
use crate::patch::{PatchParams, PatchedHamiltonian};
use crate::push::{
    gamma, gamma_clearance, gamma_prime, measure_lambda_all, probe_directions, xg_flow,
    CutoffTriple, EscapeChart, EscapeProfile, PushMap, TubeCoords,
};
use crate::render::{front_filename, render_front, render_regions, RenderSpec};
use crate::symplectization::{
    lifted_hamiltonian, trace_cobordism, IsotopyFamily, MeshedLagrangian, TraceConfig,
};
use crate::util::{fmt_f64, linspace};
use crate::verifier::{
    check_end_variance, check_ends, check_exact_quads, check_lagrangian, check_legendrian,
    check_path_independence, check_truncation_validity, family_samples, mesh_fd_tangents,
    CheckEntry, VerificationReport,
};
use crate::wrinkle::{
    alpha_xt, isotopy_field_xt, lift_family, project_to_family, singular_locus, u_from_y1,
    u_from_y2, WrinkleChart,
};

fn patch_params(cfg: &RunConfig, t: f64) -> PatchParams {
    PatchParams {
        eps: cfg.eps,
        delta: cfg.delta,
        rho_tube: cfg.rho_tube,
        rho_cut: cfg.rho_cut,
        t,
    }
}

/// Patch parameters for the traced cobordism: same thresholds, wide
/// cutoff tube (mid-band nodes lag behind the isotopy and must never
/// transit the cutoff shell).
fn trace_patch_params(cfg: &RunConfig, t: f64) -> PatchParams {
    PatchParams {
        eps: cfg.eps,
        delta: cfg.delta,
        rho_tube: cfg.trace_rho_tube,
        rho_cut: cfg.trace_rho_cut,
        t,
    }
}

/// Identity grid of the formula suite: 101×101×11 over [−2,2]²×[−T,T].
const ID_GRID_UX: usize = 101;
const ID_GRID_T: usize = 11;

/// Criterion 1: the three α(X_t) expressions agree, and both
/// u-inversions recover u.
pub fn stage_formula_identities(cfg: &RunConfig) -> Vec<CheckEntry> {
    let us = linspace(-2.0, 2.0, ID_GRID_UX);
    let xs = linspace(-2.0, 2.0, ID_GRID_UX);
    let ts = linspace(-cfg.t_half, cfg.t_half, ID_GRID_T);
    let mut worst_three: f64 = 0.0;
    let mut worst_y1: f64 = 0.0;
    let mut worst_y1_axis: f64 = 0.0;
    let mut worst_y2: f64 = 0.0;
    let mut n_three = 0usize;
    let mut n_outer = 0usize;
    let mut n_axis = 0usize;
    for &t in &ts {
        for &u in &us {
            for &x2 in &xs {
                let w = t - x2 * x2;
                let p = lift_family(u, x2, t, cfg.n);
                let closed = alpha_xt(u, x2, t);
                let via_x1 = p.x[0] / 3.0 + 2.0 * u * w;
                let via_pairing = alpha_eval(&p, &isotopy_field_xt(u, x2, t, cfg.n)).expect("dims");
                worst_three = worst_three
                    .max((closed - via_x1).abs())
                    .max((closed - via_pairing).abs());
                n_three += 1;
                if (x2 * w).abs() >= 1e-6 {
                    let via_outer = -p.y[1] / (2.0 * x2);
                    worst_three = worst_three.max((closed - via_outer).abs());
                    n_outer += 1;
                }
                // y₁ inversion with matching sign. On the axis u = 0 the
                // branch sign is degenerate and the radicand sits on a
                // double-precision cancellation floor (measured at the
                // floor tolerance instead of relative recovery).
                let rec = u_from_y1(p.y[0], x2, t, u >= 0.0).expect("radicand = u^2");
                if u.abs() > 1e-6 {
                    worst_y1 = worst_y1.max((rec - u).abs() / u.abs().max(1.0));
                } else {
                    worst_y1_axis = worst_y1_axis.max((rec - u).abs());
                    n_axis += 1;
                }
                if (x2 * w).abs() > 1e-6 {
                    let rec = u_from_y2(p.x[0], x2, p.y[1], t).expect("guarded");
                    worst_y2 = worst_y2.max((rec - u).abs() / u.abs().max(1.0));
                }
            }
        }
    }
    vec![
        CheckEntry::residual_entry(
            "formula.alpha-xt.three-routes",
            worst_three,
            cfg.tol("formula"),
            n_three + n_outer,
            0,
        ),
        CheckEntry::residual_entry(
            "formula.inversion.y1",
            worst_y1,
            cfg.tol("inversion"),
            n_three - n_axis,
            0,
        ),
        CheckEntry::residual_entry(
            "formula.inversion.y1.degenerate-axis",
            worst_y1_axis,
            1e-7,
            n_axis,
            0,
        ),
        CheckEntry::residual_entry(
            "formula.inversion.y2",
            worst_y2,
            cfg.tol("inversion"),
            n_outer,
            0,
        ),
    ]
}

/// Criterion 2: Legendrian certification of the lift and the singular
/// locus location at t = 1.
pub fn stage_legendrian(cfg: &RunConfig) -> Vec<CheckEntry> {
    let mut worst: f64 = 0.0;
    let mut count = 0usize;
    let ts = linspace(-cfg.t_half, cfg.t_half, ID_GRID_T);
    for &t in &ts {
        let samples = family_samples(t, cfg.n, ID_GRID_UX, ID_GRID_UX, 2.0);
        let entry = check_legendrian("tmp", &samples, cfg.tol("legendrian"));
        worst = worst.max(entry.residual);
        count += samples.len();
    }
    let pullback = CheckEntry::residual_entry(
        "legendrian.pullback",
        worst,
        cfg.tol("legendrian"),
        count,
        0,
    );

    let locus = singular_locus(1.0, cfg.n);
    let locus_res = if locus.len() == 2 {
        locus[0]
            .u
            .abs()
            .max((locus[0].v[0] + 1.0).abs())
            .max(locus[1].u.abs())
            .max((locus[1].v[0] - 1.0).abs())
    } else {
        f64::INFINITY
    };
    let locus_entry = CheckEntry::residual_entry(
        "legendrian.singular-locus.t1",
        locus_res,
        cfg.tol("locus"),
        locus.len(),
        0,
    );
    vec![pullback, locus_entry]
}

/// Criterion 3: flowing L_t samples by the contact field of the frozen
/// patched Hamiltonian lands on L_{t+Δ} at order ≥ 1.8 in Δ.
pub fn stage_transport(cfg: &RunConfig) -> Result<Vec<CheckEntry>> {
    let deltas = [0.02, 0.01, 0.005];
    let ts = [-0.5 * cfg.t_half, 0.25 * cfg.t_half, 0.75 * cfg.t_half];
    // Sample parameters away from the core disc, including the branch
    // strip |x₂| < ε/2 (the outer extension has no explicit time
    // dependence, so only the strip exercises the O(Δ²) freezing error
    // the order measurement is about).
    let mut params = Vec::new();
    for &u in &linspace(-1.4, 1.4, 7) {
        for &x2 in &linspace(-1.4, 1.4, 7) {
            if u * u + x2 * x2 >= 4.0 * cfg.eps {
                params.push((u, x2));
            }
        }
    }
    for &u in &[-1.1, -0.7, 0.7, 1.1] {
        params.push((u, 0.0));
        params.push((u, 0.3 * cfg.eps));
    }
    let bbox = BoundingBox::default();
    let mut residuals = Vec::new();
    for &dt in &deltas {
        let mut worst: f64 = 0.0;
        for &t in &ts {
            for &(u, x2) in &params {
                // A fresh evaluator per sample: warm-start state must not
                // leak between unrelated points.
                let ham = PatchedHamiltonian::new(patch_params(cfg, t), t);
                let p0 = lift_family(u, x2, t, cfg.n);
                let family = |_s: f64| -> Box<dyn ScalarField + '_> { Box::new(ham.clone()) };
                let (p1, trunc) = contact_flow(&family, &p0, t, t + dt, 1e-3, &bbox)?;
                if trunc.is_some() {
                    return Err(WclError::Domain(
                        "transport trajectory left the bounding box".into(),
                    ));
                }
                let proj = project_to_family(&p1, t + dt, cfg.n, Some((u, x2)));
                worst = worst.max(proj.dist);
            }
        }
        residuals.push(worst);
    }
    let mut out = Vec::new();
    for (k, &dt) in deltas.iter().enumerate() {
        out.push(CheckEntry::residual_entry(
            &format!("transport.residual.d{k}"),
            residuals[k],
            // Frozen-time freezing error is O(Δ²); allow a generous
            // constant, the binding assertion is the measured order.
            10.0 * dt * dt,
            params.len() * ts.len(),
            0,
        ));
    }
    out.push(CheckEntry::order_at_least(
        "transport.order",
        &deltas,
        &residuals,
        cfg.tol("transport_order"),
    ));
    Ok(out)
}

fn core_anchor(cfg: &RunConfig, t: f64) -> ContactPoint {
    lift_family(0.05, 0.05, t, cfg.n)
}

/// Criterion 4: isotropy of the escape paths, the cutoff conditions,
/// exact fixing of the complement, λ behavior, and monotone escape.
pub fn stage_push(cfg: &RunConfig) -> Result<Vec<CheckEntry>> {
    let mut out = Vec::new();
    let t = 0.5 * cfg.t_half;

    // γ isotropy: exact cancellation everywhere.
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &u in &linspace(-1.5, 1.5, 11) {
        for &x2 in &linspace(-1.5, 1.5, 11) {
            let base = lift_family(u, x2, t, cfg.n);
            let gp = gamma_prime(&base);
            for &tau in &[-3.0, -0.7, 0.0, 0.4, 2.0, 8.0] {
                let q = gamma(&base, tau);
                worst = worst.max(alpha_eval(&q, &gp)?.abs());
                count += 1;
            }
        }
    }
    out.push(CheckEntry::residual_entry(
        "push.gamma.isotropy",
        worst,
        cfg.tol("isotropy"),
        count,
        0,
    ));

    // Cutoff conditions (1)-(3) at 1000 samples each, derivative bounds
    // with measured constant C ≤ cutoff_c over ε.
    let triple = CutoffTriple::new(cfg.push_eps)?;
    let eps = cfg.push_eps;
    let g = cfg.g_cap;
    let mut violation: f64 = 0.0;
    let c_bound = cfg.tol("cutoff_c") / eps;
    for k in 0..1000 {
        let r = 1.2 * eps * k as f64 / 999.0;
        if r <= 0.25 * eps && (triple.phi(r) - 1.0).abs() > 0.0 {
            violation = violation.max((triple.phi(r) - 1.0).abs());
        }
        if r >= 0.75 * eps && triple.phi(r) != 0.0 {
            violation = violation.max(triple.phi(r).abs());
        }
        violation = violation.max((triple.phi_deriv(r).abs() - c_bound).max(0.0) * eps);

        let tau = -eps + (g + 2.0 * eps) * k as f64 / 999.0;
        if (0.0..=g).contains(&tau) && triple.f(tau, g) != 1.0 {
            violation = violation.max((triple.f(tau, g) - 1.0).abs());
        }
        if (tau < -0.5 * eps || tau > g + 0.5 * eps) && triple.f(tau, g) != 0.0 {
            violation = violation.max(triple.f(tau, g).abs());
        }
        violation = violation.max((triple.f_deriv(tau, g).abs() - c_bound).max(0.0) * eps);

        let s = -eps + 2.0 * eps * k as f64 / 999.0;
        if s.abs() <= 0.25 * eps {
            violation = violation.max((triple.psi_deriv(s) - 1.0).abs());
        }
        if s.abs() > 0.75 * eps {
            violation = violation
                .max(triple.psi(s).abs())
                .max(triple.psi_deriv(s).abs());
        }
        violation = violation.max((triple.psi(s).abs() - c_bound).max(0.0) * eps);
    }
    out.push(CheckEntry::residual_entry(
        "push.cutoff.conditions",
        violation,
        1e-12,
        3000,
        0,
    ));

    // Escape-path clearance for the default chart.
    let anchor = core_anchor(cfg, t);
    let clearance = gamma_clearance(&anchor, 3.0 * eps, cfg.g_cap.min(5.0), t, 1e-3)?;
    out.push(CheckEntry::residual_entry(
        "push.gamma.clearance",
        (1e-3 - clearance.min_dist).max(0.0),
        0.0,
        200,
        0,
    ));

    // Ψ fixes the complement of supp G exactly.
    let chart = EscapeChart::new(anchor.clone(), clearance.direction, eps, cfg.g_cap)?;
    let push = PushMap::new(chart.clone(), cfg.g_cap, 1e-3);
    let mut fix_worst: f64 = 0.0;
    let offsets = [
        (0.0, 0.9 * eps, 0.0),
        (0.0, 0.0, 0.9 * eps),
        (-eps, 0.0, 0.0),
        (0.0, -0.8 * eps, 0.4 * eps),
    ];
    for (dtau, ds, dab) in offsets {
        let mut p = anchor.clone();
        p.x[0] += chart.direction * (dtau - 0.6 * eps * if dtau == 0.0 { 0.0 } else { 1.0 });
        p.y[0] += chart.direction * ds;
        p.x[1] += dab;
        let c = chart.to_tube(&p.x, &p.y);
        if !chart.outside_support(&c) {
            continue;
        }
        let q = push.apply(&p)?;
        fix_worst = fix_worst.max(q.dist(&p));
    }
    out.push(CheckEntry::residual_entry(
        "push.support.fixed-exactly",
        fix_worst,
        0.0,
        offsets.len(),
        0,
    ));

    // λ = 1 for the identity and a Reeb shift.
    let probe_pt = lift_family(0.6, 0.5, t, cfg.n);
    let probes = probe_directions(&probe_pt, 10, cfg.seed);
    let ident = |q: &ContactPoint| -> Result<ContactPoint> { Ok(q.clone()) };
    let vals = measure_lambda_all(&ident, &probe_pt, &probes)?;
    let mut lam_dev: f64 = vals.iter().map(|l| (l - 1.0).abs()).fold(0.0, f64::max);
    let reeb = |q: &ContactPoint| -> Result<ContactPoint> {
        let mut out = q.clone();
        out.z += 0.7;
        Ok(out)
    };
    let vals = measure_lambda_all(&reeb, &probe_pt, &probes)?;
    lam_dev = vals.iter().map(|l| (l - 1.0).abs()).fold(lam_dev, f64::max);
    out.push(CheckEntry::residual_entry(
        "push.lambda.identity-reeb",
        lam_dev,
        cfg.tol("lambda_dev"),
        2 * probes.len(),
        0,
    ));

    // λ and escape across the g_cap sweep at a core-disc point.
    let sweep = push_sweep(cfg, &[0.5 * cfg.g_cap, cfg.g_cap, 2.0 * cfg.g_cap], t)?;
    let mut lam_drop: f64 = 0.0;
    let mut escape_short: f64 = 0.0;
    let mut escape_nonmono: f64 = 0.0;
    let mut spread: f64 = 0.0;
    for w in sweep.windows(2) {
        lam_drop = lam_drop.max((w[0].lambda - w[1].lambda).max(0.0));
        escape_nonmono = escape_nonmono.max((w[0].escape - w[1].escape).max(0.0));
    }
    for row in &sweep {
        escape_short = escape_short.max((0.8 * row.g_cap - row.escape).max(0.0));
        spread = spread.max(row.lambda_spread);
    }
    out.push(CheckEntry::residual_entry(
        "push.lambda.monotone-nondecreasing",
        lam_drop,
        1e-9,
        sweep.len(),
        0,
    ));
    out.push(CheckEntry::residual_entry(
        "push.lambda.conformality-spread",
        spread,
        cfg.tol("lambda_dev"),
        sweep.len(),
        0,
    ));
    out.push(CheckEntry::residual_entry(
        "push.escape.at-least-0.8-gcap",
        escape_short,
        0.0,
        sweep.len(),
        0,
    ));
    out.push(CheckEntry::residual_entry(
        "push.escape.strictly-increasing",
        escape_nonmono,
        0.0,
        sweep.len(),
        0,
    ));
    Ok(out)
}

/// One row of the g_cap sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub g_cap: f64,
    pub lambda: f64,
    pub lambda_spread: f64,
    pub escape: f64,
}

/// λ and escape displacement of the push map at a core-disc point, per
/// g_cap value.
pub fn push_sweep(cfg: &RunConfig, g_values: &[f64], t: f64) -> Result<Vec<SweepRow>> {
    let anchor = core_anchor(cfg, t);
    let mut rows = Vec::new();
    for &g in g_values {
        let chart = EscapeChart::new(anchor.clone(), 1.0, cfg.push_eps, g)?;
        let push = PushMap::new(chart, g, 1e-3);
        let image = push.apply(&anchor)?;
        let escape = (image.x[0] - anchor.x[0]).abs();
        let probes = probe_directions(&anchor, 10, cfg.seed.wrapping_add(1));
        let map = |q: &ContactPoint| push.apply(q);
        let vals = measure_lambda_all(&map, &anchor, &probes)?;
        let lambda = vals.iter().sum::<f64>() / vals.len() as f64;
        let spread = vals
            .iter()
            .map(|v| (v - lambda).abs())
            .fold(0.0_f64, f64::max)
            / lambda.abs().max(1e-300);
        rows.push(SweepRow {
            g_cap: g,
            lambda,
            lambda_spread: spread,
            escape,
        });
    }
    Ok(rows)
}

/// Traced meshes of the study (scaled spacings) plus the production
/// mesh on the full v-range.
pub fn stage_cobordism(cfg: &RunConfig) -> Result<(Vec<CheckEntry>, MeshedLagrangian)> {
    let t0 = -cfg.t_half;
    let t1 = cfg.t_half;
    let jobs = cfg.effective_jobs();
    let make_lifted = || -> Result<crate::symplectization::CutoffLifted> {
        let family = IsotopyFamily::new(trace_patch_params(cfg, t0), t0, t1);
        lifted_hamiltonian(Box::new(family), cfg.t_band)
    };

    let mut entries = Vec::new();

    // Convergence study: all three grid spacings halve together on a
    // mid-band window where the surface is genuinely curved. The window
    // is smaller than the production span so the coarsest mesh already
    // sits in the asymptotic regime. Base resolutions derive from the
    // configured mesh (33 → 9/17/33 with 5/9/17 v-levels).
    let m0 = ((cfg.mesh - 1) / 4 + 1).max(3);
    let v0 = cfg.mesh_v.saturating_sub(2).max(3);
    let study = [(m0, v0), (2 * m0 - 1, 2 * v0 - 1), (4 * m0 - 3, 4 * v0 - 3)];
    let study_span = cfg.trace_span.min(1.2);
    let mut hs = Vec::new();
    let mut lag_res = Vec::new();
    let mut quad_res = Vec::new();
    let mut path_res = Vec::new();
    for (idx, &(res, nv)) in study.iter().enumerate() {
        let tc = TraceConfig {
            nu: res,
            nx: res,
            nv,
            u_range: (-study_span, study_span),
            x2_range: (-study_span, study_span),
            v_range: (-2.0, 2.0),
            step: cfg.flow_step,
            core_flag_sq: 1.5 * cfg.eps,
            strip_flag: 1.5 * cfg.eps,
            jobs,
        };
        let lifted = make_lifted()?;
        let mesh = trace_cobordism(t0, cfg.n, &lifted, &tc)?;
        let tangents = mesh_fd_tangents(&mesh);
        let lag = check_lagrangian(
            &format!("cobordism.lagrangian.res{idx}"),
            &mesh,
            &tangents,
            f64::INFINITY,
        );
        let quad = check_exact_quads(
            &format!("cobordism.exact.quads.res{idx}"),
            &mesh,
            &tangents,
            f64::INFINITY,
        );
        let path = check_path_independence(
            &format!("cobordism.exact.path-independence.res{idx}"),
            &mesh,
            &tangents,
            f64::INFINITY,
        );
        hs.push(2.0 * study_span / (res - 1) as f64);
        lag_res.push(lag.residual);
        quad_res.push(quad.residual);
        path_res.push(path.residual);
        entries.push(lag);
        entries.push(quad);
        entries.push(path);
    }
    entries.push(CheckEntry::order_bracket(
        "cobordism.lagrangian.order",
        &hs,
        &lag_res,
        cfg.tol("order_lo"),
        cfg.tol("order_hi"),
    ));
    // Quad loop sums superconverge (opposite-edge truncation errors
    // cancel beyond O(h²)), so they are held to the lower bound only;
    // path-independence accumulates per-quad truncation over O(h⁻²)
    // quads and converges at the theoretical O(h).
    entries.push(CheckEntry::order_at_least(
        "cobordism.exact.quads.order",
        &hs,
        &quad_res,
        cfg.tol("order_lo"),
    ));
    entries.push(CheckEntry::order_at_least(
        "cobordism.exact.path-independence.order",
        &hs,
        &path_res,
        cfg.tol("path_order_lo"),
    ));

    // Production mesh on the full v-range for ends and end-variance.
    let tc = TraceConfig {
        nu: cfg.mesh,
        nx: cfg.mesh,
        nv: cfg.mesh_v,
        u_range: (-cfg.trace_span, cfg.trace_span),
        x2_range: (-cfg.trace_span, cfg.trace_span),
        v_range: (cfg.v_min, cfg.v_max),
        step: cfg.flow_step,
        core_flag_sq: 1.5 * cfg.eps,
        strip_flag: 1.5 * cfg.eps,
        jobs,
    };
    let lifted = make_lifted()?;
    let mesh = trace_cobordism(t0, cfg.n, &lifted, &tc)?;
    let band = 3.0 * cfg.t_half;
    entries.push(check_end_variance(
        "cobordism.exact.f-variance.lower",
        &mesh,
        band,
        false,
        cfg.tol("variance"),
    ));
    entries.push(check_end_variance(
        "cobordism.exact.f-variance.upper",
        &mesh,
        band,
        true,
        cfg.tol("variance"),
    ));
    entries.push(check_ends(
        "cobordism.ends.lower",
        &mesh,
        t0,
        band,
        false,
        cfg.tol("ends"),
    ));
    entries.push(check_ends(
        "cobordism.ends.upper",
        &mesh,
        t1,
        band,
        true,
        cfg.tol("ends"),
    ));
    entries.push(check_truncation_validity(
        "cobordism.truncation-validity",
        &mesh,
        cfg.tol("truncation_fraction"),
    ));
    Ok((entries, mesh))
}

/// Negative-control entries (fail by construction; included only when
/// the config asks for them).
pub fn stage_controls(cfg: &RunConfig) -> Vec<CheckEntry> {
    let mut out = Vec::new();
    let samples =
        crate::verifier::perturbed_family_samples(0.7 * cfg.t_half, cfg.n, 12, 1e-3, cfg.seed);
    out.push(check_legendrian(
        "control.legendrian.perturbed-lift",
        &samples,
        cfg.tol("legendrian"),
    ));
    let graph = crate::verifier::nonclosed_graph_mesh(0.5, 9, 3);
    let tangents = mesh_fd_tangents(&graph);
    out.push(check_lagrangian(
        "control.lagrangian.nonclosed-graph",
        &graph,
        &tangents,
        cfg.tol("fd"),
    ));
    let lifted =
        lifted_hamiltonian(Box::new(crate::symplectization::ZeroFamily), 1.0).expect("t_band > 0");
    let tc = TraceConfig {
        nu: 9,
        nx: 9,
        nv: 5,
        u_range: (-1.0, 1.0),
        x2_range: (-1.0, 1.0),
        v_range: (-1.0, 1.0),
        step: 0.05,
        core_flag_sq: 0.0,
        strip_flag: 0.0,
        jobs: 1,
    };
    let cyl = trace_cobordism(0.5, cfg.n, &lifted, &tc).expect("cylinder trace");
    let sheared = crate::verifier::shear_mesh(&cyl, 0.1);
    let tangents = mesh_fd_tangents(&sheared);
    out.push(check_exact_quads(
        "control.exactness.sheared-mesh",
        &sheared,
        &tangents,
        cfg.tol("fd"),
    ));
    out
}

/// Full verification run.
pub fn run_verify(cfg: &RunConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let mut report = VerificationReport::new();
    report.add_meta("tool", "wcl");
    report.add_meta("seed", &cfg.seed.to_string());
    for (k, v) in cfg.meta_entries() {
        report.add_meta(&format!("config.{k}"), &v);
    }
    for e in stage_formula_identities(cfg) {
        report.push(e);
    }
    for e in stage_legendrian(cfg) {
        report.push(e);
    }
    for e in stage_transport(cfg)? {
        report.push(e);
    }
    for e in stage_push(cfg)? {
        report.push(e);
    }
    let (entries, _mesh) = stage_cobordism(cfg)?;
    for e in entries {
        report.push(e);
    }
    if cfg.negative_controls {
        for e in stage_controls(cfg) {
            report.push(e);
        }
    }
    Ok(report)
}

/// Trace the production mesh and export it.
pub fn run_trace(cfg: &RunConfig) -> Result<(MeshedLagrangian, String)> {
    cfg.validate()?;
    let t0 = -cfg.t_half;
    let family = IsotopyFamily::new(trace_patch_params(cfg, t0), t0, cfg.t_half);
    let lifted = lifted_hamiltonian(Box::new(family), cfg.t_band)?;
    let tc = TraceConfig {
        nu: cfg.mesh,
        nx: cfg.mesh,
        nv: cfg.mesh_v,
        u_range: (-cfg.trace_span, cfg.trace_span),
        x2_range: (-cfg.trace_span, cfg.trace_span),
        v_range: (cfg.v_min, cfg.v_max),
        step: cfg.flow_step,
        core_flag_sq: 1.5 * cfg.eps,
        strip_flag: 1.5 * cfg.eps,
        jobs: cfg.effective_jobs(),
    };
    let mesh = trace_cobordism(t0, cfg.n, &lifted, &tc)?;
    let text = mesh.export_text();
    Ok((mesh, text))
}

/// Render the configured figures: per-t front slices in each projection
/// plane plus the region diagram.
pub fn run_render(cfg: &RunConfig) -> Result<Vec<(String, String)>> {
    cfg.validate()?;
    let chart = WrinkleChart::new(0.0, cfg.n, cfg.t_half, -0.5 * cfg.t_half, 0.5 * cfg.t_half)?;
    let mut out = Vec::new();
    for &t in &cfg.render_ts {
        for &plane in &cfg.render_planes {
            let spec = RenderSpec {
                plane,
                ts: vec![t],
                resolution: cfg.render_resolution,
                slice: cfg.render_slice,
                overlays: crate::render::Overlays::default(),
                t_half: cfg.t_half,
            };
            let svg = render_front(&chart, &spec)?;
            out.push((front_filename(t, plane), svg));
        }
        let svg = render_regions(&patch_params(cfg, t), None, t)?;
        out.push((format!("regions_t{}.svg", fmt_region_t(t)), svg));
    }
    Ok(out)
}

fn fmt_region_t(t: f64) -> String {
    format!("{t:.3}").replace('-', "m")
}

/// Consolidated sweep over one parameter; returns the report table.
pub fn run_sweep(cfg: &RunConfig, parameter: &str, values: &[f64]) -> Result<String> {
    cfg.validate()?;
    if values.is_empty() {
        return Err(WclError::Config("sweep needs at least one value".into()));
    }
    let mut out = String::new();
    out.push_str(&format!("# wcl sweep parameter={parameter}\n"));
    match parameter {
        "g_cap" => {
            let rows = push_sweep(cfg, values, 0.5 * cfg.t_half)?;
            out.push_str("# columns: g_cap lambda lambda_spread escape\n");
            for r in &rows {
                out.push_str(&format!(
                    "g_cap={} lambda={} lambda_spread={} escape={}\n",
                    fmt_f64(r.g_cap),
                    fmt_f64(r.lambda),
                    fmt_f64(r.lambda_spread),
                    fmt_f64(r.escape)
                ));
            }
            let esc_mono = rows.windows(2).all(|w| w[1].escape > w[0].escape);
            let lam_mono = rows.windows(2).all(|w| w[1].lambda >= w[0].lambda - 1e-9);
            out.push_str(&format!(
                "flags escape_strictly_increasing={esc_mono} lambda_nondecreasing={lam_mono}\n"
            ));
        }
        "eps" | "delta" => {
            out.push_str(&format!("# columns: {parameter} restriction_residual\n"));
            for &v in values {
                let mut c = cfg.clone();
                if parameter == "eps" {
                    c.eps = v;
                } else {
                    c.delta = v;
                }
                let t = 0.5 * c.t_half;
                let params = patch_params(&c, t);
                let mut worst: f64 = 0.0;
                for &u in &linspace(-1.4, 1.4, 15) {
                    for &x2 in &linspace(-1.4, 1.4, 15) {
                        if u * u + x2 * x2 < 1.5 * c.eps {
                            continue;
                        }
                        let p = lift_family(u, x2, t, c.n);
                        let eval = crate::patch::h_ext(&p, t, &params, Some((u, x2)));
                        if eval.tag != crate::patch::RegionTag::Far {
                            worst = worst.max((eval.value - alpha_xt(u, x2, t)).abs());
                        }
                    }
                }
                out.push_str(&format!(
                    "{parameter}={} restriction_residual={}\n",
                    fmt_f64(v),
                    fmt_f64(worst)
                ));
            }
        }
        "mesh" => {
            out.push_str("# columns: mesh h lagrangian_residual\n");
            let mut hs = Vec::new();
            let mut rs = Vec::new();
            for &v in values {
                let res = v as usize;
                if res < 3 {
                    return Err(WclError::Config(format!("mesh value {v} too small")));
                }
                let t0 = -cfg.t_half;
                let family = IsotopyFamily::new(trace_patch_params(cfg, t0), t0, cfg.t_half);
                let lifted = lifted_hamiltonian(Box::new(family), cfg.t_band)?;
                let nv = (res / 2).max(3) | 1;
                let tc = TraceConfig {
                    nu: res,
                    nx: res,
                    nv,
                    u_range: (-cfg.trace_span, cfg.trace_span),
                    x2_range: (-cfg.trace_span, cfg.trace_span),
                    v_range: (-2.5, 2.5),
                    step: cfg.flow_step,
                    core_flag_sq: 1.5 * cfg.eps,
                    strip_flag: 1.5 * cfg.eps,
                    jobs: cfg.effective_jobs(),
                };
                let mesh = trace_cobordism(t0, cfg.n, &lifted, &tc)?;
                let tangents = mesh_fd_tangents(&mesh);
                let lag = check_lagrangian("sweep", &mesh, &tangents, f64::INFINITY);
                let h = 2.0 * cfg.trace_span / (res - 1) as f64;
                hs.push(h);
                rs.push(lag.residual);
                out.push_str(&format!(
                    "mesh={res} h={} lagrangian_residual={}\n",
                    fmt_f64(h),
                    fmt_f64(lag.residual)
                ));
            }
            if hs.len() >= 2 {
                if let Some(slope) = crate::util::loglog_slope(&hs, &rs) {
                    out.push_str(&format!("flags convergence_order={}\n", fmt_f64(slope)));
                }
            }
        }
        other => {
            return Err(WclError::Config(format!(
                "unknown sweep parameter {other} (expected g_cap | eps | delta | mesh)"
            )));
        }
    }
    Ok(out)
}

/// A quick escape-field sanity run used by the CLI and smoke tests: the
/// downstairs flow transports the tube core at unit rate.
pub fn push_core_transport_check(cfg: &RunConfig) -> Result<f64> {
    let t = 0.5 * cfg.t_half;
    let anchor = core_anchor(cfg, t);
    let chart = EscapeChart::new(anchor.clone(), 1.0, cfg.push_eps, cfg.g_cap)?;
    let duration = cfg.g_cap - 1.0;
    let (x1, _y1) = xg_flow(&chart, &anchor.x, &anchor.y, duration, 1e-3)?;
    Ok((x1[0] - anchor.x[0] - duration).abs())
}

/// G evaluated at the center of the escape tube (used by bindings).
pub fn g_at_center(cfg: &RunConfig) -> Result<f64> {
    let triple = CutoffTriple::new(cfg.push_eps)?;
    let coords = TubeCoords {
        tau: 0.5 * cfg.g_cap,
        s: 0.01 * cfg.push_eps,
        a: vec![0.0; cfg.n - 1],
        b: vec![0.0; cfg.n - 1],
    };
    Ok(crate::push::g_eval(&coords, &triple, cfg.g_cap))
}

/// The capped escape-time profile (used by bindings and the CLI).
pub fn escape_profile(cfg: &RunConfig) -> Result<EscapeProfile> {
    EscapeProfile::new(cfg.t_half, cfg.g_cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.mesh = 7;
        cfg.mesh_v = 5;
        cfg.flow_step = 0.02;
        cfg.jobs = 1;
        cfg
    }

    #[test]
    fn formula_stage_passes() {
        let cfg = RunConfig::default();
        let entries = stage_formula_identities(&cfg);
        for e in &entries {
            assert!(e.pass, "{} residual {}", e.name, e.residual);
        }
    }

    #[test]
    fn legendrian_stage_passes() {
        let cfg = RunConfig::default();
        for e in stage_legendrian(&cfg) {
            assert!(e.pass, "{} residual {}", e.name, e.residual);
        }
    }

    #[test]
    fn render_produces_expected_figure_count() {
        let cfg = RunConfig::default();
        let figs = run_render(&cfg).unwrap();
        // 3 t-values × (3 planes + 1 region diagram).
        assert_eq!(figs.len(), 12);
        assert!(figs.iter().any(|(n, _)| n == "front_t1.000_x1z.svg"));
        // Deterministic bytes.
        let figs2 = run_render(&cfg).unwrap();
        assert_eq!(figs, figs2);
    }

    #[test]
    fn sweep_rejects_unknown_parameter() {
        let cfg = tiny_config();
        assert!(run_sweep(&cfg, "nope", &[1.0]).is_err());
        assert!(run_sweep(&cfg, "g_cap", &[]).is_err());
    }

    #[test]
    fn single_value_sweep_is_one_row() {
        let mut cfg = tiny_config();
        cfg.g_cap = 3.0;
        let table = run_sweep(&cfg, "g_cap", &[3.0]).unwrap();
        let rows: Vec<&str> = table.lines().filter(|l| l.starts_with("g_cap=")).collect();
        assert_eq!(rows.len(), 1);
    }

    #[test]
    fn trace_exports_mesh_text() {
        let cfg = tiny_config();
        let (mesh, text) = run_trace(&cfg).unwrap();
        assert_eq!(mesh.nu(), 7);
        assert!(text.starts_with("# wcl mesh trace v1"));
        let rows = text.lines().filter(|l| !l.starts_with('#')).count();
        assert_eq!(rows, 7 * 7 * 5);
    }
}
