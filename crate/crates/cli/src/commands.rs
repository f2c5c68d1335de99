//! One function per subcommand; each writes its artifacts into the output directory.

use crate::config::{Command, RunConfig};
use crate::curve_arg::{curve_from_config, CurveArg};
use crate::error::{validation, CliResult};
use crate::export::{to_json_string, Cell, Table};
use crate::output::OutDir;
use bikegeo::bike_dynamics::*;
use bikegeo::correspondence::*;
use bikegeo::curves::*;
use bikegeo::diffpoly::{
    equal_mod_total_derivative, evaluate_on_curve, filament_integrands, monodromy_integrals, monodromy_integrands, q,
    qi, zn_series, DiffPoly, TotalDerivative,
};
use bikegeo::integrable::*;
use bikegeo::moebius_monodromy::*;
use nalgebra::{DVector, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::PathBuf;

/// Runs the configured command and returns the files it wrote.
pub fn dispatch(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    cfg.validate()?;
    let mut out = OutDir::create(&cfg.out)?;
    match cfg.command {
        Command::Simulate => simulate(cfg, &mut out)?,
        Command::Monodromy => monodromy(cfg, &mut out)?,
        Command::Planimeter => planimeter(cfg, &mut out)?,
        Command::Correspond => correspond(cfg, &mut out)?,
        Command::Zindler => zindler(cfg, &mut out)?,
        Command::Integrals => integrals(cfg, &mut out)?,
        Command::Akns => akns(cfg, &mut out)?,
        Command::Wegner => wegner(cfg, &mut out)?,
        Command::Rolling => rolling(cfg, &mut out)?,
        Command::Selftest => crate::selftest::run(cfg, &mut out)?,
    }
    Ok(out.written().to_vec())
}

fn table_name(cfg: &RunConfig, stem: &str) -> String {
    format!("{stem}.{}", cfg.format.extension())
}

/// e₁ for seed 0, otherwise a uniformly random unit vector drawn from the seed.
pub fn initial_direction(seed: u64, dim: usize) -> DVector<f64> {
    let mut r = DVector::zeros(dim);
    if seed == 0 {
        r[0] = 1.0;
        return r;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        for x in r.iter_mut() {
            *x = rng.gen_range(-1.0..1.0);
        }
        let n = r.norm();
        if n > 1e-3 && n <= 1.0 {
            return r / n;
        }
    }
}

fn time_range(front: &Curve) -> (f64, f64) {
    let t0 = front.t_start();
    (t0, front.period().map(|p| t0 + p).unwrap_or_else(|| front.t_end()))
}

fn steps_for(front: &Curve, cfg: &RunConfig) -> usize {
    (front.samples().len() - 1).max(cfg.samples)
}

fn ells_or(cfg: &RunConfig, default: &[f64]) -> Vec<f64> {
    if cfg.ell.is_empty() {
        default.to_vec()
    } else {
        cfg.ell.clone()
    }
}

fn vec_cells(v: &DVector<f64>) -> Vec<Cell> {
    v.iter().map(|x| Cell::Float(*x)).collect()
}

fn coord_columns(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("{prefix}{i}")).collect()
}

#[derive(Serialize)]
struct SimulateRow {
    ell: f64,
    r0: Vec<f64>,
    final_direction: Vec<f64>,
    rear_length: f64,
    max_norm_drift: f64,
    richardson_error: f64,
}

fn simulate(cfg: &RunConfig, out: &mut OutDir) -> CliResult<()> {
    let front = curve_from_config(cfg, "circle")?;
    let dim = front.dimension();
    let (t0, t1) = time_range(&front);
    let steps = steps_for(&front, cfg);
    let r0 = initial_direction(cfg.seed, dim);
    let mut cols = vec!["ell".to_string(), "t".to_string()];
    cols.extend(coord_columns("front_x", dim));
    cols.extend(coord_columns("rear_x", dim));
    cols.extend(coord_columns("r", dim));
    let mut table = Table::new(&cols);
    let mut report = Vec::new();
    for ell in ells_or(cfg, &[1.0]) {
        let traj = integrate_bicycle_sphere_steps(&front, ell, &r0, t0, t1, steps)?;
        for s in &traj.states {
            let mut row = vec![Cell::Float(ell), Cell::Float(s.t)];
            row.extend(vec_cells(&front.point(s.t)));
            row.extend(vec_cells(&traj.rear.point(s.t)));
            row.extend(vec_cells(&s.r));
            table.push(row)?;
        }
        let dirs = traj.directions();
        report.push(SimulateRow {
            ell,
            r0: r0.iter().copied().collect(),
            final_direction: traj.final_direction().iter().copied().collect(),
            rear_length: signed_rear_length(&front, &traj.times(), &dirs)?,
            max_norm_drift: traj.max_norm_drift,
            richardson_error: richardson_error(&front, ell, &r0, t0, t1, steps)?,
        });
    }
    out.write(&table_name(cfg, "simulate"), &table.render(cfg.format))?;
    out.write("simulate_report.json", &to_json_string(&report))?;
    Ok(())
}

fn monodromy(cfg: &RunConfig, out: &mut OutDir) -> CliResult<()> {
    let front = curve_from_config(cfg, "circle")?;
    if !front.closed() {
        return validation("monodromy needs a closed front");
    }
    let steps = steps_for(&front, cfg);
    let mut table = Table::new(&["ell", "class", "ambiguous", "trace_re", "trace_im", "fixed_points", "rear_length", "berry_area"]);
    let mut reports = Vec::new();
    for ell in ells_or(cfg, &[0.5, 1.0, 1.5]) {
        let rep = monodromy_report(&front, ell, steps)?;
        let class = serde_json::to_value(rep.class).unwrap().as_str().unwrap().to_string();
        table.push(vec![
            ell.into(),
            class.into(),
            rep.ambiguous.into(),
            rep.trace[0].into(),
            rep.trace[1].into(),
            rep.fixed_points.len().into(),
            rep.rear_length.unwrap_or(f64::NAN).into(),
            rep.berry_area.unwrap_or(f64::NAN).into(),
        ])?;
        reports.push(rep);
    }
    out.write(&table_name(cfg, "monodromy"), &table.render(cfg.format))?;
    out.write("monodromy_report.json", &to_json_string(&reports))?;
    Ok(())
}

#[derive(Serialize)]
struct PlanimeterOut {
    area_matrix: Vec<Vec<f64>>,
    axial: Option<[f64; 3]>,
    eps: Vec<f64>,
    errors: Vec<f64>,
    slope: f64,
    hatchet_area: Option<f64>,
    hatchet_slope: Option<f64>,
    birds_eye_slope: Option<f64>,
}

fn planimeter(cfg: &RunConfig, out: &mut OutDir) -> CliResult<()> {
    let front = curve_from_config(cfg, "circle")?;
    if !front.closed() {
        return validation("planimeter needs a closed front");
    }
    let eps = cfg.eps_or_sweep();
    let r0 = initial_direction(cfg.seed, front.dimension());
    let steps = 4 * cfg.samples;
    let rep = planimeter_check(&front, &eps, &r0, steps)?;
    let birds = if front.dimension() == 2 { Some(birds_eye_check(&front, &eps, steps / 2)?) } else { None };
    let mut table = Table::new(&["eps", "planimeter_error", "hatchet_error", "birds_eye_area", "birds_eye_omega", "birds_eye_error"]);
    for (i, e) in eps.iter().enumerate() {
        let nan = f64::NAN;
        table.push(vec![
            (*e).into(),
            rep.errors[i].into(),
            rep.hatchet.as_ref().map(|h| h.errors[i]).unwrap_or(nan).into(),
            birds.as_ref().map(|b| b.planar_area[i]).unwrap_or(nan).into(),
            birds.as_ref().map(|b| b.omega[i]).unwrap_or(nan).into(),
            birds.as_ref().map(|b| b.errors[i]).unwrap_or(nan).into(),
        ])?;
    }
    let m = &rep.area.matrix;
    let summary = PlanimeterOut {
        area_matrix: (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect(),
        axial: rep.area.axial,
        eps: rep.eps.clone(),
        errors: rep.errors.clone(),
        slope: rep.slope,
        hatchet_area: rep.hatchet.as_ref().map(|h| h.area),
        hatchet_slope: rep.hatchet.as_ref().map(|h| h.slope),
        birds_eye_slope: birds.as_ref().map(|b| b.slope),
    };
    out.write(&table_name(cfg, "planimeter"), &table.render(cfg.format))?;
    out.write("planimeter_report.json", &to_json_string(&summary))?;
    Ok(())
}

#[derive(Serialize)]
struct BianchiOut {
    ell: [f64; 2],
    ad: CorrespondenceResiduals,
    cd: CorrespondenceResiduals,
    max_coplanarity: f64,
    degenerate_samples: usize,
}

fn correspond(cfg: &RunConfig, out: &mut OutDir) -> CliResult<()> {
    let front = curve_from_config(cfg, "circle")?;
    let ells = ells_or(cfg, &[ell_kn(1, 2)]);
    if ells.len() > 2 {
        return validation("correspond takes one or two --ell values");
    }
    let r0 = initial_direction(cfg.seed, front.dimension());
    let steps = 4 * steps_for(&front, cfg);
    let mut table = Table::new(&["ell", "chord", "tangency", "glide", "partner_closed", "front_length", "partner_length", "within_tol"]);
    let mut partners = Vec::new();
    for (i, &ell) in ells.iter().enumerate() {
        let p = bicycle_partner_steps(&front, ell, &r0, steps)?;
        let res = verify_correspondence(&front, &p, 2.0 * ell)?;
        table.push(vec![
            ell.into(),
            res.chord.into(),
            res.tangency.into(),
            res.glide.into(),
            p.closed().into(),
            front.length().into(),
            p.length().into(),
            (res.max() <= cfg.tol).into(),
        ])?;
        out.write(&format!("correspond_partner_{}.csv", i + 1), &curve_to_csv(&p))?;
        partners.push(p);
    }
    out.write(&table_name(cfg, "correspond"), &table.render(cfg.format))?;
    if partners.len() == 2 {
        let b = bianchi_check(&partners[0], &front, &partners[1], 2.0 * ells[0], 2.0 * ells[1])?;
        let rep = BianchiOut {
            ell: [ells[0], ells[1]],
            ad: b.ad,
            cd: b.cd,
            max_coplanarity: b.max_coplanarity,
            degenerate_samples: b.degenerate.len(),
        };
        out.write("correspond_bianchi.json", &to_json_string(&rep))?;
        out.write("correspond_bianchi_curve.csv", &curve_to_csv(&b.d))?;
    }
    if !cfg.lambda.is_empty() {
        let mut t = Table::new(&["partner", "lambda", "trace_front", "trace_partner", "sl2_trace_front", "sl2_trace_partner", "rel_error"]);
        for (i, p) in partners.iter().enumerate() {
            if !(front.closed() && p.closed()) {
                continue;
            }
            for row in monodromy_conjugacy_check(&front, p, &cfg.lambda, 4 * steps)? {
                t.push(vec![
                    (i + 1).into(),
                    row.lambda.into(),
                    row.trace1.into(),
                    row.trace2.into(),
                    row.sl2_trace1.unwrap_or(f64::NAN).into(),
                    row.sl2_trace2.unwrap_or(f64::NAN).into(),
                    row.rel_error.into(),
                ])?;
            }
        }
        out.write(&table_name(cfg, "correspond_conjugacy"), &t.render(cfg.format))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ZindlerOut {
    k: u32,
    n: u32,
    ell: f64,
    length: f64,
    rotation_numbers: Vec<f64>,
    certificates: Vec<ZindlerCertificate>,
}

fn zindler(cfg: &RunConfig, out: &mut OutDir) -> CliResult<()> {
    match (cfg.k, cfg.n) {
        (Some(k), Some(n)) => {
            let g = gamma_kn(k, n, cfg.samples * n as usize)?;
            let tol = ZindlerTolerance { chord: cfg.tol, tangency: cfg.tol };
            let rhos = rotation_numbers(k, n);
            let mut table = Table::new(&["k", "n", "rho", "tan2_pi_rho", "residual", "chord_deviation", "tangency_residual", "passed"]);
            let mut certs = Vec::new();
            for &rho in &rhos {
                let cert = zindler_verify(&g, rho, &tol)?;
                table.push(vec![
                    k.into(),
                    n.into(),
                    rho.into(),
                    (PI * rho).tan().powi(2).into(),
                    rotation_residual(k, n, rho).into(),
                    cert.chord_deviation.into(),
                    cert.tangency_residual.into(),
                    cert.passed.into(),
                ])?;
                certs.push(cert);
            }
            let rep = ZindlerOut { k, n, ell: ell_kn(k, n), length: g.length(), rotation_numbers: rhos, certificates: certs };
            out.write(&table_name(cfg, "zindler"), &table.render(cfg.format))?;
            out.write("zindler_report.json", &to_json_string(&rep))?;
        }
        (None, None) | (None, Some(_)) => {
            let n_max = cfg.n.unwrap_or(7);
            let mut table = Table::new(&["k", "n", "index", "rho"]);
            for n in 2..=n_max {
                for k in 1..n {
                    if crate::config::gcd(k, n) != 1 {
                        continue;
                    }
                    for (i, rho) in rotation_numbers(k, n).into_iter().enumerate() {
                        table.push(vec![k.into(), n.into(), (i + 1).into(), rho.into()])?;
                    }
                }
            }
            out.write(&table_name(cfg, "zindler_table"), &table.render(cfg.format))?;
        }
        (Some(_), None) => return validation("--k needs --n"),
    }
    Ok(())
}

#[derive(Serialize)]
struct PolyOut {
    index: usize,
    text: String,
    terms: Vec<bikegeo::diffpoly::TermRecord>,
}

fn poly_out(index: usize, p: &DiffPoly) -> PolyOut {
    PolyOut { index, text: p.to_string(), terms: p.to_terms() }
}

#[derive(Serialize)]
struct FilamentOut {
    index: usize,
    experimental: bool,
    text: String,
    terms: Vec<bikegeo::diffpoly::TermRecord>,
}

#[derive(Serialize)]
struct RelationOut {
    relation: String,
    holds: bool,
    witness: Option<String>,
}

#[derive(Serialize)]
struct IntegralsOut {
    z: Vec<PolyOut>,
    integrands: Vec<PolyOut>,
    normal_forms: Vec<PolyOut>,
    filament: Vec<FilamentOut>,
    relations: Vec<RelationOut>,
    parity: Vec<RelationOut>,
}

fn relation(name: &str, r: TotalDerivative) -> RelationOut {
    match r {
        TotalDerivative::Equal { witness } => RelationOut { relation: name.into(), holds: true, witness: Some(witness.to_string()) },
        TotalDerivative::NotEqual => RelationOut { relation: name.into(), holds: false, witness: None },
        TotalDerivative::Inconclusive { weight } => {
            RelationOut { relation: format!("{name} (inconclusive at weight {weight})"), holds: false, witness: None }
        }
    }
}

/// Relations between monodromy integrands and filament densities.
pub fn identity_chain() -> Vec<(String, TotalDerivative)> {
    let i = monodromy_integrands(4);
    let f = filament_integrands(5);
    let exact = |a: &DiffPoly, b: &DiffPoly| {
        if a == b {
            TotalDerivative::Equal { witness: DiffPoly::zero() }
        } else {
            TotalDerivative::NotEqual
        }
    };
    vec![
        ("I0 = F1".into(), exact(&i[0], &f[0].density)),
        ("I1 = -i F2".into(), exact(&i[1], &f[1].density.scale(&qi(-1, 1)))),
        ("I2 = -1/2 F3".into(), exact(&i[2], &f[2].density.scale(&q(-1, 2)))),
        ("I3 = -i/2 F4 mod d/dt".into(), equal_mod_total_derivative(&i[3], &f[3].density.scale(&qi(-1, 2)))),
        ("I4 = 1/2 F5 mod d/dt".into(), equal_mod_total_derivative(&i[4], &f[4].density.scale(&q(1, 2)))),
    ]
}

fn integrals(cfg: &RunConfig, out: &mut OutDir) -> CliResult<()> {
    let n = cfg.n.map(|n| n as usize).unwrap_or(4);
    let z = zn_series(n);
    let ints = monodromy_integrands(n);
    let nfs = monodromy_integrals(n);
    let fil = filament_integrands(n + 1);
    let mut text = String::new();
    for (j, p) in z.iter().enumerate() {
        text.push_str(&format!("Z{j} = {p}\n"));
    }
    for (j, (p, nf)) in ints.iter().zip(&nfs).enumerate() {
        text.push_str(&format!("I{j} = {p}    ~ {nf}\n"));
    }
    for f in &fil {
        let tag = if f.experimental { "  (experimental)" } else { "" };
        text.push_str(&format!("F{} = {}{tag}\n", f.index, f.density));
    }
    let relations: Vec<RelationOut> = identity_chain().into_iter().map(|(n, r)| relation(&n, r)).collect();
    for r in &relations {
        text.push_str(&format!("{}: {}{}\n", r.relation, if r.holds { "holds" } else { "fails" }, r.witness.as_ref().map(|w| format!(", witness {w}")).unwrap_or_default()));
    }
    let parity = nfs
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let (want, holds) = if j % 2 == 0 { ("real", p.is_real()) } else { ("imaginary", p.is_imaginary()) };
            RelationOut { relation: format!("I{j} {want}"), holds, witness: None }
        })
        .collect();
    let rep = IntegralsOut {
        z: z.iter().enumerate().map(|(j, p)| poly_out(j, p)).collect(),
        integrands: ints.iter().enumerate().map(|(j, p)| poly_out(j, p)).collect(),
        normal_forms: nfs.iter().enumerate().map(|(j, p)| poly_out(j, p)).collect(),
        filament: fil
            .iter()
            .map(|f| FilamentOut { index: f.index, experimental: f.experimental, text: f.density.to_string(), terms: f.density.to_terms() })
            .collect(),
        relations,
        parity,
    };
    out.write("integrals.txt", &text)?;
    out.write("integrals_terms.json", &to_json_string(&rep))?;
    if cfg.curve.is_some() || cfg.curve_file.is_some() {
        let c = curve_from_config(cfg, "circle")?;
        if !c.closed() {
            return validation("numerical integrals need a closed curve");
        }
        let c = resample_arclength(&c, cfg.samples)?;
        let c = if c.dimension() < 3 { embed(&c, 3)? } else { c };
        let fd = frenet_data(&c)?;
        let degree = n.min(4);
        let taylor = ell_log_taylor(&c, 0.2, 14, degree)?;
        let mut table = Table::new(&["n", "integral_re", "integral_im", "taylor_re", "taylor_im", "abs_error"]);
        for (j, p) in ints.iter().enumerate().take(degree + 1) {
            let v = evaluate_on_curve(p, &fd)?;
            table.push(vec![j.into(), v.re.into(), v.im.into(), taylor[j].re.into(), taylor[j].im.into(), (v - taylor[j]).norm().into()])?;
        }
        out.write(&table_name(cfg, "integrals_numeric"), &table.render(cfg.format))?;
        if !cfg.ell.is_empty() {
            let mut t = Table::new(&["ell", "ell_log_re", "ell_log_im", "series_re", "series_im", "periodicity_residual", "contraction"]);
            for &ell in &cfg.ell {
                let u = find_unstable_periodic(&c, ell, None)?;
                let series = taylor.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * ell + a);
                let v = u.ell_log(ell);
                t.push(vec![ell.into(), v.re.into(), v.im.into(), series.re.into(), series.im.into(), u.periodicity_residual.into(), u.contraction.into()])?;
            }
            out.write(&table_name(cfg, "integrals_unstable"), &t.render(cfg.format))?;
        }
    }
    Ok(())
}

fn akns(cfg: &RunConfig, out: &mut OutDir) -> CliResult<()> {
    let (pot, t0, t1) = if cfg.curve.is_some() || cfg.curve_file.is_some() {
        let c = curve_from_config(cfg, "helix")?;
        if c.dimension() != 3 {
            return validation("akns needs a curve in R³");
        }
        let c = resample_arclength(&c, cfg.samples)?;
        let (a, b) = (c.t_start(), c.t_end());
        (q_from_curve(&c)?, a, b)
    } else {
        (Potential::Constant(Complex64::new(0.5, 0.0)), 0.0, 2.0 * PI)
    };
    let lambdas = if cfg.lambda.is_empty() { vec![0.0] } else { cfg.lambda.clone() };
    let eps = if cfg.eps.is_empty() { vec![1.0] } else { cfg.eps.clone() };
    let steps = 4 * cfg.samples;
    let v0 = Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let mut table = Table::new(&["lambda", "mu_re", "mu_im", "expected_distance", "distance_residual", "chord", "tangency", "glide", "akns_residual"]);
    let mut reports = Vec::new();
    for &lam in &lambdas {
        for &e in &eps {
            let mu = Complex64::new(0.0, e);
            let d = darboux_transform(&pot, lam, mu, v0, t0, t1, steps)?;
            let res = verify_correspondence(&d.gamma, &d.gamma_tilde, d.expected_distance)?;
            table.push(vec![
                lam.into(),
                mu.re.into(),
                mu.im.into(),
                d.expected_distance.into(),
                d.distance_residual.into(),
                res.chord.into(),
                res.tangency.into(),
                res.glide.into(),
                d.akns_residual.into(),
            ])?;
            reports.push(AknsReport { lambda: lam, mu: [mu.re, mu.im], distance_law_residual: d.distance_residual, correspondence_residuals: res });
        }
    }
    out.write(&table_name(cfg, "akns"), &table.render(cfg.format))?;
    out.write("akns_report.json", &to_json_string(&reports))?;
    Ok(())
}

#[derive(Serialize)]
struct WegnerOut {
    params: WegnerParams,
    init: WegnerInit,
    lambda_el: f64,
    mu_el: f64,
    length: f64,
    samples: usize,
    meta: CurveMeta,
}

#[derive(Serialize)]
struct WegnerReport {
    curvature_residual: f64,
    relation_residual: f64,
    buckled_ring_residual: f64,
    filament_dt: f64,
    filament_shift: f64,
    filament_mismatch: f64,
    filament_unshifted: f64,
}

fn wegner(cfg: &RunConfig, out: &mut OutDir) -> CliResult<()> {
    let arg = CurveArg::parse(cfg.curve.as_deref().unwrap_or("wegner-circular"))?;
    let spec = arg.spec(cfg)?;
    let (params, init, length) = match spec {
        CurveSpec::WegnerLinear { a, b, length } => (WegnerParams::linear(a, b), WegnerInit::default(), length),
        CurveSpec::WegnerCircular { a, b, c, r0, length } => {
            (WegnerParams::circular(a, b, c), WegnerInit { r0, ..WegnerInit::default() }, length)
        }
        _ => return validation("wegner needs --curve wegner-linear or wegner-circular"),
    };
    let curve = wegner_curve(&params, &init, length, cfg.samples)?;
    let dt = cfg.eps.first().copied().unwrap_or(1e-3);
    let fit = filament_soliton_check(&curve, dt)?;
    let rep = WegnerReport {
        curvature_residual: wegner_curvature_residual(&curve, &params)?,
        relation_residual: wegner_relation_residual(&curve),
        buckled_ring_residual: buckled_ring_residual(&curve, params.lambda_el(), params.mu_el())?,
        filament_dt: dt,
        filament_shift: fit.shift,
        filament_mismatch: fit.mismatch,
        filament_unshifted: fit.unshifted,
    };
    let side = WegnerOut {
        params,
        init,
        lambda_el: params.lambda_el(),
        mu_el: params.mu_el(),
        length,
        samples: cfg.samples,
        meta: curve.metadata(),
    };
    let prof = curvature_profile(&curve, 2)?;
    let mut table = Table::new(&["s", "x", "y", "kappa", "kappa_predicted", "el_residual"]);
    for (i, s) in curve.samples().iter().enumerate() {
        let k = prof[0][i];
        let el = prof[2][i] + 0.5 * k * k * k + params.lambda_el() * k - params.mu_el();
        table.push(vec![s.t.into(), s.point[0].into(), s.point[1].into(), k.into(), params.predicted_curvature(&s.point).into(), el.into()])?;
    }
    out.write("wegner_curve.csv", &curve_to_csv(&curve))?;
    out.write("wegner_curve.csv.json", &to_json_string(&curve.metadata()))?;
    out.write("wegner_params.json", &to_json_string(&side))?;
    out.write("wegner_report.json", &to_json_string(&rep))?;
    out.write(&table_name(cfg, "wegner_profile"), &table.render(cfg.format))?;
    Ok(())
}

fn rolling(cfg: &RunConfig, out: &mut OutDir) -> CliResult<()> {
    let front = curve_from_config(cfg, "circle")?;
    let (t0, t1) = time_range(&front);
    let steps = 2 * steps_for(&front, cfg);
    let mut table = Table::new(&["ell", "lift_difference", "j_residual", "front_length", "body_length", "length_difference", "orthogonality_residual"]);
    for (i, ell) in ells_or(cfg, &[1.0]).into_iter().enumerate() {
        let a = roll_hyperbolic(&front, ell, t0, t1, steps)?;
        let b = lorentz_lift_steps(&front, ell, t0, t1, steps)?;
        let sphere = roll_sphere(&front, ell, t0, t1, steps)?;
        let fl = front.length();
        let bl = sphere.body_track.length();
        table.push(vec![
            ell.into(),
            (&a.m - &b.m).amax().into(),
            a.j_residual().into(),
            fl.into(),
            bl.into(),
            (bl - fl).abs().into(),
            sphere.orthogonality_residual.into(),
        ])?;
        out.write(&format!("rolling_body_track_{}.csv", i + 1), &curve_to_csv(&sphere.body_track))?;
    }
    out.write(&table_name(cfg, "rolling"), &table.render(cfg.format))?;
    Ok(())
}
