use crate::emit::{fmt_f, Table};
use crate::grid::{parse_grid, parse_int_range, parse_list_f64, parse_list_i64};
use crate::*;
use anyhow::{bail, Result};
use num_complex::Complex64;
use oppenheim_core::diophantine::{self, MajorantVariant, QualityMode};
use oppenheim_core::kloosterman::{self, KloostermanQuery};
use oppenheim_core::numtheory::SplitReal;
use oppenheim_core::oppenheim::{self as opp, CountMethod, CountQuery, ShiftVector};
use oppenheim_core::sl2geom::{self, IntMat2, OrbitClass};
use oppenheim_core::theta::{GaussianProfile, WindowGaussian};
use std::f64::consts::PI;
use std::path::Path;

/// Tolerance for the Kloosterman identities checked by `--verify-mult`.
const KLOOSTERMAN_TOL: f64 = 1e-9;

pub fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Kloosterman(_) => "kloosterman",
        Command::Delta(_) => "delta",
        Command::Dioph(_) => "dioph",
        Command::CfSum(_) => "cf-sum",
        Command::Orbit(_) => "orbit",
        Command::ThetaId(_) => "theta-id",
        Command::Equidist(_) => "equidist",
        Command::Count(_) => "count",
        Command::Paircorr(_) => "paircorr",
        Command::Spectrum(_) => "spectrum",
        Command::WeilAudit(_) => "weil-audit",
        Command::BAlpha(_) => "b-alpha",
        Command::Replay { .. } => "replay",
    }
}

pub fn execute(cmd: &Command, out: Option<&Path>) -> Result<()> {
    match cmd {
        Command::Kloosterman(a) => kloosterman_cmd(a, out),
        Command::Delta(a) => delta_cmd(a, out),
        Command::Dioph(a) => dioph_cmd(a, out),
        Command::CfSum(a) => cf_sum_cmd(a, out),
        Command::Orbit(a) => orbit_cmd(a, out),
        Command::ThetaId(a) => theta_id_cmd(a, out),
        Command::Equidist(a) => equidist_cmd(a, out),
        Command::Count(a) => count_cmd(a, out),
        Command::Paircorr(a) => paircorr_cmd(a, out),
        Command::Spectrum(a) => spectrum_cmd(a, out),
        Command::WeilAudit(a) => weil_cmd(a, out),
        Command::BAlpha(a) => b_alpha_cmd(a, out),
        Command::Replay { .. } => unreachable!("replay is resolved before dispatch"),
    }
}

fn opt_f(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(";")
}

fn kloosterman_cmd(a: &KloostermanArgs, out: Option<&Path>) -> Result<()> {
    let (lo, hi) = parse_int_range(&a.mn_range)?;
    let n_mod = a.modulus;
    let mut t = Table::create(
        out,
        &["c", "N", "Ra", "Rb", "Rc", "Rd", "m", "n", "re", "im", "abs", "mult_max_err", "closed_form_err"],
    )?;
    let mut failed = 0usize;
    let mut checks = 0usize;
    for c in 1..=a.c_max {
        let splits = if a.verify_mult { kloosterman::coprime_splits(c * n_mod)? } else { Vec::new() };
        for r in kloosterman::classes_mod(c, n_mod) {
            let u = kloosterman::u_set(c, n_mod, r.a, r.b, r.d)?;
            for m in lo..=hi {
                for n in lo..=hi {
                    let s = kloosterman::sum_over(&u, m, n);
                    let mut mult = None;
                    let mut closed = None;
                    if a.verify_mult {
                        let q = KloostermanQuery::new(m, n, c, r, n_mod)?;
                        let mut worst: f64 = 0.0;
                        for &(m1, m2) in &splits {
                            worst = worst.max((s - kloosterman::multiplicativity_rhs(&q, m1, m2)?).norm());
                        }
                        checks += 1;
                        if worst >= KLOOSTERMAN_TOL {
                            failed += 1;
                        }
                        mult = Some(worst);
                        if n == 0 {
                            let cf = kloosterman::n0_closed_form(m, c, &r, n_mod)?;
                            let err = (cf - s).norm();
                            let gcd = num_gcd(c, m.unsigned_abs());
                            checks += 1;
                            if err >= KLOOSTERMAN_TOL || s.norm() > gcd as f64 + KLOOSTERMAN_TOL {
                                failed += 1;
                            }
                            closed = Some(err);
                        }
                    }
                    t.row([
                        c.to_string(),
                        n_mod.to_string(),
                        r.a.to_string(),
                        r.b.to_string(),
                        r.c.to_string(),
                        r.d.to_string(),
                        m.to_string(),
                        n.to_string(),
                        fmt_f(s.re),
                        fmt_f(s.im),
                        fmt_f(s.norm()),
                        opt_f(mult),
                        opt_f(closed),
                    ])?;
                }
            }
        }
    }
    t.finish()?;
    if a.verify_mult {
        eprintln!("kloosterman: {checks} checks, {failed} failed");
        if failed > 0 {
            bail!("{failed} of {checks} Kloosterman checks exceeded {KLOOSTERMAN_TOL:e}");
        }
    }
    Ok(())
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

fn split_reals(s: &str) -> Result<Vec<SplitReal>> {
    Ok(parse_list_f64(s)?.into_iter().map(SplitReal::from_f64).collect())
}

fn delta_cmd(a: &DeltaArgs, out: Option<&Path>) -> Result<()> {
    let xi = split_reals(&a.xi)?;
    let variant = match a.variant {
        Variant::Full => MajorantVariant::Full,
        Variant::Tilde => MajorantVariant::Tilde,
    };
    let mut t = Table::create(out, &["T", "value", "tail_bound", "upper", "r_cut", "j_cut"])?;
    for tt in parse_grid(&a.t)? {
        let r = diophantine::delta_majorant(a.beta, &xi, tt, a.tol, variant)?;
        t.row([
            fmt_f(tt),
            fmt_f(r.value),
            fmt_f(r.tail_bound),
            fmt_f(r.upper()),
            r.r_cut.to_string(),
            r.j_cut.to_string(),
        ])?;
    }
    t.finish()?;
    Ok(())
}

fn dioph_cmd(a: &DiophArgs, out: Option<&Path>) -> Result<()> {
    let xi = split_reals(&a.xi)?;
    let mode = match a.mode {
        Mode::Dioph => QualityMode::KappaDioph,
        Mode::Lfd => QualityMode::KappaLfd,
        Mode::AlphaLfd => QualityMode::KappaAlphaLfd,
    };
    let r = diophantine::dioph_quality(mode, &xi, a.kappa, a.alpha, a.bound)?;
    let mut t = Table::create(
        out,
        &["mode", "kappa", "alpha", "bound", "min_quality", "witness_scalar", "witness_vector", "obstructed"],
    )?;
    t.row([
        format!("{:?}", r.mode),
        fmt_f(r.kappa),
        opt_f(r.alpha),
        r.search_bound.to_string(),
        fmt_f(r.min_quality),
        r.witness.0.to_string(),
        join(&r.witness.1),
        r.obstructed.to_string(),
    ])?;
    t.finish()?;
    Ok(())
}

fn cf_sum_cmd(a: &CfSumArgs, out: Option<&Path>) -> Result<()> {
    let eta = SplitReal::from_f64(a.eta);
    let mut t = Table::create(out, &["T", "lhs", "tail", "j_cut", "bound", "ratio", "violation"])?;
    for tt in parse_grid(&a.t)? {
        let r = diophantine::cf_sum(eta, tt, a.kappa, a.c)?;
        t.row([
            fmt_f(tt),
            fmt_f(r.lhs),
            fmt_f(r.tail),
            r.j_cut.to_string(),
            fmt_f(r.bound),
            fmt_f(r.ratio),
            r.violation.map(|j| j.to_string()).unwrap_or_default(),
        ])?;
    }
    t.finish()?;
    Ok(())
}

fn orbit_cmd(a: &OrbitArgs, out: Option<&Path>) -> Result<()> {
    if a.k == 0 || a.bound < 0 {
        bail!("need k ≥ 1 and bound ≥ 0");
    }
    let width = (2 * a.bound + 1) as u64;
    let total = width.checked_pow(2 * a.k as u32).filter(|&n| n <= 10_000_000);
    let Some(total) = total else {
        return Err(oppenheim_core::Error::Budget { what: "orbit box".into(), achieved: (width as f64).powi(2 * a.k as i32) }.into());
    };
    let mut t = Table::create(
        out,
        &["q", "r", "class", "l1", "l2", "rep_q", "rep_r", "transform", "canonical_ok"],
    )?;
    let mut v = vec![0i64; 2 * a.k];
    for idx in 0..total {
        let mut rest = idx;
        for x in v.iter_mut() {
            *x = (rest % width) as i64 - a.bound;
            rest /= width;
        }
        let (q, r) = v.split_at(a.k);
        let class = sl2geom::classify_orbit(q, r)?;
        let mut fields = vec![join(q), join(r), format!("{class:?}")];
        if class == OrbitClass::B && a.k >= 2 {
            let rep = sl2geom::canonical_b_rep(q, r)?;
            let (tq, tr) = rep.transform.act(q, r);
            let ok = sl2geom::is_canonical_b(&rep) && tq == rep.rep.q && tr == rep.rep.r;
            let m = rep.transform;
            fields.extend([
                rep.l1.to_string(),
                rep.l2.to_string(),
                join(&rep.rep.q),
                join(&rep.rep.r),
                join(&[m.a, m.b, m.c, m.d]),
                ok.to_string(),
            ]);
        } else {
            fields.extend(std::iter::repeat(String::new()).take(6));
        }
        t.row(fields)?;
    }
    t.finish()?;
    Ok(())
}

fn profiles(p: &Profiles) -> Result<(GaussianProfile, GaussianProfile, WindowGaussian, ShiftVector)> {
    Ok((
        GaussianProfile::new(2, p.wf)?,
        GaussianProfile::new(2, p.wg)?,
        WindowGaussian::new(p.h_scale, p.h_center)?,
        ShiftVector::new(p.alpha, p.beta)?,
    ))
}

fn theta_id_cmd(a: &ThetaIdArgs, out: Option<&Path>) -> Result<()> {
    let (f, g, h, s) = profiles(&a.p)?;
    let mut t = Table::create(out, &["T", "lhs", "rhs", "abs_diff", "lhs_bound", "rhs_bound", "u_nodes"])?;
    for tt in parse_grid(&a.t)? {
        let r = opp::theta_identity_check(&f, &g, &h, tt, &s, a.p.tol)?;
        t.row([
            fmt_f(tt),
            fmt_f(r.lhs),
            fmt_f(r.rhs),
            fmt_f(r.diff),
            fmt_f(r.lhs_bound),
            fmt_f(r.rhs_bound),
            r.u_nodes.to_string(),
        ])?;
    }
    t.finish()?;
    Ok(())
}

fn equidist_cmd(a: &EquidistArgs, out: Option<&Path>) -> Result<()> {
    let (f, g, h, s) = profiles(&a.p)?;
    let grid = parse_grid(&a.v)?;
    let rows = opp::equidist_experiment(&f, &g, &h, &s, &grid, a.p.tol)?;
    let mut t = Table::create(
        out,
        &["v", "lhs", "main_term", "second_term", "residual", "relative_residual", "lhs_bound"],
    )?;
    for r in rows {
        t.row([
            fmt_f(r.v),
            fmt_f(r.lhs),
            fmt_f(r.main_term),
            fmt_f(r.second_term),
            fmt_f(r.residual),
            fmt_f(r.residual / (r.main_term.abs() + r.second_term.abs())),
            fmt_f(r.lhs_bound),
        ])?;
    }
    t.finish()?;
    Ok(())
}

fn count_cmd(a: &CountArgs, out: Option<&Path>) -> Result<()> {
    let s = ShiftVector::new(a.alpha, a.beta)?;
    let method = match a.method {
        Method::Brute => CountMethod::Brute,
        Method::Fenwick => CountMethod::Fenwick,
    };
    let target = PI * PI / 2.0 * (a.b - a.a);
    let mut t = Table::create(out, &["T", "N", "target", "abs_err", "count"])?;
    for tt in parse_grid(&a.t)? {
        let r = opp::count_window(&s, &CountQuery::new(a.a, a.b, tt)?, method)?;
        t.row([
            fmt_f(tt),
            fmt_f(r.normalized),
            fmt_f(target),
            fmt_f((r.normalized - target).abs()),
            r.count.to_string(),
        ])?;
    }
    t.finish()?;
    Ok(())
}

fn paircorr_cmd(a: &PaircorrArgs, out: Option<&Path>) -> Result<()> {
    let s = ShiftVector::new(a.alpha, a.beta)?;
    let target = PI * (a.b - a.a);
    let mut t = Table::create(out, &["Lambda", "R2", "target", "abs_err"])?;
    for l in parse_grid(&a.lambda)? {
        let r = opp::pair_correlation(&s, a.a, a.b, l)?;
        t.row([fmt_f(l), fmt_f(r), fmt_f(target), fmt_f((r - target).abs())])?;
    }
    t.finish()?;
    Ok(())
}

fn spectrum_cmd(a: &SpectrumArgs, out: Option<&Path>) -> Result<()> {
    let s = opp::spectrum(&ShiftVector::new(a.alpha, a.beta)?, a.lambda)?;
    let mut t = Table::create(out, &["index", "value"])?;
    for (i, v) in s.values.iter().enumerate() {
        t.row([(i + 1).to_string(), fmt_f(*v)])?;
    }
    t.finish()?;
    Ok(())
}

fn weil_cmd(a: &WeilAuditArgs, out: Option<&Path>) -> Result<()> {
    let e = parse_list_i64(&a.r)?;
    if e.len() != 4 {
        bail!("--R needs four integers a,b,c,d");
    }
    let r = IntMat2::new(e[0], e[1], e[2], e[3]);
    let (lo, hi) = parse_int_range(&a.mn_range)?;
    let sample: Vec<(i64, i64)> = (lo..=hi).flat_map(|m| (lo..=hi).map(move |n| (m, n))).collect();
    let w = kloosterman::weil_audit(a.c_max, a.modulus, &r, &sample)?;
    let mut t = Table::create(out, &["c_max", "N", "max_ratio", "argmax_c", "argmax_m", "argmax_n", "queries"])?;
    t.row([
        a.c_max.to_string(),
        a.modulus.to_string(),
        fmt_f(w.max_ratio),
        w.argmax.0.to_string(),
        w.argmax.1.to_string(),
        w.argmax.2.to_string(),
        w.queries.to_string(),
    ])?;
    t.finish()?;
    Ok(())
}

fn b_alpha_cmd(a: &BAlphaArgs, out: Option<&Path>) -> Result<()> {
    let mut t = Table::create(out, &["X", "re", "im", "abs", "majorant"])?;
    for x in parse_grid(&a.x)? {
        if !(x >= 1.0) || x.fract() != 0.0 {
            bail!("X = {x} must be a positive integer");
        }
        let r = kloosterman::b_alpha_sum(a.alpha, x as u64, a.modulus)?;
        let v: Complex64 = r.value;
        t.row([fmt_f(x), fmt_f(v.re), fmt_f(v.im), fmt_f(v.norm()), fmt_f(r.majorant)])?;
    }
    t.finish()?;
    Ok(())
}
