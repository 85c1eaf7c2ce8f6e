//! One verification suite per subcommand. Every suite is deterministic in its
//! configuration; nothing time-dependent enters a report.

use crate::amplifier::amplifier_lower_bound;
use crate::archimedean::{
    op_quantize, relative_character_check, Letter, OpQuadrature, Profile, SymbolSpec, WeightModule,
};
use crate::bessel::{moment_corpus, validate_against_series, MOMENT_C};
use crate::config::RunConfig;
use crate::counting::{corpus, verify_counting_corollary, CORPUS_DELTA, CORPUS_SEED};
use crate::exponents::{derive_theorem_exponents, q, Sym};
use crate::linalg::op_norm;
use crate::padic::{commutator_closure, pow_u64};
use crate::principal::{
    double_coset_partition, matrix_coeff_support_scan, newform_decomposition, truncated_coeff_lemmas, InducedVector,
    PrincipalModel,
};
use crate::quad::loglog_slope;
use crate::report::{Check, Report};
use crate::sl2::{coadjoint_act, orbit_fourier, orbit_fourier_closed_form, LieVector, QuadratureSpec, A};
use crate::volumes::{benchmark, verify_volume_bound, TorusSpec};
use crate::whittaker::exhaustive_gtlv;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub const SUITES: [&str; 8] = ["sl2", "archimedean", "padic", "volumes", "count", "amplify", "exponents", "bessel"];

pub const KIRILLOV_TS: [f64; 3] = [5.0, 10.0, 20.0];
pub const KIRILLOV_SS: [f64; 2] = [0.1, 0.2];
pub const LOCALISATION_TS: [f64; 4] = [100.0, 400.0, 1600.0, 6400.0];
pub const RELATIVE_TS: [f64; 4] = [5.0, 10.0, 20.0, 40.0];
pub const DELTA1: f64 = 0.4;
pub const DELTA2: f64 = 0.8;
pub const AMPLIFIER_PRIMES: [u64; 3] = [11, 13, 17];

pub fn run(name: &str, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let checks = match name {
        "sl2" => sl2(cfg)?,
        "archimedean" => archimedean(cfg)?,
        "padic" => padic(cfg)?,
        "volumes" => volumes(cfg)?,
        "count" => count(cfg)?,
        "amplify" => amplify(cfg)?,
        "exponents" => exponents()?,
        "bessel" => bessel(cfg)?,
        "all" => return run_all(cfg),
        _ => return Err(Error::Config(format!("unknown suite {name:?}"))),
    };
    Ok(Report::new(name, cfg.seed, checks))
}

/// Suites run on scoped threads; the report keeps the fixed suite order.
pub fn run_all(cfg: &RunConfig) -> Result<Report> {
    let parts: Vec<Result<Report>> = std::thread::scope(|s| {
        let handles: Vec<_> = SUITES.iter().map(|name| s.spawn(move || run(name, cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });
    let mut checks = vec![];
    for (name, part) in SUITES.iter().zip(parts) {
        checks.extend(part?.checks.into_iter().map(|mut c| {
            c.id = format!("{name}.{}", c.id);
            c
        }));
    }
    Ok(Report::new("all", cfg.seed, checks))
}

pub fn kirillov_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let quad = QuadratureSpec::default();
    let mut out = vec![];
    for &t in &KIRILLOV_TS {
        for &s in &KIRILLOV_SS {
            let x = s * A;
            let got = orbit_fourier(t, &x, &quad)?;
            let want = orbit_fourier_closed_form(t, &x);
            let rel = (got - want).abs() / want.abs();
            out.push(Check::at_most("kirillov.closed_form", "orbit Fourier transform, span of A", json!({"T": t, "t": s}), rel, 1e-4));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (t, x) = (10.0, 0.15 * A);
    let base = orbit_fourier(t, &x, &quad)?;
    for k in 0..cfg.conjugations {
        let y = LieVector::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        let xc = coadjoint_act(&y.exp(), &x)?;
        let rel = (orbit_fourier(t, &xc, &quad)? - base).abs() / base.abs();
        out.push(Check::at_most(
            "kirillov.class_function",
            "orbit Fourier transform, conjugation invariance",
            json!({"T": t, "draw": k, "conjugated": [xc.a, xc.b, xc.c]}),
            rel,
            1e-3,
        ));
    }
    Ok(out)
}

pub fn sl2(cfg: &RunConfig) -> Result<Vec<Check>> {
    kirillov_checks(cfg)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalisationSeries {
    pub ts: Vec<f64>,
    /// (label, defects over ts)
    pub series: Vec<(&'static str, Vec<f64>)>,
}

impl LocalisationSeries {
    pub fn slope(&self, label: &str) -> f64 {
        let y = &self.series.iter().find(|(l, _)| *l == label).expect("known label").1;
        loglog_slope(&self.ts, y)
    }
}

/// Defects of the sharp and smooth lifts at τ = T·A for single letters.
pub fn localisation_series(tmax: f64) -> Result<LocalisationSeries> {
    let ts: Vec<f64> = LOCALISATION_TS.iter().copied().filter(|&t| t <= tmax).collect();
    let labels = [
        ("sharp.A", false, Letter::A),
        ("sharp.B", false, Letter::B),
        ("sharp.C", false, Letter::C),
        ("smooth.A", true, Letter::A),
        ("smooth.B", true, Letter::B),
        ("smooth.C", true, Letter::C),
    ];
    let mut series: Vec<(&'static str, Vec<f64>)> = labels.iter().map(|l| (l.0, vec![])).collect();
    for &t in &ts {
        let m = WeightModule::with_default_truncation(t);
        let sharp = m.build_sharp_lift()?;
        let smooth = m.build_smooth_lift(Profile::Bump)?;
        for (i, (_, is_smooth, letter)) in labels.iter().enumerate() {
            let v = if *is_smooth { &smooth } else { &sharp };
            series[i].1.push(m.localisation_defect(v, &(t * A), &[*letter])?);
        }
    }
    Ok(LocalisationSeries { ts, series })
}

pub fn localisation_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let s = localisation_series(cfg.tmax)?;
    let targets = [
        ("sharp.A", 0.75),
        ("sharp.B", 0.75),
        ("sharp.C", 0.5),
        ("smooth.A", 0.5),
        ("smooth.B", 0.5),
        ("smooth.C", 0.5),
    ];
    let mut out = vec![];
    for (label, target) in targets {
        let defects = &s.series.iter().find(|(l, _)| *l == label).unwrap().1;
        out.push(Check::near(
            &format!("localisation.slope.{label}"),
            "microlocal lift localisation exponent",
            json!({"T": s.ts, "defects": defects}),
            s.slope(label),
            target,
            0.1,
        ));
    }
    let c = &s.series.iter().find(|(l, _)| *l == "sharp.C").unwrap().1;
    for (t, d) in s.ts.iter().zip(c) {
        out.push(Check::at_most("localisation.sharp.C_bound", "C-defect at most 2√T", json!({"T": t}), *d, 2.0 * t.sqrt()));
    }
    Ok(out)
}

/// Truncation used for Op_h at parameter T.
pub fn op_truncation(t: f64) -> usize {
    80usize.min((1.5 * t).ceil() as usize + 12)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelativeRow {
    pub t: f64,
    pub h: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
}

pub fn relative_character_rows() -> Result<Vec<RelativeRow>> {
    RELATIVE_TS
        .iter()
        .map(|&t| {
            let h = 1.0 / t;
            let m = WeightModule::new(t, op_truncation(t));
            let sym = SymbolSpec::coin(h, DELTA1, DELTA2);
            let i0 = m.index(0).expect("weight 0 is inside every truncation");
            let quad = OpQuadrature { columns: Some((i0, i0 + 1)), ..Default::default() };
            let op = op_quantize(&sym, h, &m, &quad)?;
            let (lhs, rhs) = relative_character_check(&op, &m, &sym, 0, h)?;
            Ok(RelativeRow { t, h, lhs, rhs, diff: (lhs - rhs).abs() })
        })
        .collect()
}

pub fn op_checks() -> Result<Vec<Check>> {
    let mut out = vec![];
    let t = 5.0;
    let m = WeightModule::new(t, 14);
    let quad = OpQuadrature { n_rho: 24, n_c: 24, n_theta: 64, ..Default::default() };
    let op = op_quantize(&SymbolSpec::coin(1.0 / t, DELTA1, DELTA2), 1.0 / t, &m, &quad)?;
    let skew = op_norm(&(&op.matrix - op.matrix.adjoint()));
    out.push(Check::at_most("op.self_adjoint", "real symbols quantize to self-adjoint operators", json!({"T": t, "N": 14}), skew, 1e-6));

    let rows = relative_character_rows()?;
    let exponent = 1.0 - 2.0 * DELTA1;
    for r in &rows {
        out.push(Check::at_most(
            "op.relative_character",
            "relative character estimate, unit constant",
            json!({"T": r.t, "lhs": r.lhs, "rhs": r.rhs}),
            r.diff,
            r.h.powf(exponent),
        ));
    }
    let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let d: Vec<f64> = rows.iter().map(|r| r.diff).collect();
    out.push(Check::at_most(
        "op.relative_character_exponent",
        "relative character error exponent in h",
        json!({"h": h, "diff": d, "delta1": DELTA1}),
        exponent - 0.05,
        loglog_slope(&h, &d),
    ));

    let t = 20.0;
    let h = 1.0 / t;
    let m = WeightModule::new(t, 42);
    let sym = SymbolSpec::new(LieVector::new(1.0, 0.0, 0.6), [h.powf(DELTA2), h.powf(DELTA1), 0.05], 1.0)?;
    let i0 = m.index(0).unwrap();
    let op = op_quantize(&sym, h, &m, &OpQuadrature { columns: Some((i0, i0 + 1)), ..Default::default() })?;
    let (lhs, rhs) = relative_character_check(&op, &m, &sym, 0, h)?;
    out.push(Check::at_most(
        "op.disjoint_support",
        "symbol away from the relative orbit",
        json!({"T": t, "lhs": lhs, "rhs": rhs}),
        lhs.abs().max(rhs.abs()),
        1e-3,
    ));
    Ok(out)
}

pub fn archimedean(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut out = localisation_checks(cfg)?;
    out.extend(op_checks()?);
    Ok(out)
}

fn normalized(m: &PrincipalModel, v: &InducedVector) -> InducedVector {
    let n = m.norm(v);
    InducedVector { values: v.values.iter().map(|z| z / n).collect() }
}

pub fn principal_checks(p: u64, r: u32, cfg: &RunConfig) -> Result<Vec<Check>> {
    let params = json!({"p": p, "r": r});
    let mut out = vec![];
    let m = PrincipalModel::new(p, r)?;
    let table = double_coset_partition(p, 2 * r)?;
    let mut hits = vec![0u32; m.num_cosets()];
    for c in &table.cells {
        for &i in &c.cosets {
            hits[i] += 1;
        }
    }
    let covered = hits.iter().all(|&h| h == 1);
    let total: u64 = table.cells.iter().map(|c| c.size).sum();
    out.push(Check::exact("padic.partition", "double coset decomposition", params.clone(), (covered, total), (true, table.group_order)));
    out.push(Check::exact("padic.new_vector_dim", "K_H(m,m)-invariants", params.clone(), m.new_vector_space_dim()?, 1));
    out.push(Check::exact("padic.ml_eigenspace_dim", "character eigenspace of the thick torus", params.clone(), m.ml_eigenspace_dim()?, 1));
    let scan = matrix_coeff_support_scan(&m);
    out.push(Check::exact("padic.support_scan", "matrix coefficient support", params.clone(), scan.exceptional.len(), 0));

    let qf = p as f64;
    let zeta = 1.0 / (1.0 - 1.0 / qf);
    let fml = m.ml_vector();
    let mut q_dev: f64 = 0.0;
    for t in (1..pow_u64(p, r)).filter(|t| t % p != 0) {
        let v = normalized(&m, &m.group_act(&m.c_t(t), &fml));
        q_dev = q_dev.max((m.local_period_q(&v) - zeta / qf).abs());
    }
    out.push(Check::at_most("padic.local_period", "Q of translated localised vectors", params.clone(), q_dev, cfg.tol));

    let nf = newform_decomposition(&m);
    out.push(Check::at_most("padic.newform_sum", "Σ|a_t|² = 1", params.clone(), (nf.sum_sq - 1.0).abs(), cfg.tol));
    let want = (zeta / qf).sqrt();
    let dev = nf.rows.iter().map(|row| (row.abs - want).abs()).fold(0.0, f64::max);
    out.push(Check::at_most("padic.newform_abs", "|a_t| = ζ_p(1)^{1/2}p^{−1/2}", params.clone(), dev, cfg.tol));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tl = truncated_coeff_lemmas(&m, &m.new_vector(), &mut rng);
    let dim_new = pow_u64(p, 2 * r) + pow_u64(p, 2 * r - 1);
    out.push(Check::exact("padic.dim_v_new", "dim V_new = p^{2r}(1 + 1/p)", params.clone(), tl.dim_v as u64, dim_new));
    let dev = tl.convolution_dev.max(tl.projector_dev).max(tl.orthogonal_complement_dev).max(tl.schur_dev);
    out.push(Check::at_most("padic.truncated_coefficients", "truncated matrix coefficient identities", params, dev, cfg.tol));
    Ok(out)
}

pub fn commutator_check(p: u64) -> Result<Check> {
    let c = commutator_closure(p, 1)?;
    Ok(Check::exact(
        "padic.commutator",
        "commutator closure equals K(2)",
        json!({"p": p, "modulus": format!("p^{}", c.modulus_exponent)}),
        (c.equal, c.closure_size),
        (true, c.target_size),
    ))
}

pub fn padic(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut out = vec![];
    for p in cfg.primes() {
        out.extend(principal_checks(p, cfg.r, cfg)?);
        out.push(commutator_check(p)?);
    }
    Ok(out)
}

pub fn volume_checks(p: u64, n: u32, seed: u64) -> Result<Vec<Check>> {
    let model = PrincipalModel::new(p, n)?;
    let mut out = vec![];
    let samples = if n == 1 { 0 } else { 10_000 };
    for torus in [TorusSpec::from_model(&model)?, TorusSpec::nonsplit(p, n)] {
        let r = verify_volume_bound(&torus, samples, seed)?;
        let params = json!({"p": p, "n": n, "torus": format!("{:?}", torus.kind), "checked": r.checked, "exhaustive": r.exhaustive});
        out.push(Check::at_most("volumes.constant", "local volume bound, observed constant", params.clone(), r.constant, p as f64));
        out.push(Check::exact("volumes.w_invariance", "invariance under the Weyl element", params.clone(), r.w_invariance_failures, 0));
        out.push(Check::exact("volumes.monotone", "bound monotone in the distance", params, r.monotone, true));
    }
    let b = benchmark(p, n)?;
    let ratio = b.ratio.max(1.0 / b.ratio);
    out.push(Check::at_most("volumes.benchmark", "I_γ against qⁿ, factor 2", json!({"p": p, "n": n, "i_gamma": b.i_gamma}), ratio, 2.0));
    Ok(out)
}

pub fn volumes(cfg: &RunConfig) -> Result<Vec<Check>> {
    let ps = cfg.p.map_or(vec![3], |p| vec![p]);
    let mut out = vec![];
    for p in ps {
        out.extend(volume_checks(p, cfg.n, cfg.seed)?);
    }
    Ok(out)
}

/// Frozen calibration constants for the counting corpus.
pub const COUNT_SUM_C: f64 = 2.0;
pub const COUNT_M1_C: f64 = 4.0;
pub const COUNT_IS_C: f64 = 2.0;

pub fn count(cfg: &RunConfig) -> Result<Vec<Check>> {
    let p = cfg.p.unwrap_or(3);
    let (zs, gs) = corpus(CORPUS_SEED);
    let mut out = vec![];
    for x in [5u64, 7] {
        let r = verify_counting_corollary(&zs, &gs, x, p, &[0, 1], CORPUS_DELTA)?;
        let params = json!({"X": x, "p": p, "rows": r.rows.len(), "delta": CORPUS_DELTA});
        out.push(Check::at_most("count.summary", "weighted count against the corollary shape", params.clone(), r.max_ratio, COUNT_SUM_C));
        out.push(Check::at_most("count.m1", "determinant-one count", params.clone(), r.max_m1_ratio, COUNT_M1_C));
        out.push(Check::at_most("count.generic", "count without congruence conditions", params.clone(), r.max_is_ratio, COUNT_IS_C));
        out.push(Check::exact(
            "count.parabolic_divisibility",
            "parabolic elements have p^l | b",
            json!({"X": x, "p": p, "parabolic": r.parabolic_total}),
            r.parabolic_all_divisible,
            true,
        ));
    }
    Ok(out)
}

pub fn amplify(cfg: &RunConfig) -> Result<Vec<Check>> {
    let p = cfg.p.unwrap_or(3);
    let r = amplifier_lower_bound(&AMPLIFIER_PRIMES, p, cfg.draws, cfg.seed)?;
    let params = json!({"primes": r.primes, "p": p});
    Ok(vec![
        Check::exact("amplify.coefficients", "amplifier coefficients against the closed form", params.clone(), r.table_matches, true),
        Check::new(
            "amplify.key_inequality",
            "inf |t| + |t² − 1| on a grid",
            json!({"step": r.grid_step, "argmin": r.grid_argmin}),
            json!(r.grid_infimum),
            json!(0.74),
            r.grid_infimum >= 0.74,
        ),
        Check::new(
            "amplify.lower_bound",
            "C_X ≥ (#P)²/8 over random draws",
            json!({"primes": r.primes, "draws": r.draws, "seed": cfg.seed}),
            json!(r.min_cx),
            json!(r.target),
            r.min_cx >= r.target,
        ),
        Check::at_most("amplify.eigenvalue_expansion", "spectral side equals C_X", params, r.max_eigen_mismatch, 1e-9),
    ])
}

pub fn exponents() -> Result<Vec<Check>> {
    let r = derive_theorem_exponents()?;
    let s = |v: (crate::exponents::Q, crate::exponents::Q)| format!("T^{} N^{}", v.0, v.1);
    let mut out = vec![
        Check::exact("exponents.naive.x", "naive bound", json!({}), r.naive.choice.x.to_string(), "T^1/12".into()),
        Check::exact("exponents.naive.main", "naive bound", json!({}), s(r.naive.main.in_t_n()), s((q(11, 12), q(1, 2)))),
        Check::exact("exponents.amplified.x", "amplified bound", json!({}), r.amplified.choice.x.to_string(), "T^1/6·N0^1/12".into()),
        Check::exact("exponents.amplified.main", "amplified bound", json!({}), s(r.amplified.main.in_t_n()), s((q(5, 6), q(11, 24)))),
        Check::exact("exponents.improved.x", "improved bound", json!({}), r.improved.choice.x.to_string(), "T^1/6·N0^1/6".into()),
        Check::exact(
            "exponents.improved.main",
            "improved bound",
            json!({}),
            format!("T^{} N0^{}", r.improved.main.exp(Sym::T), r.improved.main.exp(Sym::N0)),
            "T^5/6 N0^5/6".into(),
        ),
        Check::exact(
            "exponents.final",
            "sup-norm exponent in Nλ",
            json!({}),
            r.final_exponent.map(|e| e.to_string()),
            Some("5/24".to_string()),
        ),
        Check::exact("exponents.grid", "optimum not beaten on a rational grid", json!({"max_den": 24}), r.grid_optimal, true),
    ];
    for l in r.ledgers() {
        out.push(Check::exact(&format!("exponents.{}.ledger", l.name), "dyadic sum of the ledger", json!({}), l.summed_ok(), true));
    }
    Ok(out)
}

pub fn bessel(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut out = vec![];
    let p = cfg.p.unwrap_or(3);
    let g = exhaustive_gtlv(p, cfg.n)?;
    let params = json!({"p": p, "n": cfg.n, "modulus": g.modulus, "checked": g.checked, "columns": g.columns_seen});
    out.push(Check::exact("whittaker.orbits", "invariants against the orbit oracle", params.clone(), g.formula_vs_orbits, 0));
    out.push(Check::exact("whittaker.generic", "invariants against the Iwasawa reading", params.clone(), g.formula_vs_generic, 0));
    out.push(Check::exact("whittaker.table", "parameter table, four columns", params.clone(), (g.table_mismatches, g.columns_seen.iter().all(|&c| c > 0)), (0, true)));
    out.push(Check::exact("whittaker.s_l_identity", "−2n + t = −s_l", params, g.identity_failures, 0));

    let worst = validate_against_series()?.iter().map(|s| s.rel_err).fold(0.0, f64::max);
    out.push(Check::at_most("bessel.series", "quadrature against the power series", json!({"points": 20}), worst, 1e-8));
    for row in moment_corpus()? {
        out.push(Check::at_most(
            "bessel.moment",
            "second moment against T^{1/3} + R",
            json!({"T": row.t, "alpha": row.alpha, "R": row.r}),
            row.ratio,
            MOMENT_C,
        ));
    }
    Ok(out)
}
