//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use quasilocal::fixtures::{verify_matrix, FixtureSet};
use quasilocal::spectrum::{isospectrality_check, IsospectralOptions};
use quasilocal_core::dyson::{
    cholesky_dyson, factor_diagonal, hermitize, tridiagonal_omega, HermitizeOptions,
};
use quasilocal_core::lattice::{multiparam, point_defect, two_center};
use quasilocal_core::metric::{
    closed_form_theta, diagonal_multiparam_metric, gamma_family, gamma_transition,
    positivity_check, solve_band_metric, solver_window, MetricKind, MetricSpec,
};
use quasilocal_core::scattering::{
    kappa_grid, singularity_scan, solve_scattering, transfer_matrix, Incidence, ScatteringOptions,
};
use quasilocal_core::{ratio, BandMatrix, Rational, Scalar, Surd};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn couplings() -> [Rational; 3] {
    [ratio(1, 3), ratio(1, 2), ratio(9, 10)]
}

/// Dense row-major copy, independent of the band storage.
fn dense<T: Scalar>(m: &BandMatrix<T>) -> Vec<Vec<T>> {
    let n = m.window() as isize;
    (-n..=n)
        .map(|i| (-n..=n).map(|j| m.get(i, j)).collect())
        .collect()
}

fn dense_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let mut c = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    c[i][j] = c[i][j].clone() + a[i][k].clone() * b[k][j].clone();
                }
            }
        }
    }
    c
}

fn dense_transpose(a: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[j][i].clone()).collect())
        .collect()
}

fn nalgebra(m: &BandMatrix<f64>) -> DMatrix<f64> {
    let d = dense(m);
    DMatrix::from_fn(d.len(), d.len(), |i, j| d[i][j])
}

fn min_eigenvalue(m: &BandMatrix<f64>) -> f64 {
    nalgebra(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn fixtures_reproduced() -> Check {
    let set = FixtureSet::bundled();
    let mut checked = 0;
    for g in couplings() {
        for r in 1..=7 {
            let name = format!("theta_{r}");
            let fixture = set.get(&name).ok_or_else(|| format!("{name} missing"))?;
            let report = verify_matrix(&set, fixture, &g).map_err(|e| e.to_string())?;
            ensure(report.passed(), || {
                format!("{name} at g = {g}: {:?}", report.mismatches)
            })?;
            checked += report.checked;
        }
        // z₅ and e straight from their rational expressions
        let one = Rational::one();
        let two = Rational::from_i64(2);
        let k = one.clone() - two * g.clone() * g.clone();
        let e = (one.clone() + g.clone()) * k.clone() * k.clone();
        let z5 = e.clone() / (one - g.clone());
        let t5 = closed_form_theta(5, g.clone(), 12).map_err(|e| e.to_string())?;
        let t6 = closed_form_theta(6, g.clone(), 12).map_err(|e| e.to_string())?;
        ensure(t5.matrix.get(0, 0) == z5, || format!("z5 at g = {g}"))?;
        for (i, j) in [(0, 1), (1, 0), (0, -1), (-1, 0)] {
            ensure(t6.matrix.get(i, j) == e, || {
                format!("Θ₆ e at ({i},{j}), g = {g}")
            })?;
        }
    }
    Ok(format!("{checked} entries of Θ₁..Θ₇ at 3 couplings"))
}

fn exact_residuals() -> Check {
    let mut rows = 0;
    for g in couplings() {
        for r in 1..=15usize {
            let n = 2 * r + 10;
            let h = point_defect(g.clone(), n).map_err(|e| e.to_string())?;
            let theta = closed_form_theta(r, g.clone(), n).map_err(|e| e.to_string())?;
            let hd = dense(&h.matrix);
            let td = dense(&theta.matrix);
            let lhs = dense_mul(&dense_transpose(&hd), &td);
            let rhs = dense_mul(&td, &hd);
            // rows and columns untouched by the truncation
            let lo = r + 1;
            let hi = 2 * n + 1 - lo;
            for i in lo..hi {
                for j in lo..hi {
                    ensure(lhs[i][j] == rhs[i][j], || {
                        format!(
                            "R = {r}, g = {g}: residual at ({}, {})",
                            i as isize - n as isize,
                            j as isize - n as isize
                        )
                    })?;
                }
                rows += 1;
            }
            let lib = theta.residual(&h.matrix).map_err(|e| e.to_string())?;
            ensure(lib.interior_is_zero(), || {
                format!("library residual nonzero, R = {r}, g = {g}")
            })?;
        }
    }
    Ok(format!("R = 1..15, {rows} interior rows exactly zero"))
}

fn solver_matches_formula() -> Check {
    for g in couplings() {
        for r in 1..=9usize {
            let n = solver_window(r, r + 1).max(2 * r) + 2;
            let h = point_defect(g.clone(), n).map_err(|e| e.to_string())?;
            let solved =
                solve_band_metric(&h.matrix, r, r + 1).map_err(|e| format!("R = {r}: {e}"))?;
            let closed = closed_form_theta(r, g.clone(), n).map_err(|e| e.to_string())?;
            let (a, b) = (dense(&solved.matrix), dense(&closed.matrix));
            ensure(a == b, || {
                format!("R = {r}, g = {g}: solved metric differs")
            })?;
        }
    }
    Ok("R = 1..9 at 3 couplings, entrywise equal".into())
}

fn unitarity_models() -> Vec<(String, BandMatrix<f64>)> {
    let mut models = Vec::new();
    for g in [0.9, -0.9, 0.5, -0.5, 0.1] {
        models.push((format!("point g={g}"), point_defect(g, 20).unwrap().matrix));
    }
    for m in [2, 4] {
        models.push((
            format!("two-center g=0.5 M={m}"),
            two_center(0.5, m, 20).unwrap().matrix,
        ));
    }
    models
}

fn unitarity() -> Check {
    let kappas = kappa_grid(0.1, std::f64::consts::PI - 0.1, 50);
    let mut worst = 0.0_f64;
    for (name, h) in unitarity_models() {
        for incidence in [Incidence::Left, Incidence::Right] {
            for &k in &kappas {
                let r = solve_scattering(
                    &h,
                    k,
                    ScatteringOptions {
                        incidence,
                        padding: 0,
                    },
                )
                .map_err(|e| format!("{name}, κ = {k}: {e}"))?;
                // flux balance from the raw amplitudes
                let d = (r.reflection.norm_sqr() + r.transmission.norm_sqr() - 1.0).abs();
                ensure(d <= 1e-10, || format!("{name}, κ = {k}: deficit {d:e}"))?;
                worst = worst.max(d);
            }
        }
    }
    Ok(format!(
        "max deficit {worst:.2e} over 7 models x 50 κ x 2 sides"
    ))
}

fn dyson_fixtures() -> Check {
    for g in [ratio(1, 3), ratio(1, 2)] {
        let n = 10;
        let theta = gamma_family(g.clone(), ratio(-1, 1), n).map_err(|e| e.to_string())?;
        let map = tridiagonal_omega(g.clone(), n).map_err(|e| e.to_string())?;
        let diff = map
            .gram()
            .sub(&theta.matrix.lift())
            .map_err(|e| e.to_string())?;
        let radius = n - 2;
        ensure(diff.interior(radius).all(|(_, _, v)| v.is_zero()), || {
            format!("Ω†Ω ≠ 2Θ₁ − Θ₂ at g = {g}")
        })?;
        let eye = map.product_with_inverse();
        let radius = n as isize;
        for i in -radius..=radius {
            for j in -radius..=radius {
                let want = if i == j { Surd::one() } else { Surd::zero() };
                ensure(eye.get(i, j) == want, || {
                    format!("ΩΩ⁻¹ at ({i},{j}), g = {g}")
                })?;
            }
        }

        let h = point_defect(g.clone(), n).map_err(|e| e.to_string())?;
        let t1 = closed_form_theta(1, g.clone(), n).map_err(|e| e.to_string())?;
        let diag = factor_diagonal(&t1.matrix).map_err(|e| e.to_string())?;
        let hh = hermitize(&h.matrix.lift(), &diag, HermitizeOptions::default())
            .map_err(|e| e.to_string())?;
        let one = Rational::one();
        let r = -Surd::sqrt_rational(&(one.clone() - g.clone() * g.clone())).ok_or("√(1−g²)")?;
        let r_n = hh.interior_radius as isize;
        for i in -r_n..=r_n {
            for j in -r_n..=r_n {
                let want = match (i, j) {
                    (0, 1) | (1, 0) | (0, -1) | (-1, 0) => r.clone(),
                    _ if i == j => Surd::from_i64(2),
                    _ if (i - j).abs() == 1 => Surd::from_i64(-1),
                    _ => Surd::zero(),
                };
                ensure(hh.matrix.get(i, j) == want, || {
                    format!("diagonal 𝔥 at ({i},{j}), g = {g}")
                })?;
            }
        }
    }
    let mut worst = 0.0_f64;
    for g in [1.0 / 3.0, 0.5] {
        let n = 10;
        let h = point_defect(g, n).unwrap().matrix;
        let map = tridiagonal_omega(g, n).map_err(|e| e.to_string())?;
        let hh = hermitize(&h, &map, HermitizeOptions::default()).map_err(|e| e.to_string())?;
        let g2 = g * g;
        let q = -(2.0 * g2 * (1.0 - g2)).sqrt();
        let block = [
            ((-1, -1), 2.0 - g2),
            ((1, 1), 2.0 - g2),
            ((0, 0), 2.0 * g2),
            ((-1, 0), q),
            ((0, -1), q),
            ((0, 1), q),
            ((1, 0), q),
            ((-1, 1), 1.0 - g2),
            ((1, -1), 1.0 - g2),
            ((-2, -1), -1.0),
            ((1, 2), -1.0),
            ((-2, 0), 0.0),
            ((0, 2), 0.0),
            ((2, 2), 2.0),
        ];
        for ((i, j), want) in block {
            let d = (hh.matrix.get(i, j) - want).abs();
            ensure(d <= 1e-12, || {
                format!("tridiagonal 𝔥 at ({i},{j}), g = {g}: off by {d:e}")
            })?;
            worst = worst.max(d);
        }
    }
    Ok(format!(
        "exact Gram, inverse and diagonal 𝔥; float block within {worst:.1e}"
    ))
}

fn positivity_interval() -> Check {
    let (g, n) = (0.5, 20);
    for (gamma, positive) in [
        (-0.9, true),
        (0.0, true),
        (0.9, true),
        (-1.5, false),
        (1.5, false),
    ] {
        let theta = gamma_family(g, gamma, n).map_err(|e| e.to_string())?;
        ensure(theta.matrix.is_symmetric(), || "Θ(γ) not symmetric".into())?;
        let min = min_eigenvalue(&theta.matrix);
        ensure((min > 0.0) == positive, || {
            format!("γ = {gamma}: λ_min = {min}")
        })?;
        let lib = positivity_check(&theta)
            .map_err(|e| e.to_string())?
            .is_positive();
        ensure(lib == positive, || {
            format!("γ = {gamma}: factorization disagrees")
        })?;
    }
    let (up, _) = gamma_transition(g, n, 0.0, 1.5, 1e-6).map_err(|e| e.to_string())?;
    let (down, _) = gamma_transition(g, n, 0.0, -1.5, 1e-6).map_err(|e| e.to_string())?;
    ensure((up - 1.0).abs() <= 0.05, || format!("upper boundary {up}"))?;
    ensure((down + 1.0).abs() <= 0.05, || {
        format!("lower boundary {down}")
    })?;
    Ok(format!(
        "oracle agrees at 5 γ; boundaries {down:.4} and {up:.4}"
    ))
}

fn spectral_singularity() -> Check {
    for r in 1..=7 {
        for g in [ratio(1, 1), ratio(-1, 1), ratio(3, 2), ratio(-3, 2)] {
            ensure(closed_form_theta(r, g.clone(), 20).is_err(), || {
                format!("R = {r} accepted g = {g}")
            })?;
        }
        for g in [1.0, -1.0, 1.5] {
            ensure(closed_form_theta(r, g, 20).is_err(), || {
                format!("R = {r} accepted g = {g}")
            })?;
        }
    }
    ensure(tridiagonal_omega(1.0, 10).is_err(), || {
        "Ω accepted g = 1".into()
    })?;

    // Θ₁ by the diamond rule at g = 3/2: still an intertwiner, no longer positive
    let g = ratio(3, 2);
    let z1 = FixtureSet::bundled()
        .evaluate("z1", &g)
        .map_err(|e| e.to_string())?;
    let z1 = z1.as_rational().ok_or("z1 irrational")?;
    let mut matrix = BandMatrix::<Rational>::identity(8);
    matrix.set(0, 0, z1.clone());
    let theta = MetricSpec {
        kind: MetricKind::ClosedForm {
            range: 1,
            g: g.clone(),
        },
        matrix,
    };
    let h = point_defect(g, 8).map_err(|e| e.to_string())?;
    ensure(
        theta
            .residual(&h.matrix)
            .map_err(|e| e.to_string())?
            .interior_is_zero(),
        || "Θ₁ at g = 3/2 does not intertwine".into(),
    )?;
    ensure(
        !positivity_check(&theta)
            .map_err(|e| e.to_string())?
            .is_positive(),
        || "Θ₁ at g = 3/2 reported positive".into(),
    )?;
    ensure(min_eigenvalue(&theta.matrix.to_f64()) < 0.0, || {
        "oracle finds Θ₁ positive".into()
    })?;

    let kappas = kappa_grid(0.1, std::f64::consts::PI - 0.1, 50);
    let rows = singularity_scan(
        |g| point_defect(g, 20).unwrap().matrix,
        &[0.5, 0.9, 0.99],
        &kappas,
    );
    let conds: Vec<f64> = rows.iter().map(|r| r.max_condition).collect();
    ensure(conds.windows(2).all(|w| w[1] > w[0]), || {
        format!("condition numbers {conds:?}")
    })?;
    Ok(format!(
        "z₁ = {z1} indefinite; condition {:.1} < {:.1} < {:.1}",
        conds[0], conds[1], conds[2]
    ))
}

fn multiparam_residual() -> Check {
    let params = vec![ratio(3, 10), ratio(1, 5), ratio(1, 10)];
    let n = 12;
    let h = multiparam(params.clone(), n).map_err(|e| e.to_string())?;
    let theta = diagonal_multiparam_metric(params, n).map_err(|e| e.to_string())?;
    let hd = dense(&h.matrix);
    let td = dense(&theta.matrix);
    let lhs = dense_mul(&dense_transpose(&hd), &td);
    let rhs = dense_mul(&td, &hd);
    for i in 1..2 * n {
        for j in 1..2 * n {
            ensure(lhs[i][j] == rhs[i][j], || format!("residual at ({i},{j})"))?;
        }
    }
    ensure(
        theta
            .residual(&h.matrix)
            .map_err(|e| e.to_string())?
            .interior_is_zero(),
        || "library residual nonzero".into(),
    )?;
    Ok("interior residual exactly 0 for (3/10, 1/5, 1/10)".into())
}

fn property_suites() -> Check {
    let kappas = kappa_grid(0.1, std::f64::consts::PI - 0.1, 50);
    let (mut methods, mut window) = (0.0_f64, 0.0_f64);
    for (name, h) in unitarity_models() {
        let wide = {
            let n = h.window() as isize + 20;
            let mut w = point_defect(0.0, n as usize).unwrap().matrix;
            for (i, j, v) in h.entries() {
                w.set(i, j, *v);
            }
            w
        };
        for &k in &kappas {
            let t = transfer_matrix(&h, k).map_err(|e| format!("{name}: {e}"))?;
            let left =
                solve_scattering(&h, k, ScatteringOptions::default()).map_err(|e| e.to_string())?;
            let right = solve_scattering(
                &h,
                k,
                ScatteringOptions {
                    incidence: Incidence::Right,
                    padding: 0,
                },
            )
            .map_err(|e| e.to_string())?;
            for d in [
                (left.reflection - t.reflection).norm(),
                (left.transmission - t.transmission).norm(),
                (right.reflection - t.reflection_right).norm(),
                (right.transmission - t.transmission_right).norm(),
            ] {
                ensure(d <= 1e-10, || {
                    format!("{name}, κ = {k}: methods differ by {d:e}")
                })?;
                methods = methods.max(d);
            }
            let padded = solve_scattering(
                &h,
                k,
                ScatteringOptions {
                    padding: 10,
                    ..Default::default()
                },
            )
            .map_err(|e| e.to_string())?;
            let far = solve_scattering(&wide, k, ScatteringOptions::default())
                .map_err(|e| e.to_string())?;
            for other in [padded, far] {
                for d in [
                    (left.reflection - other.reflection).norm(),
                    (left.transmission - other.transmission).norm(),
                ] {
                    ensure(d <= 1e-12, || {
                        format!("{name}, κ = {k}: window changes (R,T) by {d:e}")
                    })?;
                    window = window.max(d);
                }
            }
        }
    }

    let mut spectral = 0.0_f64;
    let n = 12;
    for g in [1.0 / 3.0, 0.5, 0.9] {
        let h = point_defect(g, n).unwrap().matrix;
        let t1 = closed_form_theta(1, g, n).map_err(|e| e.to_string())?;
        let theta = gamma_family(g, -0.5, n).map_err(|e| e.to_string())?;
        let maps = [
            factor_diagonal(&t1.matrix).map_err(|e| e.to_string())?,
            tridiagonal_omega(g, n).map_err(|e| e.to_string())?,
            cholesky_dyson(&theta.matrix).map_err(|e| e.to_string())?,
        ];
        let mut partners = Vec::new();
        for map in &maps {
            let hh = hermitize(&h, map, HermitizeOptions::default())
                .map_err(|e| format!("{}: {e}", map.provenance.name()))?;
            let report = isospectrality_check(&h, &hh.matrix, IsospectralOptions::default())
                .map_err(|e| e.to_string())?;
            ensure(report.agrees(1e-8), || {
                format!(
                    "{} at g = {g}: spectra differ by {:e}",
                    map.provenance.name(),
                    report.max_deviation
                )
            })?;
            spectral = spectral.max(report.max_deviation);
            partners.push(hh.matrix);
        }
        // different factorizations of one metric class give isospectral partners
        for p in &partners[1..] {
            let report = isospectrality_check(&partners[0], p, IsospectralOptions::default())
                .map_err(|e| e.to_string())?;
            ensure(report.agrees(1e-8), || {
                format!("partners at g = {g} differ")
            })?;
        }
    }
    Ok(format!(
        "methods {methods:.1e}, window {window:.1e}, spectra {spectral:.1e}"
    ))
}

struct Criterion {
    number: usize,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion {
            number: 1,
            name: "closed-form metrics match reference matrices",
            limit: Some(Duration::from_secs(1)),
            run: fixtures_reproduced,
        },
        Criterion {
            number: 2,
            name: "exact quasi-Hermiticity R = 1..15",
            limit: Some(Duration::from_secs(10)),
            run: exact_residuals,
        },
        Criterion {
            number: 3,
            name: "solver equals closed form",
            limit: None,
            run: solver_matches_formula,
        },
        Criterion {
            number: 4,
            name: "scattering unitarity",
            limit: Some(Duration::from_secs(5)),
            run: unitarity,
        },
        Criterion {
            number: 5,
            name: "Dyson maps and Hermitian partners",
            limit: None,
            run: dyson_fixtures,
        },
        Criterion {
            number: 6,
            name: "positivity interval",
            limit: None,
            run: positivity_interval,
        },
        Criterion {
            number: 7,
            name: "spectral singularity",
            limit: None,
            run: spectral_singularity,
        },
        Criterion {
            number: 8,
            name: "multiparameter metric",
            limit: None,
            run: multiparam_residual,
        },
        Criterion {
            number: 9,
            name: "method, spectrum and window agreement",
            limit: None,
            run: property_suites,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let result = match (result, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            }
            (r, _) => r,
        };
        let (status, detail) = match &result {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        if result.is_err() {
            failed += 1;
        }
        println!(
            "criterion {} {status} [{:.2?}] {}: {detail}",
            c.number, elapsed, c.name
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
