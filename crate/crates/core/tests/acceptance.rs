//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::Instant;

use egan_core::certificate::spherical_euler_residual;
use egan_core::embedding::{convergence_table, default_heights};
use egan_core::euclid::{egan_report, EuclideanSimplex};
use egan_core::harness::{
    certificate_scan, extremal_batch, falsify_scan, gen_euclidean, gen_spherical, trial_rng,
    TrialConfig,
};
use egan_core::kernel::angle_between;
use egan_core::lorentz::{
    hyperbolic_rotation, lorentz_svd, signature_matrix, LorentzFactors, Mat2,
};
use egan_core::spherical::{circum_cap, inscribed_cap, polar_simplex};
use egan_core::{Matrix, Vector};
use rand::Rng;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn euler_identity() -> Outcome {
    let start = Instant::now();
    let cfg = TrialConfig::new(2, 10_000, SEED);
    let mut worst = 0.0_f64;
    for i in 0..cfg.trials as u64 {
        let rep = egan_report(&gen_euclidean(&cfg, i).unwrap()).unwrap();
        let (big_r, r, d) = (rep.circumradius, rep.inradius, rep.d_centers);
        worst = worst.max((big_r * big_r - 2.0 * big_r * r - d * d).abs() / (big_r * big_r));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-9 && secs < 5.0,
        format!("10^4 triangles, max |R²−2Rr−d²|/R² = {worst:.2e}, {secs:.2}s"),
    )
}

fn egan_inequality() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut lines = Vec::new();
    for dim in 2..=8 {
        let rep = falsify_scan(&TrialConfig::new(dim, 100_000, SEED + dim as u64)).unwrap();
        pass &= rep.violations == 0 && rep.min_slack >= -1e-9;
        let q = rep.quantiles;
        lines.push(format!(
            "    dim {dim}: violations {}, min {:.3e}, p01 {:.3e}, p50 {:.3e}, max {:.3e}",
            rep.violations, q.min, q.p01, q.p50, q.max
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 120.0;
    outcome(
        pass,
        format!(
            "10^5 simplices per dim 2..8, relative slack distribution, {secs:.1}s\n{}",
            lines.join("\n")
        ),
    )
}

fn equality_cases() -> Outcome {
    let mut worst_slack = 0.0_f64;
    let mut worst_ratio = 0.0_f64;
    for dim in 2..=10 {
        let rep = egan_report(&EuclideanSimplex::regular(dim)).unwrap();
        worst_slack = worst_slack.max(rep.slack.abs());
        worst_ratio = worst_ratio.max((rep.circumradius / rep.inradius - dim as f64).abs());
    }
    let tri =
        EuclideanSimplex::from_rows(&[vec![0.0, 0.0], vec![3.0, 0.0], vec![0.0, 4.0]]).unwrap();
    let rep = egan_report(&tri).unwrap();
    let tri_err = (rep.circumradius - 2.5)
        .abs()
        .max((rep.inradius - 1.0).abs())
        .max((rep.d_centers * rep.d_centers - 1.25).abs());
    outcome(
        worst_slack <= 1e-10 && worst_ratio <= 1e-10 && tri_err <= 1e-12,
        format!(
            "regular dim 2..10: max |slack| {worst_slack:.1e}, max |R/r − n| {worst_ratio:.1e}; \
             3-4-5 max error {tri_err:.1e}"
        ),
    )
}

/// Criteria 4 and 8 share the certificate runs.
fn certificate_runs() -> (Outcome, Outcome) {
    let mut pass4 = true;
    let mut worst_residual = 0.0_f64;
    let mut all_ran = true;
    let mut lines = Vec::new();
    for m in 3..=8 {
        let scan = certificate_scan(&TrialConfig::new(m, 10_000, SEED + 100 + m as u64)).unwrap();
        let mut ok = scan.failures == 0 && scan.min_margin >= -1e-9 && scan.max_margin_gap <= 1e-9;
        if m == 3 {
            ok &= scan.max_abs_margin <= 1e-8;
        }
        pass4 &= ok;
        all_ran &= scan.failures == 0;
        worst_residual = worst_residual.max(scan.max_trace_residual);
        lines.push(format!(
            "    m {m}: min margin {:.3e}, max |margin| {:.3e}, max gap {:.1e}, failures {}",
            scan.min_margin, scan.max_abs_margin, scan.max_margin_gap, scan.failures
        ));
    }
    (
        outcome(
            pass4,
            format!("10^4 polar pairs per m 3..8\n{}", lines.join("\n")),
        ),
        outcome(
            all_ran && worst_residual <= 1e-9,
            format!("6·10^4 certificate runs, max relative trace residual {worst_residual:.2e}"),
        ),
    )
}

fn spherical_euler() -> Outcome {
    let cfg = TrialConfig::new(3, 10_000, SEED + 200);
    let mut worst = 0.0_f64;
    for i in 0..cfg.trials as u64 {
        let s = gen_spherical(&cfg, i).unwrap();
        worst = worst.max(spherical_euler_residual(&s).unwrap().abs());
    }
    outcome(
        worst <= 1e-9,
        format!("10^4 spherical triangles, max residual {worst:.2e}"),
    )
}

/// Unit normal of the hyperplane spanned by all vertices but `skip`, from
/// cofactors, oriented toward the skipped vertex.
fn cofactor_normal(vertices: &[Vector], skip: usize) -> Vector {
    let m = vertices.len();
    let cols: Vec<&Vector> = vertices
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != skip)
        .map(|(_, v)| v)
        .collect();
    let normal = Vector::from_fn(m, |k, _| {
        let minor = Matrix::from_fn(m - 1, m - 1, |r, c| cols[c][if r < k { r } else { r + 1 }]);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign * minor.determinant()
    });
    let normal = normal.normalize();
    if normal.dot(&vertices[skip]) < 0.0 {
        -normal
    } else {
        normal
    }
}

/// Inscribed cap from facet normals: the point at equal angular distance
/// from every facet.
fn facet_incap(vertices: &[Vector]) -> (Vector, f64) {
    let m = vertices.len();
    let normals = Matrix::from_fn(m, m, |r, c| cofactor_normal(vertices, r)[c]);
    let x = normals.lu().solve(&Vector::from_element(m, 1.0)).unwrap();
    let center = x.normalize();
    (center, (1.0 / x.norm()).asin())
}

fn duality() -> Outcome {
    let mut worst_center = 0.0_f64;
    let mut worst_sum = 0.0_f64;
    let mut worst_oracle = 0.0_f64;
    for m in 3..=8 {
        let cfg = TrialConfig::new(m, 1_000, SEED + 300 + m as u64);
        for i in 0..cfg.trials as u64 {
            let s = gen_spherical(&cfg, i).unwrap();
            let outer = circum_cap(&s).unwrap();
            let polar = polar_simplex(&s).unwrap();
            let inner = inscribed_cap(&polar).unwrap();
            worst_center = worst_center.max(angle_between(&outer.center, &inner.center).unwrap());
            worst_sum =
                worst_sum.max((outer.angular_radius + inner.angular_radius - FRAC_PI_2).abs());
            let (oc, or) = facet_incap(polar.vertices());
            worst_oracle = worst_oracle
                .max(angle_between(&oc, &outer.center).unwrap())
                .max((or + outer.angular_radius - FRAC_PI_2).abs());
        }
    }
    outcome(
        worst_center <= 1e-9 && worst_sum <= 1e-9 && worst_oracle <= 1e-9,
        format!(
            "10^3 simplices per m 3..8: center gap {worst_center:.1e}, radius sum gap \
             {worst_sum:.1e}, facet oracle gap {worst_oracle:.1e}"
        ),
    )
}

fn lorentz() -> Outcome {
    let mut rng = trial_rng(SEED, 400);
    let mut worst = 0.0_f64;
    for _ in 0..10_000 {
        let k = rng.random_range(0.1..10.0);
        let f = LorentzFactors {
            k,
            l: k * rng.random_range(0.01..0.99),
            t: rng.random_range(-2.0..2.0),
            s: rng.random_range(-2.0..2.0),
        };
        let m = f.compose();
        let back = lorentz_svd(&m).unwrap();
        worst = worst.max(back.compose().max_abs_diff(&m) / m.frobenius_norm().max(1.0));
    }
    let swap_rejected = lorentz_svd(&Mat2::new(0.0, 1.0, 1.0, 0.0)).is_err();
    let mut worst_j = 0.0_f64;
    for _ in 0..100 {
        let x = rng.random_range(-2.0..2.0);
        let n = rng.random_range(2..8);
        let r = hyperbolic_rotation(x, n);
        let j = signature_matrix(n);
        worst_j = worst_j.max((&r * &j * &r - &j).amax());
    }
    outcome(
        worst <= 1e-10 && swap_rejected && worst_j <= 1e-12,
        format!(
            "10^4 reconstructions max rel error {worst:.1e}; swap rejected {swap_rejected}; \
             max |R J R − J| {worst_j:.1e}"
        ),
    )
}

fn limit_argument() -> Outcome {
    let tri =
        EuclideanSimplex::from_rows(&[vec![0.0, 0.0], vec![3.0, 0.0], vec![0.0, 4.0]]).unwrap();
    let tet = gen_euclidean(&TrialConfig::new(3, 1, SEED + 500), 0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, s) in [("3-4-5", tri), ("tetrahedron", tet)] {
        let table = convergence_table(&s, &default_heights(&s).unwrap()).unwrap();
        let ratios = table.slack_error_ratios();
        // ratios[0] compares 100R with 10R; the order is checked from 100R on
        let tail_ok = ratios[1..].iter().all(|r| (0.005..=0.02).contains(r));
        pass &= tail_ok && table.slack_error_decreasing();
        parts.push(format!(
            "{name}: ratios [{}]",
            ratios
                .iter()
                .map(|r| format!("{r:.5}"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    outcome(pass, parts.join("; "))
}

fn extremal() -> Outcome {
    let runs = extremal_batch(&TrialConfig::new(3, 10, SEED + 600), 2000).unwrap();
    let worst = runs
        .iter()
        .map(|r| r.best_slack)
        .fold(f64::NEG_INFINITY, f64::max);
    let monotone = runs
        .iter()
        .all(|r| r.trace.windows(2).all(|w| w[1] <= w[0]));
    outcome(
        worst < 1e-6 && monotone,
        format!("10 starts × 2000 iterations: worst best slack {worst:.2e}, monotone {monotone}"),
    )
}

fn main() -> ExitCode {
    let (cert, trace) = certificate_runs();
    let results = [
        ("1 Euler identity for triangles", euler_identity()),
        ("2 inequality on random simplices", egan_inequality()),
        ("3 equality cases", equality_cases()),
        ("4 spherical margin", cert),
        ("5 spherical Euler residual", spherical_euler()),
        ("6 polar duality", duality()),
        ("7 Lorentz decomposition", lorentz()),
        ("8 trace identity", trace),
        ("9 large-sphere limit", limit_argument()),
        ("10 extremal search", extremal()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
