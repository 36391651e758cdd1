//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints one PASS/FAIL line; exits nonzero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use opstft::heterodyne::{beat_amplitude, ideal_lo, mean_square_beat_conv, run_scan, run_scan_separable, Offsets, ScanGrid};
use opstft::phasespace::{
    conjugate_factors, invert_k_to_w, kirkwood_1d, kirkwood_4d, marginal, native_factors, relative_l2_4d, slice,
    wigner_1d, wigner_4d, Coord, Dist2D, Dist4D, SliceSpec,
};
use opstft::scenes::{lo_components, Scenario};
use opstft::{densify, make_axis, AliasPolicy, Complex64, ComplexField1D, SampledAxis, SeparableField, Unit};
use opstft_cli::{resolve, run, Overrides, ScenarioKind, MANIFEST_FILE};

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, id: &str, what: &str, ok: bool, detail: String) {
        println!("{} [{id}] {what}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures += 1;
        }
    }
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    (num / b.iter().map(|y| y * y).sum::<f64>()).sqrt()
}

fn rel_l2_c(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    (num / b.iter().map(|y| y.norm_sqr()).sum::<f64>()).sqrt()
}

fn unit_max(v: &[Complex64]) -> Vec<Complex64> {
    let m = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    v.iter().map(|z| z / m).collect()
}

fn scenarios(n: usize) -> Vec<(&'static str, SeparableField)> {
    vec![
        ("gaussian", Scenario::gaussian(n).unwrap().field().unwrap()),
        ("wire", Scenario::wire(n).unwrap().field().unwrap()),
        ("filter", Scenario::filter(n).unwrap().field().unwrap()),
    ]
}

fn intensity(a: &ComplexField1D, b: &ComplexField1D) -> Vec<f64> {
    a.values().iter().flat_map(|u| b.values().iter().map(move |v| u.norm_sqr() * v.norm_sqr())).collect()
}

fn marginals(r: &mut Report) {
    for (name, f) in scenarios(256) {
        let start = Instant::now();
        let w = wigner_4d(&f).unwrap();
        let (x, v) = native_factors(&f, AliasPolicy::Warn).unwrap();
        let (p, t) = conjugate_factors(&f, AliasPolicy::Warn).unwrap();
        let native = rel_l2(&marginal(&w, &[Coord::P, Coord::T]).unwrap().values, &intensity(&x, &v));
        let conj = rel_l2(&marginal(&w, &[Coord::X, Coord::Omega]).unwrap().values, &intensity(&p, &t));
        let took = start.elapsed();
        r.check(
            "1",
            &format!("marginals at 256/axis, {name}"),
            native <= 1e-6 && conj <= 1e-6 && took < Duration::from_secs(10),
            format!("native {native:.2e}, conjugate {conj:.2e} (tol 1e-6), {:.2} s (limit 10 s)", took.as_secs_f64()),
        );
    }
}

fn brute_force(r: &mut Report) {
    let f = |u: f64| Complex64::from_polar((-(u - 0.3).powi(2) / 2.0).exp(), 0.1 * u * u - 0.4 * u);
    let x = make_axis(0.0, 12.0, 32, Unit::Position).unwrap();
    let w = wigner_1d(&ComplexField1D::from_fn(x, f).unwrap()).unwrap();
    let step = x.step() / 8.0;
    let m = (24.0 / step).ceil() as i64;
    let mut direct = Vec::new();
    for u in x.samples() {
        for k in x.conjugate().samples() {
            let acc: Complex64 = (-m..=m)
                .map(|j| {
                    let e = j as f64 * step;
                    Complex64::from_polar(1.0, e * k) * f(u + e / 2.0).conj() * f(u - e / 2.0)
                })
                .sum();
            direct.push(acc * step / (2.0 * PI));
        }
    }
    let err = rel_l2_c(w.values(), &direct);
    r.check("2", "wigner_1d against direct Riemann sum, 32 points", err <= 1e-8, format!("{err:.2e} (tol 1e-8)"));
}

fn closed_forms(r: &mut Report) {
    let x = make_axis(0.0, 20.0, 129, Unit::Position).unwrap();
    let f = ComplexField1D::from_fn(x, |u| Complex64::new((-u * u / 2.0).exp(), 0.0)).unwrap();
    let centre = |d: &Dist2D| d.get(64, 64);
    let w0 = centre(&wigner_1d(&f).unwrap()).re;
    let k0 = centre(&kirkwood_1d(&f, AliasPolicy::Strict).unwrap());
    let (ew, ek) = ((w0 - 1.0 / PI.sqrt()).abs(), (k0 - 1.0 / (2.0 * PI).sqrt()).norm());
    r.check(
        "3",
        "unit-amplitude Gaussian W(0,0) = 1/sqrt(pi), K(0,0) = 1/sqrt(2 pi)",
        ew <= 1e-6 && ek <= 1e-6,
        format!("W error {ew:.2e}, K error {ek:.2e} (tol 1e-6)"),
    );
}

fn inversion(r: &mut Report) {
    for (name, f) in scenarios(64) {
        let start = Instant::now();
        let err = relative_l2_4d(&invert_k_to_w(&kirkwood_4d(&f).unwrap()).unwrap(), &wigner_4d(&f).unwrap()).unwrap();
        let took = start.elapsed();
        r.check(
            "4",
            &format!("Kirkwood-to-Wigner inversion at 64/axis, {name}"),
            err <= 1e-3 && took < Duration::from_secs(60),
            format!("{err:.2e} (tol 1e-3), {:.2} s (limit 60 s)", took.as_secs_f64()),
        );
    }
}

fn gaussian(axis: SampledAxis, p: [f64; 4]) -> ComplexField1D {
    let [sigma, centre, chirp, tilt] = p;
    ComplexField1D::from_fn(axis, |u| {
        Complex64::from_polar((-(u - centre).powi(2) / (2.0 * sigma * sigma)).exp(), chirp * u * u + tilt * u)
    })
    .unwrap()
    .normalized()
}

fn pair(n: usize, xs: [f64; 4], ws: [f64; 4]) -> SeparableField {
    let x = make_axis(0.0, 14.0, n, Unit::Position).unwrap();
    let w = make_axis(0.0, 14.0, n, Unit::Frequency).unwrap();
    SeparableField::new(gaussian(x, xs), gaussian(w, ws)).unwrap()
}

fn forward_model(r: &mut Report) {
    let lo = pair(48, [0.9, 0.2, 0.05, 0.3], [1.1, -0.1, 0.0, -0.2]);
    let sig = pair(48, [0.7, -0.1, 0.1, -0.2], [0.8, 0.2, 0.08, 0.1]);
    let (lw, sw) = (wigner_4d(&lo).unwrap(), wigner_4d(&sig).unwrap());
    let (ld, sd) = (densify(&lo).unwrap(), densify(&sig).unwrap());
    let offsets = [-0.8, -0.4, 0.0, 0.4, 0.8];
    let mut worst: f64 = 0.0;
    for &dx in &offsets {
        for &dp in &offsets {
            for &dw in &offsets {
                for &tau in &offsets {
                    let off = Offsets::new(dx, dp, dw, tau);
                    let direct = beat_amplitude(&ld, &sd, off, 1.5).unwrap().norm_sqr();
                    let conv = mean_square_beat_conv(&lw, &sw, off, 1.5).unwrap();
                    worst = worst.max((conv - direct).abs() / direct);
                }
            }
        }
    }
    r.check("5", "|beat|^2 against Wigner convolution over 5^4 offsets", worst <= 1e-4, format!("worst relative {worst:.2e} (tol 1e-4)"));
}

fn index(axis: &SampledAxis, v: f64) -> usize {
    axis.nearest(v, "coordinate").unwrap().0
}

fn xp_plane(get: impl Fn(usize, usize) -> Complex64, n1: usize, n2: usize) -> Vec<Complex64> {
    (0..n1 * n2).map(|k| get(k / n2, k % n2)).collect()
}

fn measurement(r: &mut Report) {
    let n = 65;
    let f = Scenario::wire(n).unwrap().field().unwrap();
    let (x, v) = native_factors(&f, AliasPolicy::Strict).unwrap();
    let (x, v) = (*x.axis(), *v.axis());
    let lo = lo_components(&ideal_lo(&x, &v), x, v).unwrap();
    let k = kirkwood_4d(&f).unwrap();
    let (model, _) = slice(&k, &SliceSpec::new(Coord::Omega, 0.0, Coord::T, 0.0).unwrap()).unwrap();
    let model = unit_max(model.values());

    let grid = ScanGrid::matching(&x, &v, 2.5).unwrap();
    let scan = run_scan_separable(&lo, &f, &grid).unwrap();
    let (iw, it) = (index(&v, 0.0), index(&v.conjugate(), 0.0));
    let sep = unit_max(&xp_plane(|i, l| scan.get([i, l, iw, it]), n, n));

    // The dense path on a (dx, dp) plane with three (dω, τ) offsets each.
    let dw = make_axis(0.0, 2.0 * v.step(), 3, Unit::Frequency).unwrap();
    let tau = make_axis(0.0, 2.0 * v.conjugate().step(), 3, Unit::Time).unwrap();
    let plane = ScanGrid::new(x, *grid.dp_axis(), dw, tau, 2.5).unwrap();
    let dense = run_scan(&lo, &densify(&f).unwrap(), &plane).unwrap();
    let dense = unit_max(&xp_plane(|i, l| dense.get([i, l, 1, 1]), n, n));

    let (es, ed) = (rel_l2_c(&sep, &model), rel_l2_c(&dense, &model));
    r.check(
        "6",
        "wire scan over (dx, dp) against K(x,p,0,0), unit-max normalized",
        es <= 1e-3 && ed <= 1e-3,
        format!("separable {es:.2e}, dense {ed:.2e} (tol 1e-3)"),
    );

    let ix0 = index(&x, 0.0);
    let ip0 = index(&x.conjugate(), 0.0);
    let peak = scan.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let nw = v.len();
    let zero = (0..nw * nw).map(|kq| scan.get([ix0, ip0, kq / nw, kq % nw]).norm()).fold(0.0, f64::max) / peak;
    r.check("7", "wire scan S(0,0,omega,t) vanishes", zero < 1e-10, format!("{zero:.2e} of scan max (tol 1e-10)"));
}

fn sign_changes(values: impl Iterator<Item = f64>, floor: f64) -> usize {
    let s: Vec<f64> = values.filter(|v| v.abs() > floor).map(f64::signum).collect();
    s.windows(2).filter(|w| w[0] != w[1]).count()
}

fn at(d: &Dist4D, v: [f64; 4]) -> f64 {
    let axes = d.axes();
    d.get([0, 1, 2, 3].map(|c| index(&axes[c], v[c]))).re
}

fn structure(r: &mut Report) {
    let f = Scenario::wire(256).unwrap().field().unwrap();
    let (k, w) = (kirkwood_4d(&f).unwrap(), wigner_4d(&f).unwrap());
    let (kz, _) = slice(&k, &SliceSpec::new(Coord::X, 0.0, Coord::P, 0.0).unwrap()).unwrap();
    let ratio = kz.max_abs() / k.max_abs();
    let (w0, w2) = (at(&w, [0.0; 4]), at(&w, [0.0, 2.0, 0.0, 0.0]));
    let (fringe, _) = slice(&w, &SliceSpec::new(Coord::Omega, 0.0, Coord::T, 0.0).unwrap()).unwrap();
    let ix = index(fringe.axis1(), 0.0);
    let np = fringe.shape().1;
    let changes = sign_changes((0..np).map(|l| fringe.get(ix, l).re), 1e-6 * w.max_abs());
    r.check(
        "7",
        "wire: K(0,0,omega,t) = 0, W(0,0,0,0) > 0, W(0,2,0,0) < 0, fringes along p",
        ratio < 1e-10 && w0 > 0.0 && w2 < 0.0 && changes >= 3,
        format!("|K| ratio {ratio:.1e}, W0 {w0:.3e}, W(p=2) {w2:.3e}, {changes} sign changes"),
    );

    let f = Scenario::filter(256).unwrap().field().unwrap();
    let (k, w) = (kirkwood_4d(&f).unwrap(), wigner_4d(&f).unwrap());
    let (kz, _) = slice(&k, &SliceSpec::new(Coord::Omega, 0.0, Coord::T, 0.0).unwrap()).unwrap();
    let ratio = kz.max_abs() / k.max_abs();
    let (w0, w3) = (at(&w, [0.0; 4]), at(&w, [0.0, 0.0, 0.0, 3.0]));
    let (fringe, _) = slice(&w, &SliceSpec::new(Coord::X, 0.0, Coord::P, 0.0).unwrap()).unwrap();
    let iw = index(fringe.axis1(), 0.0);
    let nt = fringe.shape().1;
    let changes = sign_changes((0..nt).map(|q| fringe.get(iw, q).re), 1e-6 * w.max_abs());
    r.check(
        "7",
        "filter: K(x,p,0,0) = 0, W(0,0,0,0) > 0, W(0,0,0,3) < 0, fringes along t",
        ratio < 1e-10 && w0 > 0.0 && w3 < 0.0 && changes >= 3,
        format!("|K| ratio {ratio:.1e}, W0 {w0:.3e}, W(t=3) {w3:.3e}, {changes} sign changes"),
    );
}

fn positivity(r: &mut Report, scratch: &Path) {
    // The default 16-unit time window cuts σ_t = 2 at 4σ; this one reaches 7σ.
    let text = "[grid]\nspan_x = 12.0\nspan_2 = 28.0\n";
    let cfg = resolve(Some(ScenarioKind::Custom), text, &Overrides::default()).unwrap();
    let m = run(&cfg, &scratch.join("positivity")).unwrap();
    let ratio = m.invariants.wigner_min_over_max;
    let marg = m.invariants.marginal_residual_native.max(m.invariants.marginal_residual_conjugate);
    r.check(
        "8",
        "unchirped Gaussian min W >= -1e-9 max W (custom run, 256/axis)",
        ratio >= -1e-9 && marg < 1e-6,
        format!("min/max {ratio:.2e}, marginal residual {marg:.2e}"),
    );
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            let name = e.file_name().into_string().unwrap();
            let mut bytes = fs::read(e.path()).unwrap();
            if name == MANIFEST_FILE {
                let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
                v.as_object_mut().unwrap().remove("timings_ms");
                bytes = serde_json::to_vec(&v).unwrap();
            }
            (name, bytes)
        })
        .collect();
    files.sort();
    files
}

fn determinism(r: &mut Report, scratch: &Path) {
    let over = Overrides { heatmaps: true, ..Overrides::default() };
    let cfg = resolve(Some(ScenarioKind::Wire), "", &over).unwrap();
    let (a, b) = (scratch.join("wire_a"), scratch.join("wire_b"));
    run(&cfg, &a).unwrap();
    run(&cfg, &b).unwrap();
    let (sa, sb) = (snapshot(&a), snapshot(&b));
    let csv = sa.iter().filter(|(n, _)| n.ends_with(".csv")).count();
    r.check(
        "9",
        "two wire preset runs are byte-identical (timings excluded)",
        sa == sb && csv > 0,
        format!("{} files compared, {csv} CSV", sa.len()),
    );
}

fn main() -> ExitCode {
    let scratch = tempfile::tempdir().unwrap();
    let mut r = Report { failures: 0 };
    marginals(&mut r);
    brute_force(&mut r);
    closed_forms(&mut r);
    inversion(&mut r);
    forward_model(&mut r);
    measurement(&mut r);
    structure(&mut r);
    positivity(&mut r, scratch.path());
    determinism(&mut r, scratch.path());
    if r.failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} check(s) failed", r.failures);
        ExitCode::FAILURE
    }
}
