//! End-to-end acceptance checks. Run with `--nocapture` to see the table.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use hfio_core::decoupling::{circle_count, CapSystem};
use hfio_core::experiments::{
    focusing_wolff, make_family, propagation_experiment, sharpness_experiment, wolff_verdict, FocusTiming,
    PacketFamilySpec,
};
use hfio_core::fio::phase::zpt;
use hfio_core::fio::{curvature_check, PhaseSpec, DEFAULT_RANK_THRESHOLD};
use hfio_core::norms::{atom_check, canonical_atom, discrete_annulus_norm, hfio_norm, AtomDescriptor};
use hfio_core::profile::AnnulusProfile;
use hfio_core::spectral::{apply_multiplier, lp_norm, PeriodicGrid, SampledField};
use hfio_core::torus::{chart_directions, hfio_norm_torus, nlw_picard, random_data, NlwConfig, TorusAtlas};
use hfio_core::wavepacket::{phi_omega, reproducing_multiplier, DirectionSet, WavePacketFrame};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    hi / lo
}

fn relative_l2(a: &SampledField, b: &SampledField) -> f64 {
    let num: f64 = a.data.iter().zip(&b.data).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.data.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

fn random_point<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> [f64; 3] {
    loop {
        let mut v = [0.0; 3];
        for x in v.iter_mut().take(n) {
            *x = rng.gen_range(-hi..hi);
        }
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r >= lo && r <= hi {
            return v;
        }
    }
}

fn partition_of_unity() -> Outcome {
    let start = Instant::now();
    let prof = AnnulusProfile::default();
    let mut radial = 0.0f64;
    for j in 0..100 {
        let r = (8.0 * j as f64 / 99.0).exp2();
        radial = radial.max((prof.partition_value(r) - 1.0).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut caps = 0.0f64;
    let mut w = Vec::new();
    for (n, ks) in [(2usize, 0..=10u32), (3, 0..=6)] {
        for k in ks {
            let sys = CapSystem::build(k, n).unwrap();
            let band = (k as f64).exp2();
            for _ in 0..200 {
                let xi = random_point(n, 0.5 * band, 2.0 * band, &mut rng);
                sys.weights_at(&xi, &mut w);
                caps = caps.max((w.iter().map(|x| x.1).sum::<f64>() - 1.0).abs());
            }
        }
    }
    let mut windows = 0.0f64;
    for (n, size, per_axis) in [(2usize, 128usize, 4usize), (2, 128, 8), (3, 32, 4)] {
        let a = TorusAtlas::uniform(n, 2.0 * PI, size, per_axis).unwrap();
        let mut sum = vec![0.0; a.grid.len()];
        for c in 0..a.len() {
            for (s, v) in sum.iter_mut().zip(&a.window(c).data) {
                *s += v.norm_sqr();
            }
        }
        windows = windows.max(sum.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max));
    }
    let t = start.elapsed();
    Outcome {
        pass: radial <= 1e-8 && caps <= 1e-10 && windows <= 1e-10 && t < Duration::from_secs(10),
        detail: format!("radial {radial:.1e}, caps {caps:.1e}, windows {windows:.1e}, {:.1}s", t.as_secs_f64()),
    }
}

fn reproducing_formula() -> Outcome {
    let start = Instant::now();
    let frame = WavePacketFrame::standard(2).unwrap();
    let grid = PeriodicGrid::new(2, 256, 2.0 * PI).unwrap();
    let dirs = DirectionSet::for_band(2, 32.0).unwrap();
    let m = reproducing_multiplier(&frame, &dirs, 32.0).unwrap();
    let phis: Vec<_> = dirs.nodes.iter().map(|w| phi_omega(&frame, *w).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let f = SampledField::random_annulus(grid, 1.0, 32.0, &mut rng).unwrap();
        let mut g = SampledField::zeros(grid);
        for (phi, w) in phis.iter().zip(&dirs.weights) {
            g.axpy(Complex64::new(*w, 0.0), &apply_multiplier(&f, phi)).unwrap();
        }
        worst = worst.max(relative_l2(&apply_multiplier(&g, &m), &f));
    }
    let t = start.elapsed();
    Outcome {
        pass: worst <= 1e-3 && t < Duration::from_secs(120),
        detail: format!("max relative error {worst:.1e} over 20 fields, {} directions, {:.1}s", dirs.len(), t.as_secs_f64()),
    }
}

fn l2_equivalence() -> Outcome {
    let frame = WavePacketFrame::standard(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut plane, mut torus) = (Vec::new(), Vec::new());
    for k in 3..=7u32 {
        let r = (k as f64).exp2();
        let grid = PeriodicGrid::for_band(2, 2.0 * PI, 1.5 * r, 0.05).unwrap();
        let atlas = TorusAtlas::uniform(2, grid.period(), grid.size(), 4).unwrap();
        let chart_dirs = chart_directions(&atlas).unwrap();
        let dirs = DirectionSet::for_band(2, 1.5 * r).unwrap();
        for _ in 0..10 {
            let f = SampledField::random_annulus(grid, 0.75 * r, 1.5 * r, &mut rng).unwrap();
            let l2 = lp_norm(&f, 2.0).unwrap();
            plane.push(hfio_norm(&f, 0.0, 2.0, &frame, &dirs).unwrap() / l2);
            torus.push(hfio_norm_torus(&f, 0.0, 2.0, &atlas, &frame, &chart_dirs).unwrap() / l2);
        }
    }
    let (a, b) = (spread(&plane), spread(&torus));
    Outcome { pass: a <= 4.0 && b <= 4.0, detail: format!("spread {a:.3} on the plane, {b:.3} on the torus, 50 fields each") }
}

fn cap_counts() -> Outcome {
    let mut bad = Vec::new();
    for k in 0..=10u32 {
        let delta = (-0.5 * k as f64).exp2();
        // largest N with pi / N >= asin(delta / 2)
        let oracle = (PI / (0.5 * delta).asin() + 1e-9).floor() as usize;
        if circle_count(delta) != oracle || CapSystem::build(k, 2).unwrap().len() != oracle {
            bad.push(k);
        }
    }
    let fixed = circle_count(1.0) == 6 && circle_count(0.25) == 25;
    Outcome { pass: bad.is_empty() && fixed, detail: format!("mismatched levels {bad:?}, k=0 gives {}, k=4 gives {}", circle_count(1.0), circle_count(0.25)) }
}

fn discrete_equivalence() -> Outcome {
    let frame = WavePacketFrame::standard(2).unwrap();
    let mut ratios = Vec::new();
    for spec in [PacketFamilySpec::focusing(2), PacketFamilySpec::unit_scale(2)] {
        for k in 3..=7u32 {
            let fam = make_family(&spec, k).unwrap();
            let caps = CapSystem::build(k, 2).unwrap();
            let dirs = DirectionSet::for_band(2, spec.band(k)).unwrap();
            for p in [4.0, 6.0] {
                let s = 0.5 * (0.5 - 1.0 / p);
                let d = discrete_annulus_norm(&fam.field, k, p, &caps).unwrap();
                ratios.push(d / hfio_norm(&fam.field, -s, p, &frame, &dirs).unwrap());
            }
        }
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    Outcome { pass: spread(&ratios) <= 4.0, detail: format!("ratios in [{lo:.3}, {hi:.3}], spread {:.3}", spread(&ratios)) }
}

fn sharpness() -> Outcome {
    let start = Instant::now();
    let frame = WavePacketFrame::standard(2).unwrap();
    let f = sharpness_experiment(&PacketFamilySpec::focusing(2), 0.0, 6.0, &frame).unwrap();
    let u = sharpness_experiment(&PacketFamilySpec::unit_scale(2), 0.0, 6.0, &frame).unwrap();
    let t = start.elapsed();
    Outcome {
        pass: f.pass && u.pass && f.predicted.abs() < 1e-12 && (u.predicted - 0.25).abs() < 1e-12 && t < Duration::from_secs(600),
        detail: format!(
            "focusing {:.3} (res {:.3}), unit-scale {:.3} (res {:.3}), {:.0}s",
            f.slope,
            f.residual,
            u.slope,
            u.residual,
            t.as_secs_f64()
        ),
    }
}

fn decoupling_ladder() -> Outcome {
    let frame = WavePacketFrame::standard(2).unwrap();
    let r = focusing_wolff(&PacketFamilySpec::focusing(2), 6.0, 0.1, &FocusTiming::default(), &frame).unwrap();
    let dec = r.dec_slope.as_ref().map_or(f64::NAN, |f| f.slope);
    let hf = r.hfio_slope.as_ref().map_or(f64::NAN, |f| f.slope);
    Outcome {
        pass: wolff_verdict(&r) && dec <= r.d + 0.1 + 0.1 + 1e-12 && hf <= 0.1,
        detail: format!("decoupling slope {dec:.3} (bound {:.3}), FIO-norm slope {hf:.3}", r.slope_bound),
    }
}

fn propagation() -> Outcome {
    let frame = WavePacketFrame::standard(2).unwrap();
    let r = propagation_experiment(&PacketFamilySpec::focusing(2), &[4.0, 6.0], &[0.1, 0.5, 1.0], 4.0, 0.1, &frame).unwrap();
    let worst = r.cases.iter().map(|c| c.hfio_spread).fold(0.0, f64::max);
    let flattest = r.cases.iter().map(|c| c.lp_slope.slope).fold(f64::INFINITY, f64::min);
    let pass = r.pass && r.cases.len() == 6 && worst <= 4.0 && flattest >= 0.1;
    Outcome { pass, detail: format!("max FIO-norm spread {worst:.3}, min Lebesgue slope {flattest:.3}") }
}

fn curvature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pass = true;
    let mut detail = Vec::new();
    for n in [2usize, 3] {
        let samples: Vec<_> = (0..100)
            .map(|_| {
                let x = random_point(n, 0.0, 0.5, &mut rng);
                let t = rng.gen_range(-0.5..0.5);
                (zpt(&x, t, n), random_point(n, 0.5, 2.0, &mut rng))
            })
            .collect();
        let flat = curvature_check(PhaseSpec::Flat.build(n).unwrap().as_ref(), &samples, DEFAULT_RANK_THRESHOLD).unwrap();
        let wave = curvature_check(PhaseSpec::HalfWave.build(n).unwrap().as_ref(), &samples, DEFAULT_RANK_THRESHOLD).unwrap();
        let flat_ok = !flat.cinematic && flat.samples.iter().all(|s| s.mixed_rank == n && s.second_rank == 0);
        let sv = wave.min_retained_singular_value.unwrap_or(0.0);
        let wave_ok = wave.cinematic && sv >= 1e-6 && wave.samples.iter().all(|s| s.mixed_rank == n && s.second_rank == n - 1);
        pass &= flat_ok && wave_ok;
        detail.push(format!("n={n}: flat {flat_ok}, half-wave {wave_ok} (min singular value {sv:.3})"));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn nonlinear_wave() -> Outcome {
    let grid = PeriodicGrid::new(2, 32, 2.0 * PI).unwrap();
    let (f1, f2) = random_data(grid, 6.0, 0.01, &mut ChaCha8Rng::seed_from_u64(10)).unwrap();
    let cfg = NlwConfig::default();
    let r = nlw_picard(&f1, &f2, &cfg).unwrap().report;
    let fine = nlw_picard(&f1, &f2, &NlwConfig { nodes: 2 * cfg.nodes - 1, ..cfg }).unwrap().report;
    let change = (fine.s_norm - r.s_norm).abs() / r.s_norm;
    let pass = !r.diverged
        && r.iterations <= 10
        && r.residual <= 1e-6
        && r.contraction_factors.iter().all(|c| *c < 1.0)
        && r.energy_drift <= 0.01
        && change <= 0.01;
    Outcome {
        pass,
        detail: format!(
            "{} iterations, residual {:.1e}, drift {:.1e}, refinement change {change:.1e}",
            r.iterations, r.residual, r.energy_drift
        ),
    }
}

fn atlas_independence() -> Outcome {
    let frame = WavePacketFrame::standard(2).unwrap();
    let coarse = TorusAtlas::uniform(2, 2.0 * PI, 128, 4).unwrap();
    let fine = TorusAtlas::uniform(2, 2.0 * PI, 128, 8).unwrap();
    let (dc, df) = (chart_directions(&coarse).unwrap(), chart_directions(&fine).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut pq = 0.0f64;
    let mut ratios = Vec::new();
    for k in 2..=5u32 {
        let r = (k as f64).exp2();
        for _ in 0..2 {
            let u = SampledField::random_annulus(coarse.grid, 0.75 * r, 1.5 * r, &mut rng).unwrap();
            for a in [&coarse, &fine] {
                pq = pq.max(relative_l2(&a.p_assemble(&a.q_restrict(&u).unwrap()).unwrap(), &u));
            }
            for p in [2.0, 4.0] {
                let x = hfio_norm_torus(&u, 0.0, p, &coarse, &frame, &dc).unwrap();
                let y = hfio_norm_torus(&u, 0.0, p, &fine, &frame, &df).unwrap();
                ratios.push(x / y);
            }
        }
    }
    let s = spread(&ratios);
    Outcome { pass: pq <= 1e-10 && s <= 4.0, detail: format!("PQ error {pq:.1e}, two-atlas ratio spread {s:.3}") }
}

fn atoms() -> Outcome {
    let grid = PeriodicGrid::new(2, 256, 4.0).unwrap();
    let list = [
        AtomDescriptor { y: [0.3, -0.2, 0.0], nu: [0.8, 0.6, 0.0], tau: 0.25, s: 0.5 },
        AtomDescriptor { y: [-1.0, 0.5, 0.0], nu: [0.0, 1.0, 0.0], tau: 0.1, s: 1.0 },
        AtomDescriptor { y: [0.0, 0.0, 0.0], nu: [1.0, 0.0, 0.0], tau: 0.5, s: 0.0 },
    ];
    let run = || {
        let mut pass = true;
        let mut reports = Vec::new();
        for a in &list {
            let f = canonical_atom(grid, a, 0.9).unwrap();
            let mut g = f.clone();
            g.scale(Complex64::new(10.0, 0.0));
            let (rf, rg) = (atom_check(&f, a).unwrap(), atom_check(&g, a).unwrap());
            pass &= rf.pass && rg.support_pass && !rg.norm_pass;
            reports.push(serde_json::to_string(&(rf, rg)).unwrap());
        }
        (pass, reports)
    };
    let (pass, first) = run();
    let (_, second) = run();
    let same = first == second;
    Outcome { pass: pass && same, detail: format!("{} atoms, verdicts {pass}, deterministic {same}", list.len()) }
}

#[test]
fn acceptance() {
    let checks: [(&str, fn() -> Outcome); 12] = [
        ("partition of unity", partition_of_unity),
        ("reproducing formula", reproducing_formula),
        ("L2 equivalence", l2_equivalence),
        ("cap counts", cap_counts),
        ("discrete norm equivalence", discrete_equivalence),
        ("sharpness slopes", sharpness),
        ("decoupling ladder", decoupling_ladder),
        ("half-wave propagation", propagation),
        ("curvature", curvature),
        ("cubic wave equation", nonlinear_wave),
        ("atlas independence", atlas_independence),
        ("atoms", atoms),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:2} {verdict} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria {failed:?}");
}

