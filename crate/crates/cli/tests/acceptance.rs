//! Acceptance gate for the toolkit. Each test covers one release criterion
//! and prints a single pass/fail line; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qparity::antenna::{
    coupling_efficiency, invert_t_star, junction_impedance, parity_rate_from_blackbody,
    synthetic, BlackbodySource, EfficiencyCurve,
};
use qparity::fit::fit_parity_rate;
use qparity::protocol::{run_parity_monitor, run_shot, SequenceParams};
use qparity::qp::{
    fit_trapping_rate, integrate_rt, vortex_threshold_ut, xqp_from_gamma1, GapParams, Injection,
    RtParams,
};
use qparity::spectrum::estimate_psd;
use qparity::telegraph::{apply_readout_infidelity, simulate_telegraph};
use qparity::transmon::{dispersion_curve, fit_ej_ec};

fn criterion(number: usize, name: &str, check: impl FnOnce() -> Result<(), String>) {
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed().as_secs_f64();
    match result {
        Ok(()) => println!("criterion {number} ({name}): pass [{elapsed:.1} s]"),
        Err(why) => {
            println!("criterion {number} ({name}): FAIL [{elapsed:.1} s] {why}");
            panic!("criterion {number} ({name}) failed: {why}");
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    values[values.len() / 2]
}

/// Simulate, apply readout errors, Welch, fit; returns (rate, floor).
fn telegraph_pipeline(rate: f64, fidelity: f64, seed: u64) -> Result<(f64, f64), String> {
    let trace = simulate_telegraph(rate, 1e-3, 0.5, seed).map_err(|e| e.to_string())?;
    let trace = if fidelity < 1.0 {
        apply_readout_infidelity(&trace, fidelity, seed + 10_000).map_err(|e| e.to_string())?
    } else {
        trace
    };
    let spectrum = estimate_psd(&trace, 250, 0.5).map_err(|e| e.to_string())?;
    let fit = fit_parity_rate(&spectrum, None).map_err(|e| e.to_string())?;
    Ok((fit.rate, fit.c))
}

#[test]
fn criterion_1_telegraph_roundtrip() {
    criterion(1, "telegraph roundtrip", || {
        let start = Instant::now();
        for rate in [17.5, 33.3, 100.0] {
            let mut rates = Vec::with_capacity(100);
            for seed in 0..100 {
                rates.push(telegraph_pipeline(rate, 0.9, seed)?.0);
            }
            let med = median(&mut rates);
            if (med - rate).abs() / rate > 0.15 {
                return Err(format!("median rate {med} vs truth {rate}"));
            }
        }
        let mut floors_ideal = Vec::new();
        let mut floors_090 = Vec::new();
        for seed in 0..100 {
            floors_ideal.push(telegraph_pipeline(33.3, 1.0, seed)?.1);
            floors_090.push(telegraph_pipeline(33.3, 0.9, seed)?.1);
        }
        let (c_ideal, c_090) = (median(&mut floors_ideal), median(&mut floors_090));
        if c_090 <= c_ideal {
            return Err(format!("floor C(F=0.9) = {c_090} not above C(F=1) = {c_ideal}"));
        }
        if start.elapsed().as_secs() >= 60 {
            return Err(format!("runtime {:?} exceeds 1 min", start.elapsed()));
        }
        Ok(())
    });
}

#[test]
fn criterion_2_dispersion_reproduction() {
    criterion(2, "dispersion reproduction", || {
        let start = Instant::now();
        for (f01_bar, ratio, lo, hi) in [(4.15, 28.0, 0.30, 0.50), (3.41, 18.0, 3.2, 5.4)] {
            let params = fit_ej_ec(f01_bar, ratio).map_err(|e| e.to_string())?;
            let curve = dispersion_curve(&params, 51).map_err(|e| e.to_string())?;
            let df = curve.delta_f_max_mhz;
            if !(lo..=hi).contains(&df) {
                return Err(format!(
                    "delta_f_max {df} MHz outside [{lo}, {hi}] at ratio {ratio}"
                ));
            }
        }
        if start.elapsed().as_secs_f64() >= 1.0 {
            return Err(format!("runtime {:?} exceeds 1 s", start.elapsed()));
        }
        Ok(())
    });
}

#[test]
fn criterion_3_rt_ode_oracles() {
    criterion(3, "Rothwarf-Taylor oracles", || {
        let start = Instant::now();
        let grid: Vec<f64> = (1..=200).map(|k| k as f64 * 2e-6).collect();
        let x0 = 1e-6;

        let s = 6.52e3;
        let trapping = RtParams {
            r: 0.0,
            s,
            g_background: 0.0,
            injection: Injection::Jump { x0, at: 0.0 },
        };
        let trace = integrate_rt(&trapping, &grid).map_err(|e| e.to_string())?;
        for (&t, &x) in trace.times.iter().zip(&trace.x_qp) {
            let exact = x0 * (-s * t).exp();
            if ((x - exact) / exact).abs() > 1e-8 {
                return Err(format!("trapping mismatch at t = {t}: {x} vs {exact}"));
            }
        }
        let fit = fit_trapping_rate(&trace).map_err(|e| e.to_string())?;
        if ((fit.s - s) / s).abs() > 1e-10 {
            return Err(format!("noiseless fitted s = {} vs {s}", fit.s));
        }

        let r = 1e9;
        let recombination = RtParams {
            r,
            s: 0.0,
            g_background: 0.0,
            injection: Injection::Jump { x0, at: 0.0 },
        };
        let trace = integrate_rt(&recombination, &grid).map_err(|e| e.to_string())?;
        for (&t, &x) in trace.times.iter().zip(&trace.x_qp) {
            let exact = x0 / (1.0 + r * x0 * t);
            if ((x - exact) / exact).abs() > 1e-8 {
                return Err(format!("recombination mismatch at t = {t}: {x} vs {exact}"));
            }
        }
        if start.elapsed().as_secs_f64() >= 1.0 {
            return Err(format!("runtime {:?} exceeds 1 s", start.elapsed()));
        }
        Ok(())
    });
}

#[test]
fn criterion_4_density_conversion() {
    criterion(4, "decay-rate to density conversion", || {
        let gap = GapParams::new(200.0, 4.15).map_err(|e| e.to_string())?;
        let x = xqp_from_gamma1(1e4, &gap).map_err(|e| e.to_string())?;
        // Hand value: sqrt(pi * 1.054571817e-34 / (4 * 4.15e9 * 200e-6 *
        // 1.602176634e-19)) * 1e4.
        let hand = 2.495679306800928e-7;
        if ((x - hand) / hand).abs() > 0.01 {
            return Err(format!("x_qp = {x} vs hand value {hand}"));
        }
        Ok(())
    });
}

#[test]
fn criterion_5_coupling_and_blackbody() {
    criterion(5, "coupling efficiency and blackbody integral", || {
        let start = Instant::now();
        let rcsj = synthetic::default_rcsj();

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let z_rad = Complex64::new(
                10f64.powf(rng.gen_range(-1.0..4.0)),
                if rng.gen() { 1.0 } else { -1.0 } * 10f64.powf(rng.gen_range(-1.0..4.0)),
            );
            let f = rng.gen_range(80e9..800e9);
            let z_j = junction_impedance(&rcsj, f).map_err(|e| e.to_string())?;
            let e_c = coupling_efficiency(z_rad, z_j).map_err(|e| e.to_string())?;
            if !(0.0..=1.0).contains(&e_c) {
                return Err(format!("e_c = {e_c} out of [0, 1] at z_rad = {z_rad}"));
            }
        }

        let z_j = junction_impedance(&rcsj, 150e9).map_err(|e| e.to_string())?;
        let matched = coupling_efficiency(z_j.conj(), z_j).map_err(|e| e.to_string())?;
        if (matched - 1.0).abs() > 1e-12 {
            return Err(format!("conjugate match e_c = {matched}"));
        }

        // Quadrature against a 1e6-point midpoint Riemann oracle.
        let curve = EfficiencyCurve::from_impedance(&synthetic::xmon_like(), &rcsj)
            .map_err(|e| e.to_string())?;
        let source = BlackbodySource::new(0.35, 96.7e9, 400e9).map_err(|e| e.to_string())?;
        let quad = parity_rate_from_blackbody(&curve, &source, 1.0).map_err(|e| e.to_string())?;
        let n = 1_000_000;
        let df = (source.f_max - source.f_min) / n as f64;
        let riemann: f64 = (0..n)
            .map(|i| {
                let f = source.f_min + (i as f64 + 0.5) * df;
                curve.at(f) * qparity::antenna::bose_occupancy(f, source.t_star)
            })
            .sum::<f64>()
            * df;
        if ((quad - riemann) / riemann).abs() > 1e-6 {
            return Err(format!("quadrature {quad} vs Riemann {riemann}"));
        }

        for t_star in [0.342, 0.356] {
            let src = BlackbodySource::new(t_star, 96.7e9, 400e9).map_err(|e| e.to_string())?;
            let rate = parity_rate_from_blackbody(&curve, &src, 1.0).map_err(|e| e.to_string())?;
            let back =
                invert_t_star(rate, &curve, 96.7e9, 400e9, 1.0).map_err(|e| e.to_string())?;
            if (back - t_star).abs() > 1e-4 {
                return Err(format!("roundtrip {back} K vs {t_star} K"));
            }
        }
        if start.elapsed().as_secs() >= 10 {
            return Err(format!("runtime {:?} exceeds 10 s", start.elapsed()));
        }
        Ok(())
    });
}

#[test]
fn criterion_6_protocol_contrast() {
    criterion(6, "protocol contrast and pipeline recovery", || {
        let start = Instant::now();
        let ideal = SequenceParams {
            delta_f: 4e5,
            drive_detuning: 0.0,
            wait_time: 1.0 / (4.0 * 4e5),
            fidelity: 1.0,
            t1: 1e6,
            reset_wait_multiplier: 10.0,
        };
        for seed in 0..128 {
            let odd = run_shot(qparity::transmon::Parity::Odd, &ideal, seed)
                .map_err(|e| e.to_string())?;
            let even = run_shot(qparity::transmon::Parity::Even, &ideal, seed)
                .map_err(|e| e.to_string())?;
            if odd != 1 || even != 0 {
                return Err(format!("seed {seed}: odd -> {odd}, even -> {even}"));
            }
        }

        // Device-like settings: F = 0.9, T1 = 50 us.
        let params = SequenceParams::nominal(4e5, 0.9, 50e-6).map_err(|e| e.to_string())?;
        for rate in [17.2, 17.5, 33.3, 37.0] {
            let mut rates = Vec::with_capacity(100);
            for seed in 0..100 {
                let trace =
                    run_parity_monitor(rate, &params, 1e-3, 0.5, seed).map_err(|e| e.to_string())?;
                let spectrum = estimate_psd(&trace, 250, 0.5).map_err(|e| e.to_string())?;
                rates.push(fit_parity_rate(&spectrum, None).map_err(|e| e.to_string())?.rate);
            }
            let med = median(&mut rates);
            if (med - rate).abs() / rate > 0.20 {
                return Err(format!("median recovered rate {med} vs truth {rate}"));
            }
        }
        if start.elapsed().as_secs() >= 120 {
            return Err(format!("runtime {:?} exceeds 2 min", start.elapsed()));
        }
        Ok(())
    });
}

#[test]
fn criterion_7_vortex_threshold() {
    criterion(7, "vortex expulsion threshold", || {
        let b = vortex_threshold_ut(10.0).map_err(|e| e.to_string())?;
        if (b - 20.7).abs() > 0.05 {
            return Err(format!("threshold {b} uT vs 20.7 uT"));
        }
        if (b - 21.0).abs() / 21.0 > 0.02 {
            return Err(format!("threshold {b} uT not within 2% of 21 uT"));
        }
        Ok(())
    });
}

#[test]
fn criterion_8_cli_determinism() {
    criterion(8, "CLI determinism", || {
        let commands: Vec<Vec<&str>> = vec![
            vec!["dispersion", "--ej-ghz", "8.0", "--ec-ghz", "0.3", "--ng-points", "21"],
            vec![
                "parity", "--rate", "33.3", "--dt", "1e-3", "--duration", "0.5", "--fidelity",
                "0.9", "--seed", "42",
            ],
            vec!["qp", "--s-per-ms", "6.52", "--x0", "1e-6", "--vortex-w-um", "10"],
            vec![
                "antenna", "--toy", "xmon", "--target-rate", "33.3", "--t-points", "5",
                "--t-min", "0.25", "--t-max", "0.45",
            ],
        ];
        for args in &commands {
            let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
            for dir in &dirs {
                let out = Command::new(env!("CARGO_BIN_EXE_qparity"))
                    .args(args)
                    .args(["--out", dir.path().to_str().unwrap()])
                    .output()
                    .map_err(|e| e.to_string())?;
                if out.status.code() != Some(0) {
                    return Err(format!(
                        "{args:?} exited {:?}: {}",
                        out.status.code(),
                        String::from_utf8_lossy(&out.stderr)
                    ));
                }
            }
            let mut names: Vec<String> = std::fs::read_dir(dirs[0].path())
                .unwrap()
                .map(|e| e.unwrap().file_name().into_string().unwrap())
                .collect();
            names.sort();
            if names.is_empty() {
                return Err(format!("{args:?} produced no artifacts"));
            }
            for name in &names {
                let a = std::fs::read(dirs[0].path().join(name)).unwrap();
                let b = std::fs::read(dirs[1].path().join(name))
                    .map_err(|e| format!("{args:?}: second run lacks {name}: {e}"))?;
                if a != b {
                    return Err(format!("{args:?}: artifact {name} differs between runs"));
                }
            }
        }
        Ok(())
    });
}
