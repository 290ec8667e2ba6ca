//! Temporary tuning experiments (deleted before release).

use compactseg_core::metrics::{circularity, compactness, dice, PerimeterScheme};
use compactseg_core::prelude::*;

#[test]
#[ignore]
fn experiment_lambda_sweep2() {
    for (r, tab_len, tab_w) in [(16.0, 12usize, 3usize), (16.0, 12, 5), (20.0, 14, 5)] {
        let blob = disk_with_tabs_mask(128, 128, 63.5, 63.5, r, tab_len, tab_w);
        let image = blob.to_field();
        let f = two_phase_force(&image, 1.0, 0.0);
        let scheme = PerimeterScheme::default();
        println!("##### r={r} tab_len={tab_len} tab_w={tab_w}");
        for (sigma, n) in [(4.0, 12usize), (5.0, 15), (6.0, 18)] {
            print!("sigma={sigma} pd-td ");
            for lambda in [2.0, 1.0, 0.5, 0.2, 0.1] {
                let cfg = SolverConfig {
                    lambda,
                    sigma,
                    kernel_half_width: n,
                    max_iters: 500,
                    ..SolverConfig::default()
                };
                let report = run_pdtd(&f, &cfg, None, None).unwrap();
                let (c, circ) = if report.mask.is_empty() {
                    (f64::NAN, f64::NAN)
                } else {
                    (
                        compactness(&report.mask, &scheme).unwrap(),
                        circularity(&report.mask, &scheme).unwrap(),
                    )
                };
                print!(" l={lambda}: C={c:.2} circ={circ:.3} it={}", report.iters_used);
            }
            println!();
        }
    }
}

#[test]
#[ignore]
fn experiment_final_sweep() {
    let blob = disk_with_tabs_mask(128, 128, 63.5, 63.5, 16.0, 12, 3);
    let image = blob.to_field();
    let f = two_phase_force(&image, 1.0, 0.0);
    let scheme = PerimeterScheme::default();
    let t0 = std::time::Instant::now();
    for algo in ["pd-td", "pd-std"] {
        print!("{algo:7}");
        for lambda in [2.0, 1.0, 0.5, 0.2, 0.1] {
            let cfg = SolverConfig {
                lambda,
                epsilon: 0.2,
                tau: 1.0,
                sigma: 4.0,
                kernel_half_width: 12,
                max_iters: 500,
                ..SolverConfig::default()
            };
            let report = match algo {
                "pd-td" => run_pdtd(&f, &cfg, None, None).unwrap(),
                _ => run_pdstd(&f, &cfg, None, None).unwrap(),
            };
            let c = compactness(&report.mask, &scheme).unwrap();
            let circ = circularity(&report.mask, &scheme).unwrap();
            print!("  l={lambda}: C={c:.3} circ={circ:.3} it={}", report.iters_used);
        }
        println!();
    }
    println!("total {:?}", t0.elapsed());
}

#[test]
#[ignore]
fn experiment_lambda_sweep() {
    let blob = disk_with_tabs_mask(128, 128, 63.5, 63.5, 17.0, 14, 5);
    let image = blob.to_field();
    let f = two_phase_force(&image, 1.0, 0.0);
    let scheme = PerimeterScheme::default();

    for (sigma, n) in [(2.0, 6usize), (3.0, 9), (4.0, 12)] {
        for eps in [0.05, 0.1, 0.2] {
            println!("=== sigma={sigma} n={n} eps={eps}");
            for algo in ["pd-td", "pd-std"] {
                print!("{algo:7}");
                for lambda in [2.0, 1.0, 0.5, 0.2, 0.1] {
                    let cfg = SolverConfig {
                        lambda,
                        epsilon: eps,
                        tau: 1.0,
                        sigma,
                        kernel_half_width: n,
                        max_iters: 500,
                        ..SolverConfig::default()
                    };
                    let report = match algo {
                        "pd-td" => run_pdtd(&f, &cfg, None, None).unwrap(),
                        _ => run_pdstd(&f, &cfg, None, None).unwrap(),
                    };
                    let c = if report.mask.is_empty() {
                        f64::NAN
                    } else {
                        compactness(&report.mask, &scheme).unwrap()
                    };
                    let circ = if report.mask.is_empty() {
                        f64::NAN
                    } else {
                        circularity(&report.mask, &scheme).unwrap()
                    };
                    print!(
                        "  l={lambda}: C={c:.2} circ={circ:.3} it={} {:?}",
                        report.iters_used, report.stop_reason
                    );
                }
                println!();
            }
        }
    }
}

#[test]
#[ignore]
fn experiment_solver_ordering() {
    for rho in [0.2, 0.3, 0.4, 0.5] {
        println!("== rho = {rho}");
        for algo in ["pd-td", "pd-std", "admm"] {
            let mut dices = vec![];
            let mut secs = 0.0;
            let mut comps = vec![];
            let mut iters = vec![];
            for i in 0..10u64 {
                let r = 14.0 + (i as f64) * 1.3;
                let cx = 56.0 + (i as f64 % 3.0) * 5.0;
                let cy = 60.0 + (i as f64 % 4.0) * 4.0;
                let truth = disk_mask(128, 128, cx, cy, r);
                let image = add_gaussian_noise(&truth.to_field(), rho, 1000 + i);
                let f = two_phase_force(&image, 1.0, 0.0);
                let cfg = SolverConfig {
                    lambda: 0.5,
                    epsilon: 0.1,
                    tau: 1.0,
                    ..SolverConfig::default()
                };
                let report = match algo {
                    "pd-td" => run_pdtd(&f, &cfg, None, None).unwrap(),
                    "pd-std" => run_pdstd(&f, &cfg, None, None).unwrap(),
                    _ => {
                        let acfg = AdmmConfig {
                            lambda: 0.5,
                            max_iters: 300,
                            ..AdmmConfig::default()
                        };
                        run_admm(&f, &acfg).unwrap()
                    }
                };
                secs += report.wall_time.as_secs_f64();
                iters.push(report.iters_used);
                dices.push(dice(&report.mask, &truth).unwrap());
                if !report.mask.is_empty() {
                    comps.push(compactness(&report.mask, &PerimeterScheme::default()).unwrap());
                }
            }
            let mean_dice = dices.iter().sum::<f64>() / dices.len() as f64;
            let mean_comp = comps.iter().sum::<f64>() / comps.len().max(1) as f64;
            println!(
                "{algo:7} dice={mean_dice:.4} comp={mean_comp:.3} time={secs:.3}s iters={iters:?}"
            );
        }
    }
}
