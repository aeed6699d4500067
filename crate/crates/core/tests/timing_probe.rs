// Temporary timing probe; run with: cargo test -p qrc-core --test timing_probe -- --ignored --nocapture
use std::time::Instant;

use qrc_core::analysis::{prepare_datasets, qrc_forecast, ProtocolConfig};
use qrc_core::featuremap::FeatureMapSpec;
use qrc_core::mackey_glass::MgConfig;
use qrc_core::quantum::NoiseSpec;
use qrc_core::reservoir::ReservoirConfig;

#[test]
#[ignore]
fn timing() {
    // Pure path: n_q = 10, window 20, 500 steps.
    let p = ProtocolConfig::new(MgConfig::default(), 20, 20, 400, 100);
    let data = prepare_datasets(&p, 1).unwrap();
    let cfg = ReservoirConfig::new(FeatureMapSpec::cpmap(20), 20, 0.79, 1.0);
    let t0 = Instant::now();
    let out = qrc_forecast(&cfg, &data, 1e-8).unwrap();
    let dt = t0.elapsed();
    println!(
        "pure: 500 steps in {:?} ({:.2} ms/step), fit included; mse={:.3e}",
        dt,
        dt.as_secs_f64() * 1000.0 / 500.0,
        out.test_mse
    );

    // Noisy PTM path: same protocol, 200 steps.
    let p = ProtocolConfig::new(MgConfig::default(), 20, 20, 160, 40);
    let data = prepare_datasets(&p, 1).unwrap();
    let mut ncfg = ReservoirConfig::new(FeatureMapSpec::cpmap(20), 20, 0.79, 1.0);
    ncfg.noise = Some(NoiseSpec {
        p_depol_1q: 1e-3,
        p_depol_2q: 1e-2,
        readout_eps: 0.02,
        t1_us: Some(100.0),
        ..NoiseSpec::none()
    });
    let t0 = Instant::now();
    let out = qrc_forecast(&ncfg, &data, 1e-8).unwrap();
    let dt = t0.elapsed();
    println!(
        "noisy: 200 steps in {:?} ({:.1} ms/step); mse={:.3e}",
        dt,
        dt.as_secs_f64() * 1000.0 / 200.0,
        out.test_mse
    );

    // Readout fit at 4000 x 1024.
    let p = ProtocolConfig::new(MgConfig::default(), 20, 20, 3000, 1000);
    let data = prepare_datasets(&p, 1).unwrap();
    let t0 = Instant::now();
    let out = qrc_forecast(&cfg, &data, 1e-8).unwrap();
    let dt = t0.elapsed();
    println!(
        "full desk-scale run (4000 steps + 1024-col ridge): {:?}; train={:.3e} test={:.3e}",
        dt, out.train_mse, out.test_mse
    );
}
