//! The acceptance gate: thirteen criteria, one line each. Every criterion
//! runs the corresponding verification suite at its pinned sample counts
//! and tolerances; the test fails if any line fails.

use keplergls::kepler::KeplerParams;
use keplergls::verify::{
    algebroid_action, algebroid_algebra, calibrate, conservation, energy_correspondence,
    equivariance, explicit_constraints, gls_symplectic, hodograph_geometry, momentum_intertwine,
    moser_antisymplectic, poisson_table, roundtrip, sigma_machinery, Execution, SuiteReport,
    VerifyConfig,
};

#[test]
fn acceptance_criteria() {
    let params = KeplerParams::unit();
    let cfg = VerifyConfig::default();
    let exec = Execution::Parallel;
    let cal = calibrate(&params).expect("calibration");

    let reports: Vec<(usize, SuiteReport)> = vec![
        (1, conservation(&params, &cfg, exec).unwrap()),
        (2, roundtrip(&params, &cfg, exec).unwrap()),
        (3, energy_correspondence(&params, &cfg, exec).unwrap()),
        (4, gls_symplectic(&params, &cfg, &cal, exec).unwrap()),
        (5, moser_antisymplectic(&params, &cfg, exec).unwrap()),
        (6, equivariance(&params, &cfg, &cal, exec).unwrap()),
        (7, momentum_intertwine(&params, &cfg, exec).unwrap()),
        (8, poisson_table(&params, &cfg, exec).unwrap()),
        (9, algebroid_algebra(&params, &cfg, exec).unwrap()),
        (10, algebroid_action(&params, &cfg, exec).unwrap()),
        (11, sigma_machinery(&params, &cfg, exec).unwrap()),
        (12, hodograph_geometry(&params, &cfg, exec).unwrap()),
        (13, explicit_constraints(&params, &cfg, &cal, exec).unwrap()),
    ];

    let mut all_pass = true;
    for (idx, r) in &reports {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {idx:>2} [{:<22}] {verdict}  max_residual {:.3e}  tolerance {:.0e}  samples {}",
            r.name, r.max_residual, r.tolerance, r.samples
        );
        for note in &r.notes {
            println!("             {note}");
        }
        all_pass &= r.pass;
    }
    assert!(all_pass, "one or more acceptance criteria failed");
}
