use satharm::analysis::{band_power, spectrum, SpectrumFrame};
use satharm::scenario::{cancel_harmonic, simulate, CancelModel, ScenarioConfig, Simulation};

fn default_run() -> (Simulation, SpectrumFrame) {
    let r = ScenarioConfig::default().resolve().unwrap();
    let sim = simulate(&r).unwrap();
    let s = spectrum(&sim.saturated, sim.saturated.len())
        .unwrap()
        .with_full_scale(r.full_scale())
        .unwrap();
    (sim, s)
}

#[test]
fn third_harmonic_band_power_is_finite() {
    let (_, s) = default_run();
    let p3 = band_power(&s, -75e6, -45e6).unwrap();
    assert!(p3.is_finite());
}

#[test]
fn quiet_band_sits_40_db_below_third_harmonic() {
    let (_, s) = default_run();
    let p3 = band_power(&s, -75e6, -45e6).unwrap();
    let quiet = band_power(&s, 150e6, 160e6).unwrap();
    assert!(quiet <= p3 - 40.0, "P3 = {p3:.2} dB, quiet = {quiet:.2} dB");
}

#[test]
fn bessel_cancellation_drops_third_harmonic_band_30_db() {
    let (sim, _) = default_run();
    let out = cancel_harmonic(&sim, 0, 3, CancelModel::Bessel, Some((-75e6, -45e6))).unwrap();
    assert!(
        out.report.power_after <= out.report.power_before - 30.0,
        "before {:.2} dB, after {:.2} dB",
        out.report.power_before,
        out.report.power_after
    );
}

#[test]
fn empty_band_is_rejected() {
    let (_, s) = default_run();
    assert!(band_power(&s, 10e6, 10e6).is_err());
}
