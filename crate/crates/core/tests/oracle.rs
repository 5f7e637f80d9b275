use g2_coherence::fock::oracle_g2;
use g2_coherence::*;

fn scenarios() -> Vec<ScenarioSpec> {
    let mut out = Vec::new();
    for photon_model in [Model::Gaussian, Model::Lorentzian] {
        for (taup, omegad, gamma, tau) in [
            (1.5e-12, 4.99e14, 0.77e12, 0.0),
            (1e-12, 5e14, 1e12, 0.5e-12),
            (-2e-12, 5.01e14, 1.5e12, 1e-12),
        ] {
            out.push(ScenarioSpec { photon_model, omega0: 5e14, delta: 1e12, taup, omegad, gamma, tau });
        }
    }
    out
}

fn analytic(s: &ScenarioSpec) -> f64 {
    let o = compute_overlap_set(s, Method::ClosedForm, &Default::default()).unwrap();
    g2_from_overlaps(&o).unwrap().value
}

#[test]
fn oracle_agrees_with_closed_form() {
    for s in scenarios() {
        let want = analytic(&s);
        let got = oracle_g2(&s, 512).unwrap();
        assert!(!got.flags.any());
        assert!((got.value - want).abs() <= 1e-2 * want.max(1e-6), "{s:?}: {} vs {want}", got.value);
    }
}

#[test]
fn oracle_converges_with_mode_count() {
    for s in scenarios() {
        let want = analytic(&s);
        let err = |n| (oracle_g2(&s, n).unwrap().value - want).abs();
        let coarse = err(128);
        let fine = err(1024);
        assert!(fine <= coarse.max(1e-9 * want.max(1.0)), "{s:?}: {coarse} -> {fine}");
    }
}

#[test]
fn oracle_zero_separation_is_half() {
    for photon_model in [Model::Gaussian, Model::Lorentzian] {
        let s = ScenarioSpec {
            photon_model,
            omega0: 5e14,
            delta: 1e12,
            taup: 0.0,
            omegad: 5e14,
            gamma: 1e12,
            tau: 0.0,
        };
        let r = oracle_g2(&s, 256).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9, "{}", r.value);
    }
}

#[test]
fn too_few_modes_is_rejected() {
    let s = scenarios()[0];
    assert!(oracle_g2(&s, 8).is_err());
}
