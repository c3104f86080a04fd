use num_complex::Complex64;

use mpsbeam_core::assign::{plan_report, plan_with_mode, AlphaMode};
use mpsbeam_core::link::effective_channel;
use mpsbeam_core::{
    generate_statistical_channel, plan_transmission, run_ser_curve, AngleDeg, AssignConfig, ChannelGenConfig,
    LinkConfig, PolarizedChannel, PowerSplit, PsiStats, Ratio,
};

const RATIO: f64 = 4.0;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// 200 bins. Bins `3 + 4i` (i < 48) have `|h_nn|^2 / |h_pn|^2 = RATIO`; 82 bins
/// come in pairs with ratios `RATIO e^{+0.5}` and `RATIO e^{-0.5}`, weighted so
/// the survivor sums keep the ratio at RATIO; the remaining 70 bins are weak.
/// All bins have `|h_np|^2 / |h_pp|^2 = 0.01`.
fn constructed() -> (PolarizedChannel, Vec<usize>, Vec<usize>) {
    let matches: Vec<usize> = (0..48).map(|i| 3 + 4 * i).collect();
    let mut powers = vec![(0.0, 0.0); 200];
    for &n in &matches {
        powers[n] = (RATIO, 1.0);
    }
    let rest: Vec<usize> = (0..200).filter(|n| !matches.contains(n)).collect();
    let half = 0.5f64.exp();
    for (k, &n) in rest.iter().enumerate() {
        powers[n] = if k < 82 {
            if k % 2 == 0 {
                (RATIO * half, 1.0)
            } else {
                (RATIO, half)
            }
        } else {
            (1e-4, 1e-4)
        };
    }
    let weak: Vec<usize> = rest[82..].to_vec();
    let mut b: [Vec<Complex64>; 4] = Default::default();
    for (n, &(nn, pn)) in powers.iter().enumerate() {
        let copolar: f64 = if weak.contains(&n) { 1e-4 } else { 1.0 };
        b[0].push(re(nn.sqrt()));
        b[1].push(re(pn.sqrt()));
        b[2].push(re((0.01 * copolar).sqrt()));
        b[3].push(re(copolar.sqrt()));
    }
    let [nn, pn, np, pp] = b;
    (PolarizedChannel::new(nn, pn, np, pp).unwrap(), matches, weak)
}

#[test]
fn exact_matches_are_selected() {
    let (ch, matches, weak) = constructed();
    let plan = plan_transmission(&ch, Ratio::Finite(1e6), &AssignConfig::default()).unwrap();
    assert_eq!(plan.split.alpha(), 1.0);
    assert_eq!(plan.survivor_count, 130);
    assert!(plan.survivors.iter().all(|n| !weak.contains(n)));
    assert!((plan.xpd_mps_target.value() - RATIO).abs() < 1e-12);
    assert_eq!(plan.subcarriers, matches);
}

#[test]
fn best_match_below_screening_is_never_selected() {
    let (ch, _, weak) = constructed();
    let hidden = weak[0];
    let mut b: [Vec<Complex64>; 4] = [0, 1, 2, 3].map(|k| ch.branch(mpsbeam_core::channel::Branch::ALL[k]).to_vec());
    // a perfect match in log-XPD, with almost no energy
    b[0][hidden] = re(1e-3 * RATIO.sqrt());
    b[1][hidden] = re(1e-3);
    b[2][hidden] = re(0.0);
    b[3][hidden] = re(0.0);
    let [nn, pn, np, pp] = b;
    let ch = PolarizedChannel::new(nn, pn, np, pp).unwrap();
    let plan = plan_transmission(&ch, Ratio::Finite(1e6), &AssignConfig::default()).unwrap();
    let rows = plan_report(&ch, &plan);
    let best = rows.iter().map(|r| r.log_distance).fold(f64::INFINITY, f64::min);
    assert_eq!(rows[hidden].log_distance, best);
    assert!(!plan.survivors.contains(&hidden));
    assert!(!plan.subcarriers.contains(&hidden));
}

#[test]
fn selection_is_optimal_among_survivors() {
    let psi = PsiStats::from_db(5.48, -6.26, 5.90).unwrap();
    let ch = generate_statistical_channel(&ChannelGenConfig::new(psi, 1024, 31)).unwrap();
    for mode in [
        AlphaMode::XpdXpr { target_xpd: Ratio::ONE },
        AlphaMode::Fixed(PowerSplit::new(0.3).unwrap()),
    ] {
        let plan = plan_with_mode(&ch, mode, &AssignConfig::default()).unwrap();
        let rows = plan_report(&ch, &plan);
        let worst_selected = plan.subcarriers.iter().map(|&n| rows[n].log_distance).fold(0.0, f64::max);
        for &n in &plan.survivors {
            if !plan.subcarriers.contains(&n) {
                assert!(rows[n].log_distance >= worst_selected);
            }
        }
        assert!(plan.subcarriers.windows(2).all(|w| w[0] < w[1]));
        assert!(plan.subcarriers.iter().all(|n| plan.survivors.contains(n)));
    }
}

#[test]
fn plan_is_scale_invariant() {
    let psi = PsiStats::from_db(4.56, -4.15, 4.34).unwrap();
    let ch = generate_statistical_channel(&ChannelGenConfig::new(psi, 2048, 12)).unwrap();
    let scaled = ch.scaled(Complex64::from_polar(2.5, 0.7));
    let cfg = AssignConfig::default();
    let a = plan_transmission(&ch, Ratio::ONE, &cfg).unwrap();
    let b = plan_transmission(&scaled, Ratio::ONE, &cfg).unwrap();
    assert_eq!(a.survivors, b.survivors);
    assert_eq!(a.subcarriers, b.subcarriers);
    assert!((a.split.alpha() - b.split.alpha()).abs() < 1e-12);
}

fn link_setup() -> (PolarizedChannel, LinkConfig) {
    let psi = PsiStats::from_db(5.48, -6.26, 5.90).unwrap();
    let ch = generate_statistical_channel(&ChannelGenConfig::new(psi, 512, 3)).unwrap();
    let plan = plan_transmission(&ch, Ratio::ONE, &AssignConfig::default()).unwrap();
    let cfg = LinkConfig {
        snr_db: vec![],
        symbols_per_point: 20_000,
        rx_angle: AngleDeg(0.0),
        split: plan.split,
        subcarriers: plan.subcarriers,
        seed: 99,
    };
    (ch, cfg)
}

#[test]
fn ser_does_not_rise_with_snr_under_common_noise() {
    let (ch, cfg) = link_setup();
    for k in 0..8 {
        let snr = -2.0 + 3.0 * k as f64;
        let at = |s: f64| run_ser_curve(&ch, &LinkConfig { snr_db: vec![s], ..cfg.clone() }).unwrap().errors[0];
        assert!(at(snr + 6.0) <= at(snr), "{snr} dB");
    }
}

#[test]
fn unit_modulus_scaling_keeps_error_counts() {
    let (ch, cfg) = link_setup();
    let cfg = LinkConfig { snr_db: vec![0.0, 6.0, 12.0], ..cfg };
    let base = run_ser_curve(&ch, &cfg).unwrap();
    for phase in [0.3, 1.9, -2.6] {
        let rotated = run_ser_curve(&ch.scaled(Complex64::from_polar(1.0, phase)), &cfg).unwrap();
        assert_eq!(base.errors, rotated.errors);
    }
}

#[test]
fn transmit_energy_is_conserved_across_splits() {
    // two unit branches of orthogonal phase: |h_eff|^2 = alpha + beta
    let ch = PolarizedChannel::flat(1, re(1.0), re(0.0), Complex64::new(0.0, 1.0), re(0.0)).unwrap();
    for a in [0.0, 0.2, 0.5, 0.9, 1.0] {
        let h = effective_channel(&ch, PowerSplit::new(a).unwrap(), AngleDeg(-45.0))[0];
        assert!((h.norm_sqr() - 1.0).abs() < 1e-12, "alpha={a}");
    }
}
