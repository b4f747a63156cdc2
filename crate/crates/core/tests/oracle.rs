//! The FFT-based operator, modulator and LS solver against dense brute-force
//! references.

mod common;

use common::*;
use thz_isac::numerics::SimRng;
use thz_isac::rxcomm::{equalize_iterative_ls, DDChannelOperator, LsOptions};
use thz_isac::waveform::{demodulate_tf, modulate_grid, Domain, Grid, WaveformConfig, WaveformKind};
use thz_isac::C64;

#[test]
fn operator_matches_dense_chain_for_random_channels() {
    let mut rng = SimRng::new(2024);
    for kind in WaveformKind::ALL {
        let cfg = WaveformConfig::new(kind, 8, 4);
        let dim = 32;
        for _ in 0..10 {
            let paths = random_two_path(&cfg, &mut rng);
            let op = DDChannelOperator::new(&cfg, paths.clone()).unwrap();
            let fast = probe(dim, |e| op.apply(&grid(&cfg, op.domain(), e.to_vec())).unwrap().into_vec());
            let dense = probe(dim, |e| chain(e, &cfg, &paths));
            assert!(rel_diff(&fast, &dense) < 1e-9, "{kind}: {}", rel_diff(&fast, &dense));

            let adj = probe(dim, |e| op.apply_adjoint(&grid(&cfg, op.domain(), e.to_vec())).unwrap().into_vec());
            assert!(rel_diff(&adj, &dense.adjoint()) < 1e-9, "{kind} adjoint");
        }
    }
}

#[test]
fn iterative_ls_matches_dense_least_squares() {
    let mut rng = SimRng::new(77);
    let opts = LsOptions {
        max_iters: 500,
        tol: 1e-13,
        ridge: 0.0,
    };
    for kind in [WaveformKind::Otfs, WaveformKind::DftsOtfs, WaveformKind::Ofdm] {
        let cfg = WaveformConfig::new(kind, 8, 4);
        for _ in 0..10 {
            let paths = random_two_path(&cfg, &mut rng);
            let op = DDChannelOperator::new(&cfg, paths.clone()).unwrap();
            let dense = probe(32, |e| chain(e, &cfg, &paths));
            // right-hand side outside the range of A so the LS residual is nonzero
            let b = random_vec(32, &mut rng);
            let reference = lstsq(&dense, &b);
            let sol = equalize_iterative_ls(&grid(&cfg, op.domain(), b), &op, &opts).unwrap();
            let err: f64 = sol
                .grid
                .as_slice()
                .iter()
                .zip(&reference)
                .map(|(a, r)| (a - r).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let norm: f64 = reference.iter().map(|r| r.norm_sqr()).sum::<f64>().sqrt();
            assert!(err / norm < 1e-6, "{kind}: {}", err / norm);
        }
    }
}

#[test]
fn modulator_matches_direct_sums() {
    let mut rng = SimRng::new(5);
    for (m, n) in [(8, 4), (16, 2)] {
        let cfg = WaveformConfig::new(WaveformKind::Ofdm, m, n);
        let tf = random_vec(m * n, &mut rng);
        let fast = modulate_grid(&grid(&cfg, Domain::TimeFrequency, tf.clone()), &cfg).unwrap();
        let slow = ofdm_modulate(&tf, &cfg);
        let err: f64 = fast.iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        let back = demodulate_tf(&slow, &cfg).unwrap();
        let direct = ofdm_demodulate(&slow, &cfg);
        let err: f64 = back.as_slice().iter().zip(&direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }
}

#[test]
fn channel_matches_direct_kernel_sum() {
    let mut rng = SimRng::new(6);
    let cfg = WaveformConfig::new(WaveformKind::Ofdm, 8, 4);
    let x = random_vec(cfg.frame_len(), &mut rng);
    for _ in 0..5 {
        let paths = random_two_path(&cfg, &mut rng);
        let fast = thz_isac::channel::propagate(&x, &paths, cfg.sample_rate());
        let slow = propagate(&x, &paths, cfg.sample_rate());
        let err: f64 = fast.iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }
}

#[test]
fn otfs_equalizer_domain_is_the_symplectic_transform() {
    // a single path with integer delay and on-grid Doppler acts on the
    // delay-Doppler grid as a 2-D circular shift up to phases
    let cfg = WaveformConfig::new(WaveformKind::Otfs, 8, 4);
    let fs = cfg.sample_rate();
    let paths = vec![thz_isac::channel::PathSpec::new(C64::new(1.0, 0.0), 2.0 / fs, 0.0).unwrap()];
    let op = DDChannelOperator::new(&cfg, paths).unwrap();
    let mut x = Grid::zeros(8, 4, op.domain());
    x.set(1, 1, C64::new(1.0, 0.0));
    let y = op.apply(&x).unwrap();
    assert!((y.get(3, 1).norm() - 1.0).abs() < 1e-9, "{:?}", y.get(3, 1));
    assert!((y.energy() - 1.0).abs() < 1e-9);
}
