use super::*;
use crate::numerics::energy;

fn evm_db(reference: &[C64], measured: &[C64]) -> f64 {
    let err: f64 = reference.iter().zip(measured).map(|(a, b)| (a - b).norm_sqr()).sum();
    10.0 * (err / energy(reference)).max(1e-30).log10()
}

fn peak_to_mean_db(x: &[C64]) -> f64 {
    let peak = x.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    10.0 * (peak / (energy(x) / x.len() as f64)).log10()
}

#[test]
fn single_tone_ofdm_has_flat_envelope() {
    let cfg = WaveformConfig::new(WaveformKind::Ofdm, 64, 16);
    let grid = Grid::from_fn(64, 16, Domain::TimeFrequency, |m, _| {
        if m == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::default()
        }
    });
    let samples = modulate_grid(&grid, &cfg).unwrap();
    let mag = 1.0 / 8.0;
    assert!(samples.iter().all(|z| (z.norm() - mag).abs() < 1e-12));
    assert!(peak_to_mean_db(&samples).abs() < 1e-9);
}

#[test]
fn dfts_otfs_matches_dfts_ofdm() {
    let mut rng = SimRng::new(21);
    for n in [1usize, 16] {
        let a = WaveformConfig::new(WaveformKind::DftsOtfs, 64, n);
        let b = a.with_kind(WaveformKind::DftsOfdm);
        let bits = rng.bits(payload_capacity(&a, &PilotMask::empty(64, n)));
        let fa = modulate(&bits, &PilotPattern::none(&a), &a).unwrap();
        let fb = modulate(&bits, &PilotPattern::none(&b), &b).unwrap();
        let diff: f64 = fa.samples.iter().zip(fb.samples.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "N={n}: max diff {diff}");
    }
}

#[test]
fn otfs_origin_impulse_spreads_evenly() {
    let cfg = WaveformConfig::new(WaveformKind::Otfs, 32, 8);
    let mut dd = cfg.empty_grid(Domain::DelayDoppler);
    dd.set(0, 0, C64::new(1.0, 0.0));
    let tf = native_to_tf(&dd, &cfg);
    let expect = 1.0 / (32.0f64 * 8.0).sqrt();
    for z in tf.as_slice() {
        assert!((z - C64::new(expect, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn otfs_delay_index_is_time_position() {
    let cfg = WaveformConfig::new(WaveformKind::Otfs, 16, 4);
    let mut dd = cfg.empty_grid(Domain::DelayDoppler);
    dd.set(5, 0, C64::new(1.0, 0.0));
    let samples = strip_cp(&modulate_grid(&dd, &cfg).unwrap(), &cfg);
    for (i, z) in samples.iter().enumerate() {
        let expect = if i % 16 == 5 { 0.5 } else { 0.0 };
        assert!((z.re - expect).abs() < 1e-12 && z.im.abs() < 1e-12, "sample {i}: {z}");
    }
}

#[test]
fn round_trip_every_kind() {
    let mut rng = SimRng::new(4);
    for kind in WaveformKind::ALL {
        for order in [ModOrder::Qam4, ModOrder::Qam16] {
            let mut cfg = WaveformConfig::new(kind, 64, 16);
            cfg.mod_order = order;
            let frame = random_frame(&cfg, &PilotPattern::none(&cfg), &mut rng).unwrap();
            assert_eq!(frame.samples.len(), 16 * 80);
            let back = demodulate(&frame.samples, &cfg).unwrap();
            let evm = evm_db(frame.symbols.as_slice(), back.as_slice());
            assert!(evm < -100.0, "{kind}: EVM {evm} dB");
        }
    }
}

#[test]
fn ofdm_pilots_recovered() {
    let cfg = WaveformConfig::new(WaveformKind::Ofdm, 64, 16);
    let scheme = PilotScheme::Scattered {
        freq_spacing: 4,
        time_spacing: 4,
    };
    let pilots = PilotPattern::new(&cfg, scheme).unwrap();
    let frame = random_frame(&cfg, &pilots, &mut SimRng::new(8)).unwrap();
    let back = demodulate(&frame.samples, &cfg).unwrap();
    for c in 0..16 {
        for r in 0..64 {
            if pilots.mask().is_pilot(r, c) {
                assert!((back.get(r, c) - pilots.values().get(r, c)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn dfts_otfs_despread_round_trip() {
    let cfg = WaveformConfig::new(WaveformKind::DftsOtfs, 64, 16);
    let frame = random_frame(&cfg, &PilotPattern::none(&cfg), &mut SimRng::new(12)).unwrap();
    let tf = demodulate_tf(&frame.samples, &cfg).unwrap();
    let dd = doppler_despread(&sfft(&tf));
    for (a, b) in dd.as_slice().iter().zip(frame.symbols.as_slice()) {
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn energy_accounts_for_prefix() {
    let mut rng = SimRng::new(30);
    for kind in WaveformKind::ALL {
        let cfg = WaveformConfig::new(kind, 64, 16);
        let frame = random_frame(&cfg, &PilotPattern::none(&cfg), &mut rng).unwrap();
        let grid_e = frame.symbols.energy();
        let body_e = energy(&frame.cp_stripped());
        assert!((body_e - grid_e).abs() <= 1e-10 * grid_e, "{kind}");
        // each prefix repeats the last cp_len body samples of its symbol
        let prefix_e: f64 = frame
            .cp_stripped()
            .chunks_exact(64)
            .map(|b| energy(&b[64 - cfg.cp_len..]))
            .sum();
        let total = frame.samples.energy();
        assert!((total - body_e - prefix_e).abs() <= 1e-10 * total, "{kind}");
    }
}

#[test]
fn otfs_and_ofdm_mean_power_match() {
    let ofdm = WaveformConfig::new(WaveformKind::Ofdm, 64, 16);
    let otfs = ofdm.with_kind(WaveformKind::Otfs);
    let bits = SimRng::new(77).bits(payload_capacity(&ofdm, &PilotMask::empty(64, 16)));
    let a = modulate(&bits, &PilotPattern::none(&ofdm), &ofdm).unwrap();
    let b = modulate(&bits, &PilotPattern::none(&otfs), &otfs).unwrap();
    let pa = energy(&a.cp_stripped()) / 1024.0;
    let pb = energy(&b.cp_stripped()) / 1024.0;
    assert!((pa - pb).abs() < 1e-10);
}

#[test]
fn payload_size_errors() {
    let cfg = WaveformConfig::new(WaveformKind::Ofdm, 64, 16);
    let pilots = PilotPattern::none(&cfg);
    assert!(matches!(modulate(&[0, 1], &pilots, &cfg), Err(Error::Length { .. })));
    assert!(matches!(demodulate(&[C64::default(); 100], &cfg), Err(Error::Length { .. })));
}

#[test]
fn config_validation() {
    let mut cfg = WaveformConfig::new(WaveformKind::Ofdm, 64, 16);
    assert!(cfg.validate().is_ok());
    cfg.cp_len = 64;
    assert!(cfg.validate().is_err());
    assert!(WaveformConfig::new(WaveformKind::Ofdm, 4, 16).validate().is_err());
    assert!(WaveformConfig::new(WaveformKind::Ofdm, 48, 16).validate().is_err());
    assert!(WaveformConfig::new(WaveformKind::Ofdm, 64, 12).validate().is_err());
    assert_eq!("dft-s-otfs".parse::<WaveformKind>().unwrap(), WaveformKind::DftsOtfs);
    assert_eq!("DFT-s-OFDM".parse::<WaveformKind>().unwrap(), WaveformKind::DftsOfdm);
}

#[test]
fn default_prefix_covers_ten_metre_echo() {
    let cfg = WaveformConfig::new(WaveformKind::Ofdm, 64, 16);
    let echo_delay = 2.0 * 10.0 / crate::SPEED_OF_LIGHT;
    assert!(echo_delay < cfg.cp_len as f64 / cfg.sample_rate());
}
