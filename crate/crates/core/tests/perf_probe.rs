use precoded_ofdm::chain::{ChainMode, Link, LinkConfig};
use precoded_ofdm::channel::{ChannelRealization, TapProfile};
use precoded_ofdm::numerics::rng::Streams;
use std::time::Instant;

#[test]
#[ignore]
fn timing() {
    let prof = TapProfile::vehicular_a();
    let streams = Streams::new(1);

    let t0 = Instant::now();
    let mut rng = streams.stream(0);
    for _ in 0..20 {
        let _ch = ChannelRealization::<f64>::realize(
            &prof, 389.0, 512, 352, 1e6 / 91.0, 102e-6, &mut rng,
        )
        .unwrap();
    }
    println!("realize 512x352: {:?}/frame", t0.elapsed() / 20);

    let cfg = LinkConfig {
        n: 256,
        mode: ChainMode::Precoded,
        snr_db: 10.0,
        clip: 0.75,
        frames_per_trial: 1,
        ..LinkConfig::default()
    };
    let link = Link::<f64>::new(&cfg).unwrap();
    let t0 = Instant::now();
    for i in 0..10 {
        let _ = link.run_trial(i);
    }
    let dt = t0.elapsed() / 10;
    println!(
        "trial n=256 ({} bits): {:?}/frame -> {:.1} kbit/s",
        link.trial_bits(),
        dt,
        link.trial_bits() as f64 / dt.as_secs_f64() / 1e3
    );

    let cfg = LinkConfig {
        n: 2,
        snr_db: 10.0,
        clip: 0.75,
        frames_per_trial: 64,
        collect_noise_moments: true,
        ..LinkConfig::default()
    };
    let link = Link::<f64>::new(&cfg).unwrap();
    let t0 = Instant::now();
    for i in 0..5 {
        let _ = link.run_trial(i);
    }
    let dt = t0.elapsed() / 5;
    println!(
        "trial n=2 + moments ({} bits): {:?}/trial -> {:.1} kbit/s",
        link.trial_bits(),
        dt,
        link.trial_bits() as f64 / dt.as_secs_f64() / 1e3
    );
}

#[test]
#[ignore]
fn timing_analysis() {
    use precoded_ofdm::analysis::{gain_moments, optimum_c, Convention};
    let t0 = Instant::now();
    let gm = gain_moments::<f64>(1e-3, Convention::ComplexCircular).unwrap();
    println!("gain_moments(1e-3): {:?} (e_g4 = {:.3e})", t0.elapsed(), gm.e_g4);
    let t0 = Instant::now();
    let gm = gain_moments::<f64>(0.5, Convention::ComplexCircular).unwrap();
    println!("gain_moments(0.5): {:?} (e_g4 = {:.4})", t0.elapsed(), gm.e_g4);
    let t0 = Instant::now();
    let c = optimum_c::<f64>(1.0, 0.1).unwrap();
    println!("optimum_c(10 dB): {:?} -> {c:.4}", t0.elapsed());
}
