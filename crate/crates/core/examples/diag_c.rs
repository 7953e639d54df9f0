//! Scratch diagnostic (deleted before commit).
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rmtl::{
    aalen_johansen, diff_test, gray_test, select_tau, simulate_dataset, Cause, Group, Sample,
    Scenario, ScenarioConfig, Status,
};

fn subset(sample: &Sample, group: Group) -> Sample {
    Sample::new(sample.records().filter(|r| r.group == group).collect::<Vec<_>>()).unwrap()
}

fn main() {
    let config = ScenarioConfig::new(Scenario::C, 100, 100, 0.0, 42);
    let mut rng = ChaCha12Rng::seed_from_u64(42);
    let sample = simulate_dataset(&config, &mut rng).unwrap();
    for group in [Group::One, Group::Two] {
        let s = subset(&sample, group);
        let times: Vec<f64> = s.records().map(|r| r.time).collect();
        let max_t = times.iter().cloned().fold(0.0f64, f64::max);
        let n_int = s.records().filter(|r| r.status == Status::Interest).count();
        let n_int_late =
            s.records().filter(|r| r.status == Status::Interest && r.time > 2.0).count();
        let last_int = s
            .records()
            .filter(|r| r.status == Status::Interest)
            .map(|r| r.time)
            .fold(0.0f64, f64::max);
        let cif = aalen_johansen(&s, Cause::Interest).unwrap();
        println!(
            "group {}: n=100 interest={} (late {}), last_interest={:.3e}, max_time={:.3e}, CIF(2)={:.3} CIF(2.8)={:.3}",
            group.code(),
            n_int,
            n_int_late,
            last_int,
            max_t,
            cif.cif.value_at(2.0),
            cif.cif.value_at(2.8),
        );
    }
    let tau = select_tau(&sample).unwrap();
    let gray = gray_test(&sample).unwrap();
    let diff = diff_test(&sample, tau, 0.05).unwrap();
    println!("tau={tau:.4} gray: stat={:.4} p={:.4}; diff: stat={:.4} p={:.4}",
        gray.statistic, gray.p_value, diff.statistic, diff.p_value);

    // Mini power runs.
    for (label, cens) in [("0%", 0.0), ("30%", 0.30)] {
        let mut rej = 0usize;
        let mut rej_diff = 0usize;
        let reps = 400usize;
        let mut rng = ChaCha12Rng::seed_from_u64(777);
        let config = ScenarioConfig::new(Scenario::C, 100, 100, cens, 42);
        for _ in 0..reps {
            let s = simulate_dataset(&config, &mut rng).unwrap();
            let g = gray_test(&s).unwrap();
            if g.p_value <= 0.05 {
                rej += 1;
            }
            if let Ok(tau) = select_tau(&s) {
                let d = diff_test(&s, tau, 0.05).unwrap();
                if d.p_value <= 0.05 {
                    rej_diff += 1;
                }
            }
        }
        println!(
            "C (100,100) cens {label}: gray power {:.3}, diff power {:.3} ({} reps)",
            rej as f64 / reps as f64,
            rej_diff as f64 / reps as f64,
            reps
        );
    }
}
