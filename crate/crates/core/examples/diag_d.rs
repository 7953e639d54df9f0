//! Scratch diagnostic (deleted before commit).
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rmtl::{diff_test, gray_test, select_tau, simulate_dataset, Scenario, ScenarioConfig};

fn main() {
    for (cens, label) in [(0.0, "0%"), (0.15, "15%"), (0.30, "30%"), (0.60, "60%")] {
        let reps = 400usize;
        let mut rng = ChaCha12Rng::seed_from_u64(999);
        let config = ScenarioConfig::new(Scenario::D, 50, 50, cens, 42);
        let mut gray_rej = 0usize;
        let mut diff_rej = 0usize;
        let mut tau_sum = 0.0f64;
        let mut stat_sum = 0.0f64;
        let mut used = 0usize;
        for _ in 0..reps {
            let s = simulate_dataset(&config, &mut rng).unwrap();
            let g = gray_test(&s).unwrap();
            if g.p_value <= 0.05 {
                gray_rej += 1;
            }
            if let Ok(tau) = select_tau(&s) {
                let d = diff_test(&s, tau, 0.05).unwrap();
                if d.p_value <= 0.05 {
                    diff_rej += 1;
                }
                tau_sum += tau;
                stat_sum += d.statistic;
                used += 1;
            }
        }
        println!(
            "D (50,50) cens {label}: gray {:.3} diff {:.3} mean_tau {:.2} mean_diff_z {:.2} ({used} usable)",
            gray_rej as f64 / reps as f64,
            diff_rej as f64 / reps as f64,
            tau_sum / used as f64,
            stat_sum / used as f64,
        );
    }
    // Realized RMTL difference at 0% on one big sample.
    let config = ScenarioConfig::new(Scenario::D, 4000, 4000, 0.0, 7);
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let s = simulate_dataset(&config, &mut rng).unwrap();
    let tau = select_tau(&s).unwrap();
    use rmtl::{aalen_johansen, Cause, Group, Sample};
    let sub = |g: Group| -> Sample {
        Sample::new(s.records().filter(|r| r.group == g).collect::<Vec<_>>()).unwrap()
    };
    let c1 = aalen_johansen(&sub(Group::One), Cause::Interest).unwrap();
    let c2 = aalen_johansen(&sub(Group::Two), Cause::Interest).unwrap();
    let rmtl1 = c1.cif.integral_to(tau);
    let rmtl2 = c2.cif.integral_to(tau);
    println!("tau(big)={tau:.3} rmtl1={rmtl1:.4} rmtl2={rmtl2:.4} gap={:.4}", rmtl1 - rmtl2);
}
