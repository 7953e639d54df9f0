//! Scratch diagnostic (deleted before commit): candidate generator variants.
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rmtl::{diff_test, gray_test, select_tau, Group, Sample, Status, SurvRecord};

const BREAK_MASS: f64 = 1.0 - std::f64::consts::E.recip() as f64;

fn draw_time(pre: f64, post: f64, rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random();
    let shape = if u <= BREAK_MASS { pre } else { post };
    2.0 * (-(1.0 - u).ln()).powf(1.0 / shape)
}

fn make_sample(
    n: usize,
    shapes1: (f64, f64),
    shapes2: (f64, f64),
    horizon: f64,
    rng: &mut impl Rng,
) -> Sample {
    let mut records = Vec::with_capacity(2 * n);
    for (group, shapes) in [(Group::One, shapes1), (Group::Two, shapes2)] {
        for _ in 0..n {
            let status =
                if rng.random::<f64>() < 0.7 { Status::Interest } else { Status::Competing };
            let mut t = draw_time(shapes.0, shapes.1, rng);
            let mut st = status;
            if t > horizon {
                t = horizon;
                st = Status::Censored;
            }
            if t <= 0.0 {
                t = 1e-12;
            }
            records.push(SurvRecord { time: t, status: st, group });
        }
    }
    Sample::new(records).unwrap()
}

fn power(
    n: usize,
    shapes1: (f64, f64),
    shapes2: (f64, f64),
    horizon: f64,
    reps: usize,
    seed: u64,
) -> (f64, f64) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut gray_rej = 0usize;
    let mut diff_rej = 0usize;
    let mut used = 0usize;
    for _ in 0..reps {
        let s = make_sample(n, shapes1, shapes2, horizon, &mut rng);
        let Ok(tau) = select_tau(&s) else { continue };
        used += 1;
        if gray_test(&s).unwrap().p_value <= 0.05 {
            gray_rej += 1;
        }
        if diff_test(&s, tau, 0.05).unwrap().p_value <= 0.05 {
            diff_rej += 1;
        }
    }
    (gray_rej as f64 / used as f64, diff_rej as f64 / used as f64)
}

fn main() {
    let reps = 400;
    println!("scenario C candidates at (100,100), 0% censoring; ref gray .7512 diff .2380");
    for (label, s1, s2, h) in [
        ("post {0.1,4} no horizon", (2.0, 0.1), (2.0, 4.0), f64::INFINITY),
        ("post {0.1,4} horizon 4", (2.0, 0.1), (2.0, 4.0), 4.0),
        ("post {0.1,4} horizon 6", (2.0, 0.1), (2.0, 4.0), 6.0),
        ("post {0.1,4} horizon 10", (2.0, 0.1), (2.0, 4.0), 10.0),
        ("post {0.5,4} no horizon", (2.0, 0.5), (2.0, 4.0), f64::INFINITY),
        ("post {1,4}   no horizon", (2.0, 1.0), (2.0, 4.0), f64::INFINITY),
    ] {
        let (g, d) = power(100, s1, s2, h, reps, 12345);
        println!("  {label}: gray {g:.3} diff {d:.3}");
    }
    println!("scenario D candidates at (50,50), 0% censoring; ref gray .0760 diff .2576");
    for (label, s1, s2, h) in [
        ("pre {0.1,4} no horizon", (0.1, 2.0), (4.0, 2.0), f64::INFINITY),
        ("pre {0.5,4} no horizon", (0.5, 2.0), (4.0, 2.0), f64::INFINITY),
        ("pre {1,4}   no horizon", (1.0, 2.0), (4.0, 2.0), f64::INFINITY),
        ("pre {0.1,4} horizon 4", (0.1, 2.0), (4.0, 2.0), 4.0),
    ] {
        let (g, d) = power(50, s1, s2, h, reps, 54321);
        println!("  {label}: gray {g:.3} diff {d:.3}");
    }
}
