//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Built with `harness = false`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scn::experiments::draw_query;
use scn::persistence::{payload_len, HEADER_LEN};
use scn::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn build(c: usize, l: usize, m: usize, seed: u64) -> (LinkStore, Vec<Message>) {
    let params = NetworkParams::new(c, l).unwrap();
    let messages = gen_messages(&params, m, seed);
    let mut store = LinkStore::new(params);
    store.store_all(&messages).unwrap();
    (store, messages)
}

/// Parallel step from the definition, one link lookup at a time.
fn oracle_mpd(store: &LinkStore, state: &ActivationState) -> ActivationState {
    let c = store.params().clusters();
    let l = store.params().neurons();
    let sets = (0..c)
        .map(|a| {
            NeuronSet::from_indices(
                l,
                (0..l).filter(|&i| {
                    state.cluster(a).contains(i)
                        && (0..c)
                            .filter(|&b| b != a)
                            .all(|b| state.cluster(b).iter().any(|j| store.get_link((a, i), (b, j)).unwrap()))
                }),
            )
        })
        .collect();
    ActivationState::from_sets(sets)
}

fn decoder_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut mismatches = 0;
    let pairs = 1000;
    for _ in 0..pairs {
        let c = rng.random_range(2..=4);
        let l = if rng.random_bool(0.5) { 4 } else { 8 };
        let m = rng.random_range(1..=20);
        let (store, _) = build(c, l, m, rng.random());
        let sets = (0..c)
            .map(|_| match rng.random_range(0..4) {
                0 => NeuronSet::full(l),
                1 => NeuronSet::singleton(l, rng.random_range(0..l)),
                _ => NeuronSet::from_indices(l, (0..l).filter(|_| rng.random_bool(0.5))),
            })
            .collect();
        let state = ActivationState::from_sets(sets);
        let mpd = gd_step_mpd(&store, &state);
        let sd = gd_step_sd(&store, &state, ErasedPolicy::StrictOr);
        if mpd != sd || mpd != oracle_mpd(&store, &state) {
            mismatches += 1;
        }
    }
    verdict(mismatches == 0, format!("{pairs} pairs, {mismatches} mismatches"))
}

fn reference_figures() -> Verdict {
    let bram = [bram_bits(8, 16), bram_bits(8, 64), bram_bits(8, 400)];
    let cap = [capacity_bits(8, 16, 64), capacity_bits(8, 64, 1018), capacity_bits(8, 400, 39_754)];
    let delays = (access_delay_sd(2, 4), access_delay_mpd(4));
    let pass = bram == [14_336, 229_376, 8_960_000] && cap == [2_048, 48_864, 2_862_288] && delays == (11, 5);
    verdict(pass, format!("bram={bram:?} capacity={cap:?} delay_sd={} delay_mpd={}", delays.0, delays.1))
}

const SEEDS: std::ops::Range<u64> = 1..11;

fn beta_reports(c: usize, l: usize, m: usize) -> Vec<BetaReport> {
    SEEDS
        .map(|seed| {
            let (store, messages) = build(c, l, m, seed);
            measure_beta(&store, &messages, 1000, 4, seed, &DecodeConfig::default()).unwrap()
        })
        .collect()
}

fn beta_reproduction() -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for (c, l, m) in [(8, 64, 1018), (8, 16, 64)] {
        let reports = beta_reports(c, l, m);
        let betas: Vec<usize> = reports.iter().map(|r| r.beta).collect();
        let modes: Vec<usize> = reports.iter().map(BetaReport::mode).collect();
        let twos = betas.iter().filter(|&&b| b == 2).count();
        let ok = betas.iter().all(|b| (2..=3).contains(b)) && modes.iter().all(|&m| m <= 2) && 2 * twos > betas.len();
        pass &= ok;
        detail.push(format!("(c={c},l={l},M={m}) beta={betas:?} mode={modes:?} beta=2 in {twos}/10"));
    }
    verdict(pass, detail.join("; "))
}

fn density() -> Verdict {
    let densities: Vec<f64> = SEEDS.map(|seed| build(8, 64, 1018, seed).0.density()).collect();
    let mean = densities.iter().sum::<f64>() / densities.len() as f64;
    let expected = expected_density(64, 1018);
    let per_seed = densities.iter().all(|d| (d - 0.22).abs() <= 0.01);
    let pass = per_seed && (expected - 0.2201).abs() <= 1e-3 && (mean - expected).abs() <= 1e-3;
    let lo = densities.iter().cloned().fold(f64::MAX, f64::min);
    let hi = densities.iter().cloned().fold(f64::MIN, f64::max);
    verdict(pass, format!("measured {lo:.4}..{hi:.4} mean {mean:.5}; expected_density {expected:.5}"))
}

fn cycle_accounting() -> Verdict {
    let mut checked = 0;
    let mut wrong = 0;
    for (c, l, m) in [(8, 64, 1018), (8, 16, 64), (4, 8, 10)] {
        let (store, messages) = build(c, l, m, 77);
        for trial in 0..50 {
            let (_, query) = draw_query(&messages, c / 2, 77, trial);
            for beta in [1, 2, 4] {
                for it in [1, 2, 4] {
                    let cfg = DecodeConfig::new(Rule::SdBounded { beta }, it);
                    let out = decode(&store, &query, &cfg).unwrap();
                    checked += 1;
                    if out.cycles != 2 + (beta as u64 + 1) * (it as u64 - 1) || out.iterations_used != it {
                        wrong += 1;
                    }
                }
            }
        }
    }
    verdict(wrong == 0, format!("{checked} decodes, {wrong} off-formula"))
}

fn clique_survival() -> Verdict {
    let configs = [
        DecodeConfig::new(Rule::Mpd, 4),
        DecodeConfig::new(Rule::Sd, 4),
        DecodeConfig::new(Rule::Sd, 4).with_policy(ErasedPolicy::StrictOr),
        DecodeConfig::new(Rule::SdBounded { beta: 2 }, 4),
    ];
    let setups = [(3, 4, 6), (4, 8, 20), (8, 16, 64), (8, 64, 1018), (8, 64, 2000)];
    let trials_per = 2000;
    let mut wrong = 0;
    let mut bounded_overflow_wrong = 0;
    let mut errors = 0;
    let mut trials = 0;
    for (k, &(c, l, m)) in setups.iter().enumerate() {
        let seed = 500 + k as u64;
        let (store, messages) = build(c, l, m, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for trial in 0..trials_per {
            let erase = rng.random_range(1..c);
            let (i, query) = draw_query(&messages, erase, seed, trial);
            trials += 1;
            for cfg in &configs {
                let out = decode(&store, &query, cfg).unwrap();
                match &out.status {
                    DecodeStatus::Retrieved(got) if got == &messages[i] => {}
                    DecodeStatus::Retrieved(_) if out.beta_overflow => bounded_overflow_wrong += 1,
                    DecodeStatus::Retrieved(_) => wrong += 1,
                    _ => errors += 1,
                }
            }
        }
    }
    verdict(
        wrong == 0,
        format!(
            "{trials} trials x {} decoders, {wrong} wrong retrievals, {errors} ambiguous/failed, \
             {bounded_overflow_wrong} wrong after bound overflow",
            configs.len()
        ),
    )
}

fn bounded_soundness() -> Verdict {
    let mut mismatched = 0;
    let mut clean = 0;
    let mut detail = Vec::new();
    let mut reference_overflow = None;
    for (c, l, m) in [(8, 64, 1018), (8, 16, 64)] {
        let mut rates = Vec::new();
        for seed in SEEDS {
            let (store, messages) = build(c, l, m, seed);
            let sd = DecodeConfig::new(Rule::Sd, 4);
            let bounded = DecodeConfig::new(Rule::SdBounded { beta: 2 }, 4);
            let mut overflow = 0;
            for trial in 0..1000 {
                let (_, query) = draw_query(&messages, 4, seed, trial);
                let b = decode(&store, &query, &bounded).unwrap();
                if b.beta_overflow {
                    overflow += 1;
                    continue;
                }
                clean += 1;
                if !b.same_result(&decode(&store, &query, &sd).unwrap()) {
                    mismatched += 1;
                }
            }
            let rate = overflow as f64 / 1000.0;
            reference_overflow.get_or_insert(rate);
            rates.push(rate);
        }
        detail.push(format!("(c={c},l={l},M={m}) overflow rate per seed {rates:?}"));
    }
    let overflow = reference_overflow.unwrap();
    verdict(
        mismatched == 0 && overflow == 0.0,
        format!(
            "{clean} overflow-free trials, {mismatched} differ from SD; overflow rate at l=64 seed 1 = {overflow}; {}",
            detail.join("; ")
        ),
    )
}

fn large_config() -> Verdict {
    let (store, messages) = build(8, 400, 39_754, 9);
    let link_bytes = store.link_bytes();
    let start = Instant::now();
    let cfg = DecodeConfig::new(Rule::SdBounded { beta: 2 }, 4);
    let mut retrieved = 0;
    for trial in 0..100 {
        let (i, query) = draw_query(&messages, 4, 9, trial);
        let out = decode(&store, &query, &cfg).unwrap();
        retrieved += usize::from(out.status.retrieved() == Some(&messages[i]));
    }
    let elapsed = start.elapsed();
    let mut bytes = Vec::new();
    save_network(&store, &mut bytes).unwrap();
    let payload = bytes.len() - HEADER_LEN;
    let loaded = load_network(&bytes[..]).unwrap();
    let mut again = Vec::new();
    save_network(&loaded, &mut again).unwrap();
    let exact = loaded == store && again == bytes;
    let pass = link_bytes <= 2 << 20
        && elapsed.as_secs_f64() < 10.0
        && payload == 1_120_000
        && payload == payload_len(store.params())
        && exact;
    verdict(
        pass,
        format!(
            "links {link_bytes} bytes, 100 queries in {:.3}s ({retrieved} retrieved), payload {payload} bytes, \
             round trip {}",
            elapsed.as_secs_f64(),
            if exact { "exact" } else { "differs" }
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 8] = [
        ("1 decoder equivalence", decoder_equivalence),
        ("2 reference resource figures", reference_figures),
        ("3 beta reproduction", beta_reproduction),
        ("4 reference density", density),
        ("5 cycle accounting", cycle_accounting),
        ("6 clique survival", clique_survival),
        ("7 bounded decoder soundness", bounded_soundness),
        ("8 large configuration", large_config),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| verdict(false, "panicked"));
        failed += usize::from(!v.pass);
        println!(
            "{} criterion {name}: {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("N/A  criterion 9 synthesis figures: LUTs, registers, clock rate and CPU speed-up are not modeled");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
