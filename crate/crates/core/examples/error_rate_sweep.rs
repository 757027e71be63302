//! Sweep the stored message count and emit the error-rate CSV for several
//! decoders run on identical trials.
//!
//! ```text
//! cargo run --release --example error_rate_sweep > sweep.csv
//! ```

use scn::{
    compare_decoders, emit_csv, run_experiment, DecodeConfig, ErasedPolicy, ExperimentSpec, NetworkParams, Rule,
};

fn main() -> scn::Result<()> {
    let params = NetworkParams::new(8, 64)?;
    let configs = vec![
        DecodeConfig::new(Rule::Mpd, 4),
        DecodeConfig::new(Rule::Sd, 4),
        DecodeConfig::new(Rule::Sd, 4).with_policy(ErasedPolicy::StrictOr),
        DecodeConfig::new(Rule::SdBounded { beta: 2 }, 4),
        DecodeConfig::new(Rule::SdBounded { beta: 4 }, 4),
    ];
    let spec = ExperimentSpec::new(params, vec![64, 256, 512, 1018, 1500], 2000, 4, 11).with_configs(configs);
    let result = run_experiment(&spec)?;
    emit_csv(&result, std::io::stdout().lock())?;

    for row in compare_decoders(&spec)? {
        eprintln!(
            "M={} beta={}: mpd/sd-strict {:.3} skip/strict {:.3} bounded/sd {:.3} (no overflow {:.3}) overflow {:.3}",
            row.m,
            row.bounded.rule.beta().unwrap_or(0),
            row.mpd_vs_sd_strict,
            row.sd_skip_vs_sd_strict,
            row.bounded_vs_sd,
            row.bounded_vs_sd_no_overflow,
            row.overflow_rate
        );
    }
    Ok(())
}
