// quick diagnostic: per-cycle degradation and schedules, hvac vs plain
use peakshave_cli::commands::assess_report;
use peakshave_cli::run_config::RunConfig;
fn main() {
    let plain = assess_report(&RunConfig::load("data/run_assess.toml".as_ref()).unwrap()).unwrap().0;
    let hvac = assess_report(&RunConfig::load("data/run_assess_hvac.toml".as_ref()).unwrap()).unwrap().0;
    for (p, h) in plain.cycles.iter().zip(&hvac.cycles) {
        println!(
            "{:02}: deg_hi plain {:8.2} hvac {:8.2}  sched {:?}  save_hi plain {:8.2} hvac {:8.2}  peak {:7.2} -> {:7.2}",
            p.month, p.degradation.hi, h.degradation.hi, h.hvac_schedule.hi,
            p.gross_saving.hi, h.gross_saving.hi, p.peak_kw.hi, h.peak_kw.hi
        );
    }
}
