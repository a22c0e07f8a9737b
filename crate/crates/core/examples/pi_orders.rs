//! Orders of every path out of level 1 for the SNAP model.
//!
//! `cargo run --release --example pi_orders -- [d_A] [N] [rate scale]`

use picheck_core::dyson::{generic_times, pi_order_report, PiOrderOptions};
use picheck_core::models::{snap_model, SnapSpec};
use picheck_core::numerics::random::seeded;

fn main() {
    let d_a: usize = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(4);
    let n: usize = std::env::args().nth(2).map(|s| s.parse().unwrap()).unwrap_or(2);
    let scale: f64 = std::env::args().nth(3).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let spec = SnapSpec::default_for(d_a, n).scaled_rates(scale);
    let sm = snap_model(&spec).unwrap();
    let opts = PiOrderOptions::default();
    let times = generic_times(sm.gate_time, &opts, &mut seeded(7));
    let paths: Vec<_> = (0..d_a).map(|r| (0, r)).collect();
    let start = std::time::Instant::now();
    let rep = pi_order_report(&sm.model, &sm.family, &paths, &times, &opts, Some(&sm.frame));
    println!("{:?}", start.elapsed());
    match rep {
        Ok(rep) => {
            for p in rep.paths {
                println!("{}->{}: {}", p.i + 1, p.r + 1, p.order);
                for e in &p.entries {
                    println!("   t={:.3} {:?}", e.t, e.term_residuals.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>());
                }
            }
        }
        Err(e) => println!("error: {e}"),
    }
}
