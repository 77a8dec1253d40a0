//! Spin-echo coherence of one qubit with the bichromatic drive off and on at
//! the first IDD point, under 1/f-like qubit-frequency noise.

use lfgate::sequence::idd_echo::{coherence_scan, fit_coherence_time, log_grid, IddEchoConfig};

fn main() -> lfgate::Result<()> {
    let cfg = IddEchoConfig::default();
    let t = std::time::Instant::now();
    let mut times = Vec::new();
    for (idd_on, start, stop) in [(false, 20e-6, 5e-3), (true, 200e-6, 40e-3)] {
        let durations = log_grid(start, stop, 16);
        let contrast = coherence_scan(&cfg, &durations, idd_on)?;
        println!("IDD {}", if idd_on { "on" } else { "off" });
        for (d, c) in durations.iter().zip(&contrast) {
            println!("  {:>10.1} us  {:.4}", d * 1e6, c);
        }
        let fit = fit_coherence_time(&durations, &contrast)?;
        println!("  T2 = {:.1} us, exponent {:.2}", fit.coherence_time * 1e6, fit.exponent);
        times.push(fit.coherence_time);
    }
    println!("ratio {:.1} ({:.1} s)", times[1] / times[0], t.elapsed().as_secs_f64());
    Ok(())
}
