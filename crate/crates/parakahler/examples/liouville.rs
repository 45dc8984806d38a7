//! Synthesizes the Liouville surface (`Q = 0`, `H = -1`) from its boundary
//! values and prints the round-trip errors at three resolutions.

use parakahler::grid::Grid2;
use parakahler::integrator::synthesize_minlag;
use parakahler::surface2d::NewtonOptions;
use parakahler::{Signature, C64};

fn main() -> parakahler::Result<()> {
    for n in [25, 49, 97] {
        let g = Grid2::square(-0.48, 0.48, n)?;
        let exact = g.sample(|z| 2f64.ln() - 2.0 * (1.0 - z.norm_sqr()).ln());
        let q = vec![C64::new(0.0, 0.0); g.len()];
        let syn = synthesize_minlag(
            Signature::HYPERBOLIC,
            &g,
            &q,
            &exact,
            &NewtonOptions::default(),
        )?;
        let err_u = syn
            .data
            .u
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let rt = &syn.reconstruction.round_trip;
        println!(
            "n = {n:3}  newton {:2} its  |u - exact| {err_u:.2e}  round trip {:.2e}",
            syn.newton.iterations,
            rt.max_error()
        );
    }
    Ok(())
}
