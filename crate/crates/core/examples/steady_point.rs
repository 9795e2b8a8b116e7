//! Evaluate one operating point with the moment hierarchy and cross-check
//! it against the reduced-model Fock oracle at modest cutoffs.

use ppcorr::*;

fn main() -> Result<(), EngineError> {
    let params = ModelParams {
        delta1: 50.0,
        nbar: 0.5,
        ..ModelParams::demo()
    };

    let moments = MomentEngine::default().steady(&params)?;
    let c = moments.correlations;
    println!(
        "moments:      mean_a={:.6} mean_b={:.6} csi={:?}",
        c.mean_a, c.mean_b, c.csi
    );

    let oracle = ReducedFockEngine {
        cfg: FockConfig {
            n_a: 10,
            n_b: 24,
            tol: 1e-2,
            max_n_a: 20,
            max_n_b: 96,
        },
    };
    let fock = oracle.steady(&params)?;
    let f = fock.correlations;
    println!(
        "fock oracle:  mean_a={:.6} mean_b={:.6} csi={:?} (cutoffs {:?})",
        f.mean_a, f.mean_b, f.csi, fock.diagnostics.cutoffs
    );
    Ok(())
}
