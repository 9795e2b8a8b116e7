//! CSV emission with a comment header recording the artifact version and the
//! full resolved configuration, so every output file can regenerate itself.

use std::io::Write;

use ppcorr::CorrelationSet;

/// One evaluated sweep point. Failed points carry their error in `status`
/// and empty value cells, never silent gaps.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub nbar: f64,
    pub status: String,
    pub correlations: Option<CorrelationSet>,
    pub abscissa: Option<f64>,
    pub regime_valid: bool,
    pub oracle: Option<OracleColumns>,
}

#[derive(Debug, Clone)]
pub struct OracleColumns {
    pub status: String,
    pub correlations: Option<CorrelationSet>,
    pub cutoffs: Option<(usize, usize)>,
    pub converged: Option<bool>,
}

impl SweepRow {
    pub fn is_failure(&self) -> bool {
        self.status != "ok"
            || self
                .oracle
                .as_ref()
                .map(|o| o.status != "ok")
                .unwrap_or(false)
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn corr_cells(c: &Option<CorrelationSet>) -> [String; 6] {
    match c {
        Some(c) => [
            fmt_f64(c.mean_a),
            fmt_f64(c.mean_b),
            fmt_opt(c.g2_photon),
            fmt_opt(c.g2_phonon),
            fmt_opt(c.g2_cross),
            fmt_opt(c.csi),
        ],
        None => Default::default(),
    }
}

fn rel_dev(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some((x - y).abs() / x.abs().max(y.abs()).max(1e-300)),
        _ => None,
    }
}

/// Write the full CSV: comment header, column header, one line per row.
/// Deterministic for identical inputs (fixed float formatting, no clocks).
pub fn write_csv(
    out: &mut dyn Write,
    parameter: &str,
    resolved_config: &str,
    with_oracle: bool,
    rows: &[SweepRow],
) -> std::io::Result<()> {
    writeln!(out, "# ppcorr v{}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# resolved configuration:")?;
    for line in resolved_config.lines() {
        writeln!(out, "#   {line}")?;
    }
    let mut cols: Vec<&str> = vec![
        parameter,
        "nbar",
        "mean_a",
        "mean_b",
        "g2_photon",
        "g2_phonon",
        "g2_cross",
        "csi",
        "abscissa",
        "regime_valid",
        "status",
    ];
    if with_oracle {
        cols.extend_from_slice(&[
            "oracle_mean_a",
            "oracle_mean_b",
            "oracle_g2_photon",
            "oracle_g2_phonon",
            "oracle_g2_cross",
            "oracle_csi",
            "oracle_n_a",
            "oracle_n_b",
            "oracle_converged",
            "dev_mean_a",
            "dev_mean_b",
            "dev_g2_photon",
            "dev_g2_phonon",
            "dev_g2_cross",
            "dev_csi",
            "oracle_status",
        ]);
    }
    writeln!(out, "{}", cols.join(","))?;

    for row in rows {
        let mut cells: Vec<String> = vec![fmt_f64(row.sweep_value), fmt_f64(row.nbar)];
        cells.extend(corr_cells(&row.correlations));
        cells.push(fmt_opt(row.abscissa));
        cells.push(row.regime_valid.to_string());
        cells.push(row.status.clone());
        if with_oracle {
            let oracle = row.oracle.clone().unwrap_or(OracleColumns {
                status: "off".into(),
                correlations: None,
                cutoffs: None,
                converged: None,
            });
            cells.extend(corr_cells(&oracle.correlations));
            match oracle.cutoffs {
                Some((na, nb)) => {
                    cells.push(na.to_string());
                    cells.push(nb.to_string());
                }
                None => {
                    cells.push(String::new());
                    cells.push(String::new());
                }
            }
            cells.push(
                oracle
                    .converged
                    .map(|b| b.to_string())
                    .unwrap_or_default(),
            );
            let (m, o) = (&row.correlations, &oracle.correlations);
            let devs = match (m, o) {
                (Some(m), Some(o)) => [
                    rel_dev(Some(m.mean_a), Some(o.mean_a)),
                    rel_dev(Some(m.mean_b), Some(o.mean_b)),
                    rel_dev(m.g2_photon, o.g2_photon),
                    rel_dev(m.g2_phonon, o.g2_phonon),
                    rel_dev(m.g2_cross, o.g2_cross),
                    rel_dev(m.csi, o.csi),
                ],
                _ => [None; 6],
            };
            cells.extend(devs.iter().map(|d| fmt_opt(*d)));
            cells.push(oracle.status);
        }
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
