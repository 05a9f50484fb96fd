use super::config::echo;
use super::sweep::RunSettings;
use super::table::{Cell, ResultTable};
use crate::model::{SystemParams, TruncationSpec};
use crate::numeric::{truncation_certify, CertifyOptions, CertifyReport, NumericError};

/// Runs the truncation certification from `base` and tabulates every round.
pub fn certify_table(
    params: &SystemParams,
    base: TruncationSpec,
    settings: &RunSettings,
) -> Result<(CertifyReport, ResultTable), NumericError> {
    let opts = CertifyOptions {
        max_cutoff: settings.certify_max_cutoff,
        steady: settings.steady.clone(),
        ..CertifyOptions::default()
    };
    let report = truncation_certify(params, base, settings.certify_tol, &opts)?;
    let cols = [
        "step",
        "n1_max",
        "n2_max",
        "nm_max",
        "dimension",
        "g1",
        "g2",
        "g12",
        "change_n1_max",
        "change_n2_max",
        "change_nm_max",
    ];
    let mut t = ResultTable::new(cols.iter().map(|s| s.to_string()).collect());
    t.metadata = echo(params, base, None, settings);
    t.set_meta("floor", super::format_number(opts.floor));
    for (i, s) in report.steps.iter().enumerate() {
        let mut row: Vec<Cell> = vec![
            i.into(),
            s.trunc.n1_max.into(),
            s.trunc.n2_max.into(),
            s.trunc.nm_max.into(),
            s.trunc.dimension().into(),
        ];
        row.extend(s.values.iter().map(|&v| Cell::from(v)));
        row.extend(s.changes.iter().map(|&v| Cell::from(v)));
        t.push_row(row);
    }
    let c = report.certified;
    t.set_meta("certified_n1_max", c.n1_max.to_string());
    t.set_meta("certified_n2_max", c.n2_max.to_string());
    t.set_meta("certified_nm_max", c.nm_max.to_string());
    Ok((report, t))
}
