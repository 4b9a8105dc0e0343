//! Two-column series for external plotting tools.
//!
//! | kind | file            | columns                      |
//! |------|-----------------|------------------------------|
//! | Fig6 | `<prefix>.csv`  | `segment_area_mm2,data_rate_bps` |
//! | Fig3 | `<prefix>_snr_<label>.csv`  | `carrier,snr_db`  |
//! | Fig3 | `<prefix>_bits_<label>.csv` | `carrier,bits`    |

use slipt_core::formats::format_f64;
use slipt_core::link::LinkReport;

use crate::artifact::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Data rate against segment junction area, one point per report.
    Fig6,
    /// Per-carrier SNR and loaded bits, two series per report.
    Fig3,
}

#[derive(Debug, Clone, Copy)]
pub struct PlotInput<'a> {
    pub label: &'a str,
    /// [mm²]
    pub segment_area: f64,
    pub report: &'a LinkReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    /// File stem suffix, empty for the single Fig6 series.
    pub name: String,
    pub columns: [&'static str; 2],
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn file_name(&self, prefix: &str) -> String {
        if self.name.is_empty() {
            format!("{prefix}.csv")
        } else {
            format!("{prefix}_{}.csv", self.name)
        }
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&self.columns);
        for &(x, y) in &self.points {
            t.row([format_f64(x), format_f64(y)]);
        }
        t
    }
}

pub fn emit_plot_data(inputs: &[PlotInput<'_>], kind: PlotKind) -> Vec<Series> {
    match kind {
        PlotKind::Fig6 => vec![Series {
            name: String::new(),
            columns: ["segment_area_mm2", "data_rate_bps"],
            points: inputs.iter().map(|i| (i.segment_area, i.report.data_rate)).collect(),
        }],
        PlotKind::Fig3 => inputs
            .iter()
            .flat_map(|i| {
                let snr = &i.report.snr;
                let snr_points = snr
                    .snr_linear
                    .iter()
                    .zip(&snr.omitted)
                    .enumerate()
                    .filter(|(_, (&s, &o))| !o && s > 0.0)
                    .map(|(k, (&s, _))| (k as f64, 10.0 * s.log10()))
                    .collect();
                let bits = i.report.plan.bits_per_subcarrier.iter().enumerate().map(|(k, &b)| (k as f64, b as f64)).collect();
                [
                    Series { name: format!("snr_{}", i.label), columns: ["carrier", "snr_db"], points: snr_points },
                    Series { name: format!("bits_{}", i.label), columns: ["carrier", "bits"], points: bits },
                ]
            })
            .collect(),
    }
}
