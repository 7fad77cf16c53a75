//! `curves`: closed-form curve data for the three security figures.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use clap::ValueEnum;
use cqka_core::analysis::{curve_detection_min, curve_eve_information, curve_success};

use crate::config::ConfigError;
use crate::output::{write_output, TableCsv};

/// Which figure's data to emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    /// Detection probability vs overlap angle (published and derived forms).
    Fig2,
    /// Eavesdropper information vs overlap angle.
    Fig3,
    /// Success probability vs key length for four detection rates.
    Fig4,
}

/// Detection-rate series for the success-probability figure.
pub const FIG4_DETECTION_RATES: [f64; 4] = [0.0, 0.125, 0.25, 0.5];

pub fn execute(
    figure: FigureId,
    points: usize,
    n_max: usize,
    out: &std::path::Path,
) -> Result<PathBuf, ConfigError> {
    if points < 2 {
        return Err(ConfigError::Domain("curves need at least 2 grid points".into()));
    }
    if n_max < 1 {
        return Err(ConfigError::Domain("n-max must be at least 1".into()));
    }
    let (name, csv) = match figure {
        FigureId::Fig2 => {
            let mut csv = TableCsv::new("alpha,closed_form,closed_form_derived");
            for alpha in linspace(0.0, FRAC_PI_2, points) {
                let pair = curve_detection_min(alpha);
                csv.push(vec![alpha, pair.closed_form, pair.derived]);
            }
            ("fig2.csv", csv)
        }
        FigureId::Fig3 => {
            let mut csv = TableCsv::new("alpha,information");
            for alpha in linspace(0.0, FRAC_PI_2, points) {
                csv.push(vec![alpha, curve_eve_information(alpha)]);
            }
            ("fig3.csv", csv)
        }
        FigureId::Fig4 => {
            let mut csv = TableCsv::new("n,d,success");
            for &d in &FIG4_DETECTION_RATES {
                for n in 1..=n_max {
                    csv.push(vec![n as f64, d, curve_success(n, d)]);
                }
            }
            ("fig4.csv", csv)
        }
    };
    write_output(out, name, &csv.render())
        .map_err(|e| ConfigError::Domain(format!("write {name}: {e}")))
}

pub fn linspace(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(move |i| if i + 1 == points { hi } else { lo + step * i as f64 })
}
