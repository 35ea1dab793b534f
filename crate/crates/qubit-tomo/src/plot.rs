//! Gnuplot scripts over the emitted CSV files.
//!
//! Scripts use paths relative to their own directory; run them with
//! `gnuplot <tag>.gp` from there. Output is `<tag>.svg`.

use std::fmt::Write as _;

use crate::reproduce::Reproduction;
use crate::sweep::{FitRow, SweepRow};

/// Files and series a script draws.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotInputs<'a> {
    pub name: &'a str,
    pub title: &'a str,
    pub data_file: &'a str,
    pub rows: &'a [SweepRow],
    pub theory_file: Option<&'a str>,
    pub fits: &'a [FitRow],
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// Distinct `(protocol, measurement, state_id)` keys in order of appearance.
fn series(rows: &[SweepRow]) -> Vec<(&str, &str, &str)> {
    let mut keys = Vec::new();
    for r in rows {
        let k = (r.protocol.as_str(), r.measurement.as_str(), r.state_id.as_str());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys
}

fn filter(protocol: &str, measurement: &str, state_id: &str) -> String {
    format!(
        "(strcol(1) eq {} && strcol(2) eq {} && strcol(3) eq {} ? $4 : NaN)",
        quote(protocol),
        quote(measurement),
        quote(state_id)
    )
}

pub fn script(p: &PlotInputs<'_>) -> String {
    let mut s = String::new();
    let keys = series(p.rows);
    let multi = keys.iter().any(|k| k.1 != keys[0].1 || k.2 != keys[0].2);
    let label = |k: &(&str, &str, &str)| {
        if multi {
            format!("{} {} {}", k.0, k.1, k.2)
        } else {
            k.0.to_string()
        }
    };

    let _ = writeln!(s, "# {}", p.title);
    let _ = writeln!(s, "set terminal svg size 900,600 dynamic");
    let _ = writeln!(s, "set output {}", quote(&format!("{}.svg", p.name)));
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set title {}", quote(p.title));
    let _ = writeln!(s, "set logscale xy");
    let _ = writeln!(s, "set format x '10^{{%L}}'");
    let _ = writeln!(s, "set format y '10^{{%L}}'");
    let _ = writeln!(s, "set xlabel 'N'");
    let _ = writeln!(s, "set ylabel 'mean infidelity'");
    let _ = writeln!(s, "set key outside right");
    for (i, f) in p.fits.iter().enumerate() {
        let _ = writeln!(s, "f{i}(x) = {:e} * x**({:.6})", f.c, f.alpha);
    }

    let mut plots = Vec::new();
    for (i, k) in keys.iter().enumerate() {
        let colour = i + 1;
        plots.push(format!(
            "{} skip 1 using {}:5:6 with yerrorpoints lc {colour} pt 7 ps 0.6 title {}",
            quote(p.data_file),
            filter(k.0, k.1, k.2),
            quote(&label(k))
        ));
        if let Some(theory) = p.theory_file {
            plots.push(format!(
                "{} skip 1 using {}:5 with lines lc {colour} dt 2 notitle",
                quote(theory),
                filter(k.0, k.1, k.2)
            ));
        }
        if let Some(j) = p
            .fits
            .iter()
            .position(|f| f.protocol == k.0 && f.measurement == k.1 && f.state_id == k.2)
        {
            plots.push(format!(
                "f{j}(x) with lines lc {colour} dt 3 title {}",
                quote(&format!("fit alpha={:.3}", p.fits[j].alpha))
            ));
        }
    }
    if plots.is_empty() {
        let _ = writeln!(s, "# no data rows");
    } else {
        let _ = writeln!(s, "plot \\\n    {}", plots.join(", \\\n    "));
    }
    s
}

pub fn gnuplot_script(rep: &Reproduction) -> String {
    let tag = &rep.experiment.tag;
    let data = format!("{tag}.csv");
    let theory = format!("{tag}_theory.csv");
    script(&PlotInputs {
        name: tag,
        title: &rep.experiment.title,
        data_file: &data,
        rows: &rep.result.rows,
        theory_file: (!rep.theory.is_empty()).then_some(theory.as_str()),
        fits: &rep.fits,
    })
}
