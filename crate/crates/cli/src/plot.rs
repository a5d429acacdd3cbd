//! gnuplot scripts for a run directory. Paths in the script are relative to
//! the run directory, so run `gnuplot plot.gp` from inside it.

use std::fmt::Write as _;

pub struct PlotInputs<'a> {
    pub title: &'a str,
    /// Snapshot CSVs (relative paths) and their times.
    pub snapshots: Vec<(String, f64)>,
    pub has_fit: bool,
    pub overlays: Vec<(String, f64)>,
}

pub fn gnuplot_script(p: &PlotInputs) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s);

    let _ = writeln!(s, "set output 'profiles.png'");
    let _ = writeln!(s, "set title '{}: u(t, x)'", p.title);
    let _ = writeln!(s, "set xlabel 'x'");
    let _ = writeln!(s, "set ylabel 'u'");
    let mut curves: Vec<String> = p
        .snapshots
        .iter()
        .map(|(f, t)| format!("'{f}' using 1:2 with lines title 't = {t}'"))
        .collect();
    curves.extend(
        p.overlays
            .iter()
            .map(|(f, t)| format!("'{f}' using 1:2 with points pt 7 ps 0.3 title 'reference t = {t}'")),
    );
    if !curves.is_empty() {
        let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    }
    let _ = writeln!(s);

    let _ = writeln!(s, "set output 'interfaces.png'");
    let _ = writeln!(s, "set title '{}: interfaces'", p.title);
    let _ = writeln!(s, "set xlabel 't'");
    let _ = writeln!(s, "set ylabel 'xi'");
    let _ = writeln!(s, "plot 'track.csv' using 1:3 with dots title 'xi(t)'");

    if p.has_fit {
        let _ = writeln!(s);
        let _ = writeln!(s, "set output 'residual.png'");
        let _ = writeln!(s, "set title '{}: residual against t0'", p.title);
        let _ = writeln!(s, "set xlabel 't0'");
        let _ = writeln!(s, "set ylabel 'residual'");
        let _ = writeln!(s, "set logscale y");
        let _ = writeln!(s, "plot 'residual.csv' using 1:2 with lines title 'residual'");
        let _ = writeln!(s, "unset logscale y");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn references_every_file() {
        let s = gnuplot_script(&PlotInputs {
            title: "run",
            snapshots: vec![("snapshots/a.csv".into(), 0.0), ("snapshots/b.csv".into(), 0.1)],
            has_fit: true,
            overlays: vec![("overlay/c.csv".into(), 0.1)],
        });
        for f in ["snapshots/a.csv", "snapshots/b.csv", "overlay/c.csv", "track.csv", "residual.csv"] {
            assert!(s.contains(f), "{f}");
        }
    }
}
