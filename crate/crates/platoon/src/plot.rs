//! CSV plot data.

use std::f64::consts::FRAC_PI_4;
use std::io::Write;

use platoon_core::{
    quasipoly_parts, GainRegion, InterlacingReport, SimulationTrace, SurfacePoint,
};

use crate::error::OutputError;
use crate::format::sig;

/// Samples per curve in `interlacing-curves` and `condition-b-curve`.
pub const CURVE_POINTS: usize = 2001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    RegionBoundary,
    SweepSurface,
    InterlacingCurves,
    DeltaTraces,
    ConditionBCurve,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::RegionBoundary => "region-boundary",
            PlotKind::SweepSurface => "sweep-surface",
            PlotKind::InterlacingCurves => "interlacing-curves",
            PlotKind::DeltaTraces => "delta-traces",
            PlotKind::ConditionBCurve => "condition-b-curve",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.name())
    }
}

#[derive(Clone, Copy, Debug)]
pub enum PlotSource<'a> {
    Region(&'a GainRegion),
    Surface(&'a [SurfacePoint]),
    Internal(&'a InterlacingReport),
    Trace(&'a SimulationTrace),
}

impl PlotSource<'_> {
    fn name(&self) -> &'static str {
        match self {
            PlotSource::Region(_) => "a gain region",
            PlotSource::Surface(_) => "a sweep surface",
            PlotSource::Internal(_) => "an interlacing report",
            PlotSource::Trace(_) => "a simulation trace",
        }
    }
}

pub fn emit_plot_data<W: Write>(
    out: W,
    source: PlotSource<'_>,
    kind: PlotKind,
    precision: usize,
) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(out);
    let f = |x: f64| sig(x, precision);
    match (kind, source) {
        (PlotKind::RegionBoundary, PlotSource::Region(g)) => {
            w.write_record(["line", "kv", "kp"])?;
            for (line, a, b) in [("s1", g.a1, g.b1), ("s2", g.a2, g.b2)] {
                w.write_record([line, &f(a * g.rhs), "0"])?;
                w.write_record([line, "0", &f(b * g.rhs)])?;
            }
        }
        (PlotKind::SweepSurface, PlotSource::Surface(points)) => {
            w.write_record(["omega", "tau", "magnitude"])?;
            for p in points {
                w.write_record([f(p.omega), f(p.tau), f(p.magnitude)])?;
            }
        }
        (PlotKind::InterlacingCurves, PlotSource::Internal(rep)) => {
            w.write_record(["theta", "d_r", "d_i", "marker"])?;
            let theta_max = theta_span(rep);
            for k in 0..CURVE_POINTS {
                let theta = theta_max * k as f64 / (CURVE_POINTS - 1) as f64;
                let (dr, di) = quasipoly_parts(&rep.params, theta);
                w.write_record([f(theta), f(dr), f(di), String::new()])?;
            }
            for (roots, marker) in [(&rep.roots.real, "real-root"), (&rep.roots.imag, "imag-root")] {
                for &theta in roots {
                    let (dr, di) = quasipoly_parts(&rep.params, theta);
                    w.write_record([f(theta), f(dr), f(di), marker.to_string()])?;
                }
            }
        }
        (PlotKind::ConditionBCurve, PlotSource::Internal(rep)) => {
            w.write_record(["omega", "value"])?;
            let omega_max = theta_span(rep) / rep.params.tau;
            for k in 0..CURVE_POINTS {
                let omega = omega_max * k as f64 / (CURVE_POINTS - 1) as f64;
                w.write_record([f(omega), f(rep.params.condition_b(omega))])?;
            }
        }
        (PlotKind::DeltaTraces, PlotSource::Trace(tr)) => {
            let mut header = vec!["t".to_string()];
            header.extend((1..=tr.followers.len()).map(|i| format!("delta_{i}")));
            w.write_record(&header)?;
            for (k, &t) in tr.time.iter().enumerate() {
                let mut row = vec![f(t)];
                row.extend(tr.followers.iter().map(|s| f(s.delta[k])));
                w.write_record(&row)?;
            }
        }
        (kind, source) => {
            return Err(OutputError::KindMismatch { kind: kind.name(), source_kind: source.name() })
        }
    }
    w.flush()?;
    Ok(())
}

/// `2 l_max pi + pi/4`, the outer edge of the largest counting window.
fn theta_span(rep: &InterlacingReport) -> f64 {
    2.0 * std::f64::consts::PI * rep.roots.l_max.max(1) as f64 + FRAC_PI_4
}

/// Full trace: `t, x_0, v_0, a_0`, then `x_i, v_i, a_i, u_i, delta_i` per follower.
pub fn write_trace<W: Write>(out: W, tr: &SimulationTrace, precision: usize) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["t", "x_0", "v_0", "a_0"].map(String::from).into();
    for i in 1..=tr.followers.len() {
        for col in ["x", "v", "a", "u", "delta"] {
            header.push(format!("{col}_{i}"));
        }
    }
    w.write_record(&header)?;
    let f = |x: f64| sig(x, precision);
    for (k, &t) in tr.time.iter().enumerate() {
        let mut row = vec![f(t), f(tr.lead.x[k]), f(tr.lead.v[k]), f(tr.lead.a[k])];
        for s in &tr.followers {
            row.extend([s.x[k], s.v[k], s.a[k], s.u[k], s.delta[k]].map(f));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
