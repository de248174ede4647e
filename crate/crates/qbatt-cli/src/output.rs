//! CSV serialization of trajectories and summaries.
//!
//! Floating-point columns carry 17 significant digits, enough to round-trip
//! an f64 exactly, so summaries recomputed from a written CSV match the
//! in-memory values bit for bit. Disabled analyses appear as `nan`.

use std::io::{self, Write};

use qbatt_core::analysis::{SampleRow, Summary, Trajectory};

/// Fixed trajectory column order.
pub const TRAJECTORY_HEADER: &str = "t,W_max,dW,P,sigma_A,sqrt_IQ,bound_geo,sqrt_IQ_ext,\
                                     bound_ext,W_diss,S_irr_rate,bound_thermo,bound_ref,f_t,\
                                     trace_err,min_eig,flags";

pub const SUMMARY_HEADER: &str = "preset,max_dW,t_at_max_dW,max_absP,t_at_max_absP,\
                                  saturation_fraction,min_slack_geo,min_slack_ext,\
                                  min_slack_thermo,min_slack_ref,max_trace_err,min_eig,\
                                  max_herm_defect,max_spectral_gap,flagged_samples,seed";

/// Full-precision decimal form of an f64 (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Parse a column written by [`fmt_f64`].
pub fn parse_f64(s: &str) -> Option<f64> {
    if s == "nan" {
        Some(f64::NAN)
    } else {
        s.parse().ok()
    }
}

fn row_line(r: &SampleRow) -> String {
    let cols = [
        r.t,
        r.w_max,
        r.dw,
        r.p,
        r.sigma_a,
        r.sqrt_iq,
        r.bound_geo,
        r.sqrt_iq_ext,
        r.bound_ext,
        r.w_diss,
        r.s_irr_rate,
        r.bound_thermo,
        r.bound_ref,
        r.f_t,
        r.trace_err,
        r.min_eig,
    ];
    let mut line = cols
        .iter()
        .map(|&v| fmt_f64(v))
        .collect::<Vec<_>>()
        .join(",");
    line.push(',');
    line.push_str(&r.flags.to_string());
    line
}

pub fn write_trajectory_csv(w: &mut impl Write, traj: &Trajectory) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for row in &traj.rows {
        writeln!(w, "{}", row_line(row))?;
    }
    Ok(())
}

pub fn summary_line(s: &Summary, seed: u64) -> String {
    let floats = [
        s.max_dw,
        s.t_at_max_dw,
        s.max_abs_p,
        s.t_at_max_abs_p,
        s.saturation_fraction,
        s.min_slack_geo,
        s.min_slack_ext,
        s.min_slack_thermo,
        s.min_slack_ref,
        s.max_trace_err,
        s.min_eig,
        s.max_herm_defect,
        s.max_spectral_gap,
    ];
    let mut line = s.label.clone();
    for v in floats {
        line.push(',');
        line.push_str(&fmt_f64(v));
    }
    line.push(',');
    line.push_str(&s.flagged_samples.to_string());
    line.push(',');
    line.push_str(&seed.to_string());
    line
}

pub fn write_summary_csv(
    w: &mut impl Write,
    summaries: &[Summary],
    seed: u64,
) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for s in summaries {
        writeln!(w, "{}", summary_line(s, seed))?;
    }
    Ok(())
}

/// A trajectory CSV read back for consistency checks.
pub struct CsvTrajectory {
    pub rows: Vec<SampleRow>,
}

pub fn read_trajectory_csv(text: &str) -> Result<CsvTrajectory, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty CSV")?;
    if header != TRAJECTORY_HEADER {
        return Err(format!("unexpected header: {header}"));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 17 {
            return Err(format!("line {}: expected 17 columns, got {}", idx + 2, cols.len()));
        }
        let f = |i: usize| -> Result<f64, String> {
            parse_f64(cols[i]).ok_or_else(|| format!("line {}: bad float {:?}", idx + 2, cols[i]))
        };
        rows.push(SampleRow {
            t: f(0)?,
            w_max: f(1)?,
            dw: f(2)?,
            p: f(3)?,
            sigma_a: f(4)?,
            sqrt_iq: f(5)?,
            bound_geo: f(6)?,
            sqrt_iq_ext: f(7)?,
            bound_ext: f(8)?,
            w_diss: f(9)?,
            s_irr_rate: f(10)?,
            bound_thermo: f(11)?,
            bound_ref: f(12)?,
            f_t: f(13)?,
            trace_err: f(14)?,
            min_eig: f(15)?,
            flags: cols[16]
                .parse()
                .map_err(|_| format!("line {}: bad flags {:?}", idx + 2, cols[16]))?,
        });
    }
    Ok(CsvTrajectory { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trip_is_exact() {
        for v in [
            0.0,
            1.0 / 3.0,
            -2.718281828459045e-7,
            6.443568649380373,
            f64::MIN_POSITIVE,
            1.7976931348623157e308,
        ] {
            let parsed = parse_f64(&fmt_f64(v)).unwrap();
            assert_eq!(v.to_bits(), parsed.to_bits(), "round-trip of {v}");
        }
        assert!(parse_f64(&fmt_f64(f64::NAN)).unwrap().is_nan());
    }
}
