//! Plot-ready CSV records.

use std::io::Write;

use serde::Serialize;

use crate::asymptotics::ContinuumTrace;
use crate::qubit::ErrTrace;
use crate::schedule::ScheduleRow;

#[derive(Serialize)]
struct ScheduleRecord {
    j: usize,
    gamma_j_degs: f64,
    alpha_j_degs: f64,
    dbar_gamma_j_degs: f64,
    vr_x: f64,
    vr_y: f64,
    vr_z: f64,
    vs_x: f64,
    vs_y: f64,
    vs_z: f64,
}

impl From<&ScheduleRow> for ScheduleRecord {
    fn from(row: &ScheduleRow) -> Self {
        let [vr_x, vr_y, vr_z] = row.r_j.to_array();
        let [vs_x, vs_y, vs_z] = row.s_j.to_array();
        ScheduleRecord {
            j: row.j,
            gamma_j_degs: row.gamma_j.to_degrees(),
            alpha_j_degs: row.alpha_j.to_degrees(),
            dbar_gamma_j_degs: row.dbar_gamma_j.to_degrees(),
            vr_x,
            vr_y,
            vr_z,
            vs_x,
            vs_y,
            vs_z,
        }
    }
}

#[derive(Serialize)]
struct SweepRecord {
    del_lam_degs: f64,
    j: usize,
    gamma_j_degs: f64,
    alpha_j_degs: f64,
}

#[derive(Serialize)]
struct ErrRecord {
    j: usize,
    err: f64,
    s_fin_z: f64,
}

#[derive(Serialize)]
struct SuccessRecord {
    j: usize,
    success: f64,
}

#[derive(Serialize)]
struct ContinuumRecord {
    t: f64,
    g_rads: f64,
    g_degs: f64,
}

fn write_all<W: Write, R: Serialize>(
    out: W,
    records: impl IntoIterator<Item = R>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_schedule<W: Write>(out: W, rows: &[ScheduleRow]) -> csv::Result<()> {
    write_all(out, rows.iter().map(ScheduleRecord::from))
}

/// Long-format sweep: one block of rows per `Δλ`.
pub fn write_sweep<W: Write>(out: W, blocks: &[(f64, Vec<ScheduleRow>)]) -> csv::Result<()> {
    write_all(
        out,
        blocks.iter().flat_map(|(del_lam, rows)| {
            rows.iter().map(move |r| SweepRecord {
                del_lam_degs: del_lam.to_degrees(),
                j: r.j,
                gamma_j_degs: r.gamma_j.to_degrees(),
                alpha_j_degs: r.alpha_j.to_degrees(),
            })
        }),
    )
}

pub fn write_err_trace<W: Write>(out: W, trace: &ErrTrace) -> csv::Result<()> {
    write_all(
        out,
        trace.samples.iter().map(|s| ErrRecord {
            j: s.j,
            err: s.err,
            s_fin_z: s.s_fin_z,
        }),
    )
}

pub fn write_success<W: Write>(out: W, success: &[f64]) -> csv::Result<()> {
    write_all(
        out,
        success
            .iter()
            .enumerate()
            .map(|(j, &p)| SuccessRecord { j, success: p }),
    )
}

pub fn write_continuum<W: Write>(out: W, trace: &ContinuumTrace, every: usize) -> csv::Result<()> {
    write_all(
        out,
        trace
            .samples
            .iter()
            .step_by(every.max(1))
            .map(|&(t, g)| ContinuumRecord {
                t,
                g_rads: g,
                g_degs: g.to_degrees(),
            }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{build_schedule, AfgaParams};

    #[test]
    fn schedule_csv_has_header_and_rows() {
        let rows = build_schedule(&AfgaParams::from_degrees(90.0, 90.0, 3).unwrap());
        let mut buf = Vec::new();
        write_schedule(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "j,gamma_j_degs,alpha_j_degs,dbar_gamma_j_degs,vr_x,vr_y,vr_z,vs_x,vs_y,vs_z"
        );
        assert_eq!(lines.count(), 4);
    }
}
