use std::io::Write;

use super::continuation::{OrbitFamily, OrbitFamilySample};
use super::fourier::nodes;
use super::integrate::energy;
use crate::error::{Error, Result};
use crate::potential::PotentialModel;

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// One row per node: `t, q1x, q1y, ..., qNx, qNy, energy` with `t` in physical time.
pub fn write_trajectory_csv<W: Write>(
    writer: W,
    model: &PotentialModel,
    sample: &OrbitFamilySample,
    rows: usize,
) -> Result<()> {
    let traj = &sample.trajectory;
    let n = traj.dim() / 2;
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    for i in 1..=n {
        header.push(format!("q{i}x"));
        header.push(format!("q{i}y"));
    }
    header.push("energy".into());
    w.write_record(&header).map_err(csv_err)?;
    for s in nodes(rows.max(1)) {
        let (q, qdot) = traj.state(s);
        let mut rec = vec![(s * traj.lambda).to_string()];
        rec.extend(q.iter().map(f64::to_string));
        rec.push(energy(model, &q, &qdot)?.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Summary rows `amplitude, lambda, period, residual, closure_error, dist_to_orbit`.
/// An unverified sample leaves `closure_error` empty.
pub fn write_family_csv<W: Write>(writer: W, family: &OrbitFamily) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["amplitude", "lambda", "period", "residual", "closure_error", "dist_to_orbit"])
        .map_err(csv_err)?;
    for s in &family.samples {
        w.write_record([
            s.amplitude.to_string(),
            s.lambda.to_string(),
            s.period.to_string(),
            s.residual.to_string(),
            s.closure_error.map(|c| c.to_string()).unwrap_or_default(),
            s.dist_to_orbit.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
