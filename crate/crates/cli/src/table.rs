//! Trajectories as named columns, written as CSV or JSON.

use std::io::{self, Write};

use herglotz_core::models::{CoContactState, ContactState, ExtendedState};
use herglotz_core::{FullState, Trajectory};

/// State that flattens into a fixed list of named columns.
pub trait Row {
    fn names() -> Vec<&'static str>;
    fn push_values(&self, out: &mut Vec<f64>);
}

impl Row for ContactState {
    fn names() -> Vec<&'static str> {
        vec!["xi1", "xi2", "xi3", "z"]
    }
    fn push_values(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(&self.xi.to_array());
        out.push(self.z);
    }
}

impl Row for CoContactState {
    fn names() -> Vec<&'static str> {
        vec!["mu1", "mu2", "mu3", "z"]
    }
    fn push_values(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(&self.mu.to_array());
        out.push(self.z);
    }
}

impl<B: Row> Row for ExtendedState<B> {
    fn names() -> Vec<&'static str> {
        let mut n = B::names();
        n.extend(["alpha1", "alpha2", "alpha3"]);
        n
    }
    fn push_values(&self, out: &mut Vec<f64>) {
        self.base.push_values(out);
        out.extend_from_slice(&self.alpha.to_array());
    }
}

impl<S: Row> Row for FullState<S> {
    fn names() -> Vec<&'static str> {
        let mut n = S::names();
        n.extend(["r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33"]);
        n
    }
    fn push_values(&self, out: &mut Vec<f64>) {
        self.body.push_values(out);
        out.extend_from_slice(&self.g.to_row_major());
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// `t`, the state columns, then the diagnostics in field order.
    pub fn from_trajectory<S: Row>(traj: &Trajectory<S>) -> Self {
        let mut columns = vec!["t"];
        columns.extend(S::names());
        columns.extend_from_slice(traj.diagnostic_names());
        let rows = (0..traj.len())
            .map(|k| {
                let mut row = Vec::with_capacity(columns.len());
                row.push(traj.times[k]);
                traj.states[k].push_values(&mut row);
                row.extend(traj.sample_diagnostics(k).map(|(_, v)| v));
                row
            })
            .collect();
        Self { columns, rows }
    }

    /// Header line, then one line per sample with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        let mut line = String::new();
        for row in &self.rows {
            line.clear();
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{v:.16e}"));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// `{"meta": …, "columns": […], "rows": [[…], …]}`.
    pub fn write_json<W: Write>(&self, meta: serde_json::Value, mut w: W) -> io::Result<()> {
        let doc = serde_json::json!({ "meta": meta, "columns": self.columns, "rows": self.rows });
        serde_json::to_writer(&mut w, &doc)?;
        writeln!(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use herglotz_core::dynamics::{integrate, LpjField, Method};
    use herglotz_core::{CoalgebraVector, SystemSpec};

    #[test]
    fn csv_round_trips_doubles() {
        let spec = SystemSpec::diagonal([1.0, 2.0, 3.0], 0.1).unwrap();
        let s0 = CoContactState::new(CoalgebraVector::new(1.0, 2.0, 3.0), 0.0);
        let traj = integrate(&LpjField::new(&spec).unwrap(), s0, 0.1, 3, Method::Rk4).unwrap();
        let table = Table::from_trajectory(&traj);
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,mu1,mu2,mu3,z,hamiltonian,mu_norm"));
        for (line, row) in lines.zip(&table.rows) {
            let parsed: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            assert_eq!(&parsed, row);
        }
    }
}
