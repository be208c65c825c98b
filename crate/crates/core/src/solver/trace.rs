use std::io::{self, BufRead, Write};

pub const TRACE_HEADER: &str =
    "iter,cost,gradnorm,step,backtracks,seconds,tangent_gradnorm,slope,beta";

/// One iterate. `step` and `backtracks` describe the step taken from it.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub cost: f64,
    /// Norm of the Riemannian gradient in the method's own metric.
    pub gradnorm: f64,
    pub step: f64,
    pub backtracks: usize,
    pub seconds: f64,
    /// `‖P^t ∇f(X)‖_F`.
    pub tangent_gradnorm: f64,
    /// `g(ξ, η)` for the direction searched from this iterate.
    pub slope: f64,
    /// Conjugacy coefficient used for that direction, after clamping and
    /// restarts.
    pub beta: f64,
}

pub fn write_trace_csv(w: &mut impl Write, rows: &[TraceRow]) -> io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.iter,
            r.cost,
            r.gradnorm,
            r.step,
            r.backtracks,
            r.seconds,
            r.tangent_gradnorm,
            r.slope,
            r.beta
        )?;
    }
    Ok(())
}

/// Parses a trace written by [`write_trace_csv`].
pub fn read_trace_csv(r: impl BufRead) -> Result<Vec<TraceRow>, String> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or("empty trace file")?
        .map_err(|e| e.to_string())?;
    if header.trim() != TRACE_HEADER {
        return Err(format!(
            "unexpected trace header '{}', expected '{TRACE_HEADER}'",
            header.trim()
        ));
    }
    let mut rows = Vec::new();
    for (ln, line) in lines.enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(format!(
                "line {}: expected 9 fields, found {}",
                ln + 2,
                f.len()
            ));
        }
        let num = |i: usize| {
            f[i].trim()
                .parse::<f64>()
                .map_err(|e| format!("line {}: {e}", ln + 2))
        };
        let int = |i: usize| {
            f[i].trim()
                .parse::<usize>()
                .map_err(|e| format!("line {}: {e}", ln + 2))
        };
        rows.push(TraceRow {
            iter: int(0)?,
            cost: num(1)?,
            gradnorm: num(2)?,
            step: num(3)?,
            backtracks: int(4)?,
            seconds: num(5)?,
            tangent_gradnorm: num(6)?,
            slope: num(7)?,
            beta: num(8)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let rows = vec![TraceRow {
            iter: 0,
            cost: 0.1 + 0.2,
            gradnorm: 1e-300,
            step: 0.5,
            backtracks: 2,
            seconds: 0.25,
            tangent_gradnorm: std::f64::consts::PI,
            slope: -1.0 / 3.0,
            beta: 0.7,
        }];
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &rows).unwrap();
        assert_eq!(read_trace_csv(&buf[..]).unwrap(), rows);
        assert!(read_trace_csv(&b"iter,cost\n"[..]).is_err());
    }
}
