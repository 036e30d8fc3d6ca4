//! Covering ILP in CPLEX LP text format.

use std::io::Write;

use super::DirectedGraph;
use crate::error::Result;

/// Terms per output line; keeps lines well under the LP format's length limit.
const TERMS_PER_LINE: usize = 16;

/// Writes `min Σ x_v  s.t.  x_v + Σ_{u->v} x_u >= 1,  x binary`.
///
/// Constraint `c{v}` lists `x{v}` first, then the in-neighbours ascending, so
/// the output is byte-stable for a given graph.
pub fn export_ilp<W: Write>(g: &DirectedGraph, mut sink: W) -> Result<()> {
    let n = g.n();
    writeln!(sink, "\\ directed minimum dominating set, {n} vertices")?;
    writeln!(sink, "Minimize")?;
    write_terms(&mut sink, " obj:", &(0..n).collect::<Vec<_>>(), "")?;
    writeln!(sink, "Subject To")?;
    for v in 0..n {
        let mut vars = vec![v];
        vars.extend_from_slice(g.inn(v));
        write_terms(&mut sink, &format!(" c{v}:"), &vars, " >= 1")?;
    }
    writeln!(sink, "Binary")?;
    for chunk in (0..n).collect::<Vec<_>>().chunks(TERMS_PER_LINE) {
        let names: Vec<String> = chunk.iter().map(|v| format!("x{v}")).collect();
        writeln!(sink, " {}", names.join(" "))?;
    }
    writeln!(sink, "End")?;
    sink.flush()?;
    Ok(())
}

fn write_terms<W: Write>(sink: &mut W, label: &str, vars: &[usize], tail: &str) -> Result<()> {
    write!(sink, "{label}")?;
    for (i, v) in vars.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            write!(sink, "\n   ")?;
        }
        if i == 0 {
            write!(sink, " x{v}")?;
        } else {
            write!(sink, " + x{v}")?;
        }
    }
    writeln!(sink, "{tail}")?;
    Ok(())
}
