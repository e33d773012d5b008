//! Trajectories of a run as CSV.

use std::fmt::Write as _;

use super::{EvalError, Run, Validator};

/// `t` with at most nine decimals and no trailing zeros.
pub fn format_time(t: f64) -> String {
    let s = format!("{t:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// One row every `step` time units through every situation of `run`,
/// plus a row at each situation's end. Columns are the time and every
/// ground temporal fluent, then the functional fluents when
/// `with_dynamic` is set. Each situation opens with a `# situation k:`
/// comment naming the action that led to it.
pub fn trace_csv(v: &Validator<'_>, run: &Run, step: f64, with_dynamic: bool) -> Result<String, EvalError> {
    let world = v.world();
    let mut out = String::from("time");
    for a in &world.temporal {
        out.push(',');
        out.push_str(&column(&a.symbol, &a.args));
    }
    if with_dynamic {
        for a in &world.dynamic {
            out.push(',');
            out.push_str(&column(&a.symbol, &a.args));
        }
    }
    out.push('\n');
    for (k, sit) in run.situations.iter().enumerate() {
        let start = sit.state.start;
        let end = run.situations.get(k + 1).map_or(run.end, |n| n.state.start).max(start);
        let label = match sit.action {
            Some(i) => run.report.actions[i].term(),
            None => "S0".to_string(),
        };
        let _ = writeln!(out, "# situation {k}: {label}");
        let evo = v.evolution(&sit.state)?;
        let mut times = Vec::new();
        let mut j = 0u64;
        loop {
            let t = start + j as f64 * step;
            if t >= end - 1e-12 * end.abs().max(1.0) {
                break;
            }
            times.push(t);
            j += 1;
        }
        times.push(end);
        for t in times {
            out.push_str(&format_time(t));
            for y in evo.values_at(t)? {
                let _ = write!(out, ",{y}");
            }
            if with_dynamic {
                for a in &world.dynamic {
                    let _ = write!(out, ",{}", sit.state.fns[a]);
                }
            }
            out.push('\n');
        }
    }
    Ok(out)
}

fn column(symbol: &str, args: &[String]) -> String {
    if args.is_empty() {
        symbol.to_string()
    } else {
        format!("{symbol}({})", args.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trimmed_times() {
        assert_eq!(format_time(12.0), "12");
        assert_eq!(format_time(0.1 + 0.2), "0.3");
        assert_eq!(format_time(52.5), "52.5");
        assert_eq!(format_time(-0.0), "0");
    }
}
