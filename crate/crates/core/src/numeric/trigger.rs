use crate::logic::CmpOp;

use super::{Evolution, NumericError, RExpr};

/// Boolean combination of comparisons between time-dependent expressions;
/// `RExpr::Var(i)` is component `i` of an `Evolution`.
#[derive(Debug, Clone, PartialEq)]
pub enum Cond {
    Const(bool),
    Cmp(CmpOp, RExpr, RExpr),
    Not(Box<Cond>),
    And(Vec<Cond>),
    Or(Vec<Cond>),
}

/// Comparison with a tolerance: `=` holds within `eps`, `>=`/`<=` are
/// widened by `eps`, and the strict forms are their complements.
pub fn compare(op: CmpOp, l: f64, r: f64, eps: f64) -> bool {
    match op {
        CmpOp::Eq => (l - r).abs() <= eps,
        CmpOp::Ge => l >= r - eps,
        CmpOp::Le => l <= r + eps,
        CmpOp::Gt => l > r + eps,
        CmpOp::Lt => l < r - eps,
    }
}

impl Cond {
    pub fn not(c: Cond) -> Cond {
        match c {
            Cond::Const(b) => Cond::Const(!b),
            Cond::Not(x) => *x,
            c => Cond::Not(Box::new(c)),
        }
    }

    pub fn and(parts: Vec<Cond>) -> Cond {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Cond::Const(true) => {}
                Cond::Const(false) => return Cond::Const(false),
                Cond::And(xs) => out.extend(xs),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Cond::Const(true),
            1 => out.pop().unwrap(),
            _ => Cond::And(out),
        }
    }

    pub fn or(parts: Vec<Cond>) -> Cond {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Cond::Const(false) => {}
                Cond::Const(true) => return Cond::Const(true),
                Cond::Or(xs) => out.extend(xs),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Cond::Const(false),
            1 => out.pop().unwrap(),
            _ => Cond::Or(out),
        }
    }

    /// Comparison, folded to a constant when both sides are constant.
    pub fn cmp(op: CmpOp, l: RExpr, r: RExpr, eps: f64) -> Result<Cond, NumericError> {
        if l.is_const() && r.is_const() {
            return Ok(Cond::Const(compare(op, l.eval(0.0, &[])?, r.eval(0.0, &[])?, eps)));
        }
        Ok(Cond::Cmp(op, l, r))
    }

    pub fn eval(&self, t: f64, y: &[f64], eps: f64) -> Result<bool, NumericError> {
        Ok(match self {
            Cond::Const(b) => *b,
            Cond::Cmp(op, l, r) => compare(*op, l.eval(t, y)?, r.eval(t, y)?, eps),
            Cond::Not(x) => !x.eval(t, y, eps)?,
            Cond::And(xs) => {
                for x in xs {
                    if !x.eval(t, y, eps)? {
                        return Ok(false);
                    }
                }
                true
            }
            Cond::Or(xs) => {
                for x in xs {
                    if x.eval(t, y, eps)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    fn atoms<'a>(&'a self, out: &mut Vec<(&'a RExpr, &'a RExpr)>) {
        match self {
            Cond::Const(_) => {}
            Cond::Cmp(_, l, r) => out.push((l, r)),
            Cond::Not(x) => x.atoms(out),
            Cond::And(xs) | Cond::Or(xs) => xs.iter().for_each(|x| x.atoms(out)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trigger {
    pub time: f64,
    /// Set when the condition holds on a set without a least element and
    /// the returned time is the first probe after its infimum.
    pub note: Option<String>,
}

struct Search<'a> {
    cond: &'a Cond,
    evo: &'a Evolution,
    eps_t: f64,
    eps_v: f64,
}

impl Search<'_> {
    fn holds(&self, t: f64) -> Result<bool, NumericError> {
        self.cond.eval(t, &self.evo.values_at(t)?, self.eps_v)
    }

    fn g(&self, atom: (&RExpr, &RExpr), t: f64) -> Result<f64, NumericError> {
        let y = self.evo.values_at(t)?;
        Ok(atom.0.eval(t, &y)? - atom.1.eval(t, &y)?)
    }

    /// Narrows `(lo, hi]` where `pred(lo)` is false and `pred(hi)` true.
    fn bisect(&self, mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> Result<bool, NumericError>) -> Result<(f64, f64), NumericError> {
        let tol = (self.eps_t * 1e-3).max(f64::EPSILON * hi.abs() * 4.0);
        for _ in 0..200 {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if pred(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok((lo, hi))
    }

    /// Tests the condition at a candidate change point and just after it.
    fn probe(&self, points: &[f64], limit: f64) -> Result<Option<Trigger>, NumericError> {
        for &p in points {
            if p <= limit && self.holds(p)? {
                return Ok(Some(Trigger { time: p, note: None }));
            }
        }
        if let Some(&last) = points.last() {
            let after = last + self.eps_t;
            if after <= limit && self.holds(after)? {
                return Ok(Some(Trigger {
                    time: after,
                    note: Some(format!("condition holds right after t = {last} but not at it")),
                }));
            }
        }
        Ok(None)
    }
}

/// Earliest `t` in `[lo, hi]` at which `cond` holds under `evo`. Comparisons
/// that are polynomials of degree at most 2 in time contribute their exact
/// roots; the others are tracked by sampling at the evolution's step and
/// bisecting sign changes.
pub fn find_trigger(
    cond: &Cond,
    evo: &Evolution,
    lo: f64,
    hi: f64,
    eps_t: f64,
    eps_v: f64,
) -> Result<Option<Trigger>, NumericError> {
    let s = Search { cond, evo, eps_t, eps_v };
    if lo > hi {
        return Ok(None);
    }
    if s.holds(lo)? {
        return Ok(Some(Trigger { time: lo, note: None }));
    }
    let mut atoms = Vec::new();
    cond.atoms(&mut atoms);
    let polys = evo.polys();
    let origin = evo.start();
    let mut roots: Vec<f64> = Vec::new();
    let mut sampled: Vec<(&RExpr, &RExpr)> = Vec::new();
    for (l, r) in atoms {
        let g = RExpr::sub(l.clone(), r.clone());
        match g.to_poly(origin, &polys) {
            Some(p) if p.degree().unwrap_or(0) == 0 => {}
            Some(p) => match p.roots_in(lo - origin, hi - origin) {
                Some(rs) => roots.extend(rs.into_iter().map(|u| u + origin)),
                None => sampled.push((l, r)),
            },
            None => sampled.push((l, r)),
        }
    }
    roots.retain(|r| *r >= lo && *r <= hi);
    roots.sort_by(f64::total_cmp);
    roots.dedup();

    if sampled.is_empty() {
        for r in roots {
            if let Some(t) = s.probe(&[r], hi)? {
                return Ok(Some(t));
            }
        }
        return Ok(None);
    }

    let h = evo.step();
    let mut next_root = 0;
    let mut prev_t = lo;
    let mut prev_g: Vec<f64> = sampled.iter().map(|a| s.g(*a, lo)).collect::<Result<_, _>>()?;
    let mut k = 1u64;
    loop {
        let t = (origin + ((lo - origin) / h).floor() * h + k as f64 * h).min(hi);
        while next_root < roots.len() && roots[next_root] <= t {
            if let Some(found) = s.probe(&[roots[next_root]], hi)? {
                return Ok(Some(found));
            }
            next_root += 1;
        }
        let g: Vec<f64> = sampled.iter().map(|a| s.g(*a, t)).collect::<Result<_, _>>()?;
        let mut crossings = Vec::new();
        for (i, atom) in sampled.iter().enumerate() {
            if g[i] == 0.0 || g[i].signum() != prev_g[i].signum() {
                let sign = prev_g[i].signum();
                let (a, b) = s.bisect(prev_t, t, |x| Ok(s.g(*atom, x)?.signum() != sign || s.g(*atom, x)? == 0.0))?;
                crossings.push((a, b));
            }
        }
        crossings.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (a, b) in crossings {
            if let Some(found) = s.probe(&[a, b], hi)? {
                return Ok(Some(found));
            }
        }
        if s.holds(t)? {
            let (_, b) = s.bisect(prev_t, t, |x| s.holds(x))?;
            return Ok(Some(Trigger { time: b, note: None }));
        }
        if t >= hi {
            return Ok(None);
        }
        prev_t = t;
        prev_g = g;
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> Evolution {
        // V(t) = t - 2 from start 2
        Evolution::new(2.0, vec![0.0], vec![Some(RExpr::Const(1.0))], 0.01)
    }

    #[test]
    fn linear_crossing_is_exact() {
        let c = Cond::Cmp(CmpOp::Ge, RExpr::Var(0), RExpr::Const(50.0));
        let t = find_trigger(&c, &ramp(), 2.0, 1e4, 1e-6, 1e-9).unwrap().unwrap();
        assert_eq!(t.time, 52.0);
        assert!(t.note.is_none());
    }

    #[test]
    fn strict_inequality_gets_a_note() {
        let c = Cond::Cmp(CmpOp::Gt, RExpr::Var(0), RExpr::Const(50.0));
        let t = find_trigger(&c, &ramp(), 2.0, 1e4, 1e-6, 1e-9).unwrap().unwrap();
        assert!(t.time > 52.0 && t.time <= 52.0 + 1e-6);
        assert!(t.note.is_some());
    }

    #[test]
    fn already_true_and_never_true() {
        let c = Cond::Cmp(CmpOp::Ge, RExpr::Var(0), RExpr::Const(0.0));
        assert_eq!(find_trigger(&c, &ramp(), 2.0, 10.0, 1e-6, 1e-9).unwrap().unwrap().time, 2.0);
        assert!(find_trigger(&Cond::Const(false), &ramp(), 2.0, 10.0, 1e-6, 1e-9).unwrap().is_none());
        let far = Cond::Cmp(CmpOp::Ge, RExpr::Var(0), RExpr::Const(500.0));
        assert!(find_trigger(&far, &ramp(), 2.0, 100.0, 1e-6, 1e-9).unwrap().is_none());
    }

    #[test]
    fn ode_crossing_by_bisection() {
        // v' = -v, v(0) = 1 crosses 0.5 at ln 2.
        let e = Evolution::new(0.0, vec![1.0], vec![Some(RExpr::Neg(Box::new(RExpr::Var(0))))], 0.01);
        let c = Cond::Cmp(CmpOp::Le, RExpr::Var(0), RExpr::Const(0.5));
        let t = find_trigger(&c, &e, 0.0, 10.0, 1e-6, 1e-9).unwrap().unwrap();
        assert!((t.time - 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn time_equality_in_ode_mode() {
        let e = Evolution::new(0.0, vec![1.0], vec![Some(RExpr::Neg(Box::new(RExpr::Var(0))))], 0.01);
        let c = Cond::Cmp(CmpOp::Eq, RExpr::Time, RExpr::Const(5.0));
        assert_eq!(find_trigger(&c, &e, 0.0, 10.0, 1e-6, 1e-9).unwrap().unwrap().time, 5.0);
    }
}
