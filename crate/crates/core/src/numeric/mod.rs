//! Real-valued expressions over time and a state vector, and their
//! integration: closed forms for polynomial rates, fixed-step RK4
//! otherwise, and earliest-time search for conditions.

mod engine;
mod poly;
mod rk4;
mod trigger;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use engine::{Evolution, Mode};
pub use poly::Poly;
pub use rk4::{integrate, rk4_step, Ivp, Trajectory};
pub use trigger::{compare, find_trigger, Cond, Trigger};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("division by zero in {expr} at t = {time}")]
    DivisionByZero { expr: String, time: f64 },
    #[error("non-finite value at t = {time}")]
    Diverged { time: f64 },
    #[error("evaluation at t = {t} precedes the situation start {start}")]
    BeforeStart { t: f64, start: f64 },
}

/// Real expression over the time `t` and state components `y[i]`.
#[derive(Debug, Clone, PartialEq)]
pub enum RExpr {
    Const(f64),
    Time,
    Var(usize),
    Neg(Box<RExpr>),
    Add(Vec<RExpr>),
    Sub(Box<RExpr>, Box<RExpr>),
    Mul(Vec<RExpr>),
    Div(Box<RExpr>, Box<RExpr>),
}

impl RExpr {
    pub fn sub(l: RExpr, r: RExpr) -> RExpr {
        RExpr::Sub(Box::new(l), Box::new(r))
    }

    pub fn eval(&self, t: f64, y: &[f64]) -> Result<f64, NumericError> {
        Ok(match self {
            RExpr::Const(c) => *c,
            RExpr::Time => t,
            RExpr::Var(i) => y[*i],
            RExpr::Neg(x) => -x.eval(t, y)?,
            RExpr::Add(xs) => xs.iter().map(|x| x.eval(t, y)).sum::<Result<f64, _>>()?,
            RExpr::Sub(l, r) => l.eval(t, y)? - r.eval(t, y)?,
            RExpr::Mul(xs) => xs.iter().map(|x| x.eval(t, y)).product::<Result<f64, _>>()?,
            RExpr::Div(l, r) => {
                let d = r.eval(t, y)?;
                if d == 0.0 {
                    return Err(NumericError::DivisionByZero { expr: self.to_string(), time: t });
                }
                l.eval(t, y)? / d
            }
        })
    }

    pub fn vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            RExpr::Var(i) => {
                out.insert(*i);
            }
            RExpr::Const(_) | RExpr::Time => {}
            RExpr::Neg(x) => x.vars(out),
            RExpr::Add(xs) | RExpr::Mul(xs) => xs.iter().for_each(|x| x.vars(out)),
            RExpr::Sub(l, r) | RExpr::Div(l, r) => {
                l.vars(out);
                r.vars(out);
            }
        }
    }

    /// True when the value does not depend on time or state.
    pub fn is_const(&self) -> bool {
        match self {
            RExpr::Const(_) => true,
            RExpr::Time | RExpr::Var(_) => false,
            RExpr::Neg(x) => x.is_const(),
            RExpr::Add(xs) | RExpr::Mul(xs) => xs.iter().all(RExpr::is_const),
            RExpr::Sub(l, r) | RExpr::Div(l, r) => l.is_const() && r.is_const(),
        }
    }

    /// The expression as a polynomial in `u = t - origin`, given closed
    /// forms (in the same `u`) for some components.
    pub fn to_poly(&self, origin: f64, vars: &[Option<Poly>]) -> Option<Poly> {
        Some(match self {
            RExpr::Const(c) => Poly::constant(*c),
            RExpr::Time => Poly::new(vec![origin, 1.0]),
            RExpr::Var(i) => vars.get(*i)?.clone()?,
            RExpr::Neg(x) => x.to_poly(origin, vars)?.scale(-1.0),
            RExpr::Add(xs) => {
                let mut acc = Poly::zero();
                for x in xs {
                    acc = acc.add(&x.to_poly(origin, vars)?);
                }
                acc
            }
            RExpr::Sub(l, r) => l.to_poly(origin, vars)?.add(&r.to_poly(origin, vars)?.scale(-1.0)),
            RExpr::Mul(xs) => {
                let mut acc = Poly::constant(1.0);
                for x in xs {
                    acc = acc.mul(&x.to_poly(origin, vars)?);
                }
                acc
            }
            RExpr::Div(l, r) => {
                let d = r.to_poly(origin, vars)?;
                match d.constant_value() {
                    Some(c) if c != 0.0 => l.to_poly(origin, vars)?.scale(1.0 / c),
                    _ => return None,
                }
            }
        })
    }
}

impl fmt::Display for RExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, op: &str, xs: &[&RExpr]| {
            write!(f, "({op}")?;
            for x in xs {
                write!(f, " {x}")?;
            }
            write!(f, ")")
        };
        match self {
            RExpr::Const(c) => write!(f, "{c}"),
            RExpr::Time => write!(f, "t"),
            RExpr::Var(i) => write!(f, "y{i}"),
            RExpr::Neg(x) => list(f, "-", &[x]),
            RExpr::Add(xs) => list(f, "+", &xs.iter().collect::<Vec<_>>()),
            RExpr::Sub(l, r) => list(f, "-", &[l, r]),
            RExpr::Mul(xs) => list(f, "*", &xs.iter().collect::<Vec<_>>()),
            RExpr::Div(l, r) => list(f, "/", &[l, r]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_division_by_zero() {
        let e = RExpr::Div(Box::new(RExpr::Const(1.0)), Box::new(RExpr::Var(0)));
        assert_eq!(e.eval(0.0, &[4.0]).unwrap(), 0.25);
        assert!(matches!(e.eval(3.0, &[0.0]), Err(NumericError::DivisionByZero { time, .. }) if time == 3.0));
    }

    #[test]
    fn polynomial_view() {
        // (t - 2) * (t - 2) around origin 2 is u^2
        let e = RExpr::Mul(vec![RExpr::sub(RExpr::Time, RExpr::Const(2.0)), RExpr::sub(RExpr::Time, RExpr::Const(2.0))]);
        let p = e.to_poly(2.0, &[]).unwrap();
        assert_eq!(p.eval(3.0), 9.0);
        assert_eq!(p.degree(), Some(2));
        let v = RExpr::Div(Box::new(RExpr::Const(1.0)), Box::new(RExpr::Var(0)));
        assert!(v.to_poly(0.0, &[None]).is_none());
    }
}
