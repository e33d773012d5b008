/// Polynomial with coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coef: Vec<f64>,
}

impl Poly {
    pub fn new(mut coef: Vec<f64>) -> Self {
        while coef.last() == Some(&0.0) {
            coef.pop();
        }
        Poly { coef }
    }

    pub fn zero() -> Self {
        Poly { coef: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coef
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coef.len().checked_sub(1)
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self.coef.len() {
            0 => Some(0.0),
            1 => Some(self.coef[0]),
            _ => None,
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.coef.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coef.len().max(o.coef.len());
        Poly::new((0..n).map(|i| self.coef.get(i).unwrap_or(&0.0) + o.coef.get(i).unwrap_or(&0.0)).collect())
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly::new(self.coef.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.coef.is_empty() || o.coef.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coef.len() + o.coef.len() - 1];
        for (i, a) in self.coef.iter().enumerate() {
            for (j, b) in o.coef.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Poly {
        let mut out = vec![0.0];
        out.extend(self.coef.iter().enumerate().map(|(i, c)| c / (i as f64 + 1.0)));
        Poly::new(out)
    }

    /// Real roots in `[lo, hi]`, ascending, for degree at most 2; `None`
    /// for higher degrees. The zero polynomial has no isolated roots.
    pub fn roots_in(&self, lo: f64, hi: f64) -> Option<Vec<f64>> {
        let mut roots = match self.coef.as_slice() {
            [] | [_] => vec![],
            [c, b] => vec![-c / b],
            [c, b, a] => {
                let disc = b * b - 4.0 * a * c;
                if disc < 0.0 {
                    vec![]
                } else {
                    // Citardauq form avoids cancellation in the smaller root.
                    let q = -0.5 * (b + b.signum() * disc.sqrt());
                    if q == 0.0 {
                        vec![0.0]
                    } else {
                        vec![q / a, c / q]
                    }
                }
            }
            _ => return None,
        };
        roots.retain(|r| r.is_finite() && *r >= lo && *r <= hi);
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        Some(roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let p = Poly::new(vec![1.0, 2.0]);
        let q = p.mul(&p);
        assert_eq!(q.coefficients(), &[1.0, 4.0, 4.0]);
        assert_eq!(q.integral().eval(1.0), 1.0 + 2.0 + 4.0 / 3.0);
        assert_eq!(p.add(&p.scale(-1.0)), Poly::zero());
    }

    #[test]
    fn roots() {
        assert_eq!(Poly::new(vec![-50.0, 1.0]).roots_in(0.0, 100.0).unwrap(), vec![50.0]);
        assert_eq!(Poly::new(vec![-4.0, 0.0, 1.0]).roots_in(-10.0, 10.0).unwrap(), vec![-2.0, 2.0]);
        assert!(Poly::new(vec![1.0, 0.0, 1.0]).roots_in(-10.0, 10.0).unwrap().is_empty());
        assert!(Poly::new(vec![0.0, 0.0, 0.0, 1.0]).roots_in(-1.0, 1.0).is_none());
    }
}
