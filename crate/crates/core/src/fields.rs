//! Scalar test fields on the triangle.
//!
//! A [`ScalarField`] is an evaluation contract `(x, y) -> f64`, optionally
//! carrying the analytic second partials needed by the Peano-kernel routines
//! and a Lipschitz constant for certified error bounds. The registry resolves
//! the built-in names (`gentle`, `sinpix`, `sinpix_cospiy`, monomials `eIJ`)
//! and inline polynomial specs of the form `poly:i,j,c;i,j,c;...`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type EvalFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ScalarField {
    name: String,
    eval: EvalFn,
    dxx: Option<EvalFn>,
    dyy: Option<EvalFn>,
    lipschitz: Option<f64>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("dxx", &self.dxx.is_some())
            .field("dyy", &self.dyy.is_some())
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl ScalarField {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            dxx: None,
            dyy: None,
            lipschitz: None,
        }
    }

    /// Registers the analytic second partial in x.
    pub fn with_dxx(mut self, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.dxx = Some(Arc::new(f));
        self
    }

    /// Registers the analytic second partial in y.
    pub fn with_dyy(mut self, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.dyy = Some(Arc::new(f));
        self
    }

    /// Registers a per-component Lipschitz bound: both |dF/dx| and |dF/dy|
    /// are at most `l` everywhere on the domain.
    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    pub fn dxx(&self, x: f64, y: f64) -> Option<f64> {
        self.dxx.as_ref().map(|f| f(x, y))
    }

    pub fn dyy(&self, x: f64, y: f64) -> Option<f64> {
        self.dyy.as_ref().map(|f| f(x, y))
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    /// Monomial `x^i y^j`, named `eIJ`.
    pub fn monomial(i: u32, j: u32) -> Self {
        let name = format!("e{i}{j}");
        let f = move |x: f64, y: f64| x.powi(i as i32) * y.powi(j as i32);
        let dxx = move |x: f64, y: f64| {
            if i < 2 {
                0.0
            } else {
                (i * (i - 1)) as f64 * x.powi(i as i32 - 2) * y.powi(j as i32)
            }
        };
        let dyy = move |x: f64, y: f64| {
            if j < 2 {
                0.0
            } else {
                (j * (j - 1)) as f64 * x.powi(i as i32) * y.powi(j as i32 - 2)
            }
        };
        Self::new(name, f).with_dxx(dxx).with_dyy(dyy)
    }

    /// The radial-exponential test surface
    /// `F(x,y) = exp(-81/16 ((x-1/2)^2 + (y-1/2)^2)) / 3`.
    pub fn gentle() -> Self {
        const C: f64 = 81.0 / 16.0;
        let f = |x: f64, y: f64| ((-C * ((x - 0.5).powi(2) + (y - 0.5).powi(2))).exp()) / 3.0;
        let dxx = move |x: f64, y: f64| {
            let v = f(x, y);
            v * (4.0 * C * C * (x - 0.5).powi(2) - 2.0 * C)
        };
        let dyy = move |x: f64, y: f64| {
            let v = f(x, y);
            v * (4.0 * C * C * (y - 0.5).powi(2) - 2.0 * C)
        };
        // sup |dF/du| = sqrt(2C) e^{-1/2} / 3, attained at |u - 1/2| = 1/sqrt(2C)
        let l = (2.0 * C).sqrt() * (-0.5_f64).exp() / 3.0;
        Self::new("gentle", f)
            .with_dxx(dxx)
            .with_dyy(dyy)
            .with_lipschitz(l)
    }

    /// `sin(pi x)`, Lipschitz constant pi.
    pub fn sin_pi_x() -> Self {
        use std::f64::consts::PI;
        Self::new("sinpix", |x: f64, _| (PI * x).sin())
            .with_dxx(|x, _| -PI * PI * (PI * x).sin())
            .with_dyy(|_, _| 0.0)
            .with_lipschitz(PI)
    }

    /// `sin(pi x) cos(pi y)`, Lipschitz constant pi.
    pub fn sin_pi_x_cos_pi_y() -> Self {
        use std::f64::consts::PI;
        let f = |x: f64, y: f64| (PI * x).sin() * (PI * y).cos();
        Self::new("sinpix_cospiy", f)
            .with_dxx(move |x, y| -PI * PI * f(x, y))
            .with_dyy(move |x, y| -PI * PI * f(x, y))
            .with_lipschitz(PI)
    }

    /// Resolves a registry name or an inline `poly:` spec.
    pub fn from_spec(spec: &str) -> Result<Self> {
        match spec {
            "gentle" => return Ok(Self::gentle()),
            "sinpix" => return Ok(Self::sin_pi_x()),
            "sinpix_cospiy" => return Ok(Self::sin_pi_x_cos_pi_y()),
            _ => {}
        }
        if let Some(rest) = spec.strip_prefix("poly:") {
            return parse_polynomial(spec, rest);
        }
        if let Some(digits) = spec.strip_prefix('e') {
            let bytes = digits.as_bytes();
            if bytes.len() == 2 && bytes.iter().all(u8::is_ascii_digit) {
                let i = (bytes[0] - b'0') as u32;
                let j = (bytes[1] - b'0') as u32;
                return Ok(Self::monomial(i, j));
            }
        }
        Err(Error::UnknownField(spec.to_string()))
    }

    /// Names resolvable without an inline spec.
    pub fn builtin_names() -> Vec<String> {
        let mut names = vec![
            "gentle".to_string(),
            "sinpix".to_string(),
            "sinpix_cospiy".to_string(),
        ];
        for i in 0..=4 {
            for j in 0..=4 {
                names.push(format!("e{i}{j}"));
            }
        }
        names
    }
}

/// Inline bivariate polynomial: `;`-separated `i,j,c` monomial terms.
fn parse_polynomial(full: &str, body: &str) -> Result<ScalarField> {
    let mut terms: Vec<(u32, u32, f64)> = Vec::new();
    for part in body.split(';') {
        let fields: Vec<&str> = part.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::UnknownField(full.to_string()));
        }
        let i: u32 = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::UnknownField(full.to_string()))?;
        let j: u32 = fields[1]
            .trim()
            .parse()
            .map_err(|_| Error::UnknownField(full.to_string()))?;
        let c: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| Error::UnknownField(full.to_string()))?;
        if !c.is_finite() {
            return Err(Error::UnknownField(full.to_string()));
        }
        terms.push((i, j, c));
    }
    if terms.is_empty() {
        return Err(Error::UnknownField(full.to_string()));
    }
    let eval_terms = terms.clone();
    let dxx_terms = terms.clone();
    let dyy_terms = terms;
    Ok(ScalarField::new(full, move |x, y| {
        eval_terms
            .iter()
            .map(|&(i, j, c)| c * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    })
    .with_dxx(move |x, y| {
        dxx_terms
            .iter()
            .filter(|&&(i, _, _)| i >= 2)
            .map(|&(i, j, c)| c * (i * (i - 1)) as f64 * x.powi(i as i32 - 2) * y.powi(j as i32))
            .sum()
    })
    .with_dyy(move |x, y| {
        dyy_terms
            .iter()
            .filter(|&&(_, j, _)| j >= 2)
            .map(|&(i, j, c)| c * (j * (j - 1)) as f64 * x.powi(i as i32) * y.powi(j as i32 - 2))
            .sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gentle_center_value() {
        assert!((ScalarField::gentle().eval(0.5, 0.5) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gentle_second_partials_match_finite_differences() {
        let f = ScalarField::gentle();
        let h = 1e-5;
        for &(x, y) in &[(0.3, 0.4), (0.7, 0.1), (0.5, 0.5)] {
            let fd = (f.eval(x + h, y) - 2.0 * f.eval(x, y) + f.eval(x - h, y)) / (h * h);
            assert!((f.dxx(x, y).unwrap() - fd).abs() < 1e-4);
            let fd = (f.eval(x, y + h) - 2.0 * f.eval(x, y) + f.eval(x, y - h)) / (h * h);
            assert!((f.dyy(x, y).unwrap() - fd).abs() < 1e-4);
        }
    }

    #[test]
    fn monomial_naming_and_values() {
        let e21 = ScalarField::monomial(2, 1);
        assert_eq!(e21.name(), "e21");
        assert!((e21.eval(0.3, 0.5) - 0.045).abs() < 1e-15);
        assert_eq!(e21.dxx(0.3, 0.5).unwrap(), 1.0);
        assert_eq!(e21.dyy(0.3, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn registry_resolves_builtins() {
        for name in ScalarField::builtin_names() {
            assert!(ScalarField::from_spec(&name).is_ok(), "{name}");
        }
        assert!(ScalarField::from_spec("nope").is_err());
    }

    #[test]
    fn inline_polynomial() {
        // 1 + 2.5 x y + x^2
        let f = ScalarField::from_spec("poly:0,0,1;1,1,2.5;2,0,1").unwrap();
        assert!((f.eval(0.5, 0.4) - (1.0 + 0.5 + 0.25)).abs() < 1e-15);
        assert_eq!(f.dxx(0.3, 0.9).unwrap(), 2.0);
        assert!(ScalarField::from_spec("poly:1,2").is_err());
        assert!(ScalarField::from_spec("poly:a,b,c").is_err());
    }
}
