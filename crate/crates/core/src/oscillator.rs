//! Oscillatory weight systems `w' = G w` with rational `G`, stored in
//! cleared form: a polynomial `r` and the polynomial entries of `r G`.

use crate::bessel::{bessel_j, bessel_j_prime};
use crate::error::{invalid, Error, Result};
use crate::poly::Polynomial;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const STATIONARY_GRID: usize = 1000;
const ROOT_GRID: usize = 1001;

/// Where a system came from. Interior weight values are only known for the
/// built-in families.
#[derive(Debug, Clone, PartialEq)]
pub enum OscillatorFamily {
    /// `w = exp(i omega g(x))`.
    Exponential { g: Vec<f64> },
    /// `w = (J_gamma(omega (x + a)), J_gamma'(omega (x + a)))`.
    Bessel { gamma: u32, a: f64 },
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorSystem {
    m: usize,
    omega: f64,
    r: Polynomial,
    rg: Vec<Vec<Polynomial>>,
    w_plus: Vec<Complex64>,
    w_minus: Vec<Complex64>,
    d: usize,
    family: OscillatorFamily,
}

impl OscillatorSystem {
    /// A system from cleared data. `rg[i][j]` is entry `(i, j)` of `r G`.
    pub fn custom(
        omega: f64,
        r: Polynomial,
        rg: Vec<Vec<Polynomial>>,
        w_plus: Vec<Complex64>,
        w_minus: Vec<Complex64>,
    ) -> Result<Self> {
        let m = rg.len();
        if m == 0 {
            return invalid("system dimension must be at least 1");
        }
        if rg.iter().any(|row| row.len() != m) {
            return invalid("rG must be a square array");
        }
        if w_plus.len() != m || w_minus.len() != m {
            return invalid(format!("weight endpoint values must have length {m}"));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return invalid(format!("omega must be positive, got {omega}"));
        }
        if let Some(x) = find_root(&r) {
            return Err(Error::PoleInInterval(format!("r vanishes near x = {x}")));
        }
        let d = rg
            .iter()
            .flatten()
            .map(Polynomial::degree)
            .fold(r.degree(), usize::max);
        Ok(Self {
            m,
            omega,
            r,
            rg,
            w_plus,
            w_minus,
            d,
            family: OscillatorFamily::Custom,
        })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn r(&self) -> &Polynomial {
        &self.r
    }

    pub fn rg(&self) -> &[Vec<Polynomial>] {
        &self.rg
    }

    pub fn w_plus(&self) -> &[Complex64] {
        &self.w_plus
    }

    pub fn w_minus(&self) -> &[Complex64] {
        &self.w_minus
    }

    /// Bandwidth parameter: `deg g` for exponentials, otherwise the largest
    /// degree among `r` and the entries of `r G`.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn family(&self) -> &OscillatorFamily {
        &self.family
    }

    /// `w(x)` in the interior, when the family provides it.
    pub fn weight(&self, x: f64) -> Option<Result<Vec<Complex64>>> {
        match &self.family {
            OscillatorFamily::Exponential { g } => {
                let phase = Polynomial::from_real(g).eval(x).re;
                Some(Ok(vec![Complex64::from_polar(1.0, self.omega * phase)]))
            }
            OscillatorFamily::Bessel { gamma, a } => {
                let z = self.omega * (x + a);
                Some(bessel_j(*gamma, z).and_then(|j| {
                    Ok(vec![
                        Complex64::new(j, 0.0),
                        Complex64::new(bessel_j_prime(*gamma, z)?, 0.0),
                    ])
                }))
            }
            OscillatorFamily::Custom => None,
        }
    }

    /// Taylor coefficients of `G_{ij} = (r G)_{ij} / r` about `x0`, up to
    /// and including `order`, indexed `[i][j][k]`.
    pub fn g_taylor(&self, x0: f64, order: usize) -> Vec<Vec<Vec<Complex64>>> {
        let rt = pad(self.r.taylor_at(x0), order + 1);
        self.rg
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| series_divide(&pad(p.taylor_at(x0), order + 1), &rt))
                    .collect()
            })
            .collect()
    }

    pub fn to_config(&self) -> OscillatorConfig {
        match &self.family {
            OscillatorFamily::Exponential { g } => OscillatorConfig::Exponential {
                g: g.clone(),
                omega: self.omega,
            },
            OscillatorFamily::Bessel { gamma, a } => OscillatorConfig::Bessel {
                gamma: *gamma,
                a: *a,
                omega: self.omega,
            },
            OscillatorFamily::Custom => OscillatorConfig::Custom {
                r: to_coeffs(&self.r),
                rg: self
                    .rg
                    .iter()
                    .map(|row| row.iter().map(to_coeffs).collect())
                    .collect(),
                w_plus: self.w_plus.iter().map(|&c| Coeff::from(c)).collect(),
                w_minus: self.w_minus.iter().map(|&c| Coeff::from(c)).collect(),
                omega: self.omega,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_config()).expect("config serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: OscillatorConfig =
            serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.build()
    }

    /// Copy of the system at a different frequency.
    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        match &self.family {
            OscillatorFamily::Exponential { g } => make_exponential(&Polynomial::from_real(g), omega),
            OscillatorFamily::Bessel { gamma, a } => make_bessel_auto(*gamma, *a, omega),
            OscillatorFamily::Custom => {
                invalid("custom systems cannot be rebuilt at another frequency")
            }
        }
    }
}

fn pad(mut v: Vec<Complex64>, len: usize) -> Vec<Complex64> {
    v.resize(len.max(v.len()), Complex64::new(0.0, 0.0));
    v.truncate(len);
    v
}

/// Power-series quotient `a / b`, truncated to `a.len()` terms.
fn series_divide(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut q = Vec::with_capacity(a.len());
    for k in 0..a.len() {
        let mut acc = a[k];
        for j in 1..=k.min(b.len() - 1) {
            acc -= b[j] * q[k - j];
        }
        q.push(acc / b[0]);
    }
    q
}

/// A point in `[-1, 1]` where `p` (numerically) vanishes, if any.
fn find_root(p: &Polynomial) -> Option<f64> {
    let xs: Vec<f64> = (0..ROOT_GRID)
        .map(|k| -1.0 + 2.0 * k as f64 / (ROOT_GRID - 1) as f64)
        .collect();
    let vals: Vec<Complex64> = xs.iter().map(|&x| p.eval(x)).collect();
    let scale = p.max_abs_coeff();
    if scale == 0.0 {
        return Some(0.0);
    }
    for (k, v) in vals.iter().enumerate() {
        if v.norm() <= 1e-12 * scale {
            return Some(xs[k]);
        }
        if k > 0 {
            let u = vals[k - 1];
            let re_flip = u.re * v.re <= 0.0;
            let im_flip = u.im * v.im <= 0.0;
            if re_flip && im_flip {
                return Some(xs[k]);
            }
        }
    }
    None
}

pub fn make_exponential(g: &Polynomial, omega: f64) -> Result<OscillatorSystem> {
    if g.coeffs().iter().any(|c| c.im != 0.0) {
        return invalid("phase polynomial must be real");
    }
    let gc: Vec<f64> = g.coeffs().iter().map(|c| c.re).collect();
    let dg = g.derivative();
    let scale = dg.max_abs_coeff();
    let vals: Vec<f64> = (0..STATIONARY_GRID)
        .map(|k| dg.eval(-1.0 + 2.0 * k as f64 / (STATIONARY_GRID - 1) as f64).re)
        .collect();
    let h = 2.0 / (STATIONARY_GRID - 1) as f64;
    let touches_zero = |k: usize| {
        // Refine an interior local minimum of |g'| to catch double roots.
        let f = |x: f64| dg.eval(x).re.abs();
        let (mut lo, mut hi) = (-1.0 + (k - 1) as f64 * h, -1.0 + (k + 1) as f64 * h);
        for _ in 0..100 {
            let a = lo + (hi - lo) / 3.0;
            let b = hi - (hi - lo) / 3.0;
            if f(a) < f(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        f(0.5 * (lo + hi)) <= 1e-10 * scale
    };
    let stationary = scale == 0.0
        || vals.iter().any(|v| v.abs() <= 1e-12 * scale)
        || vals.windows(2).any(|w| w[0] * w[1] < 0.0)
        || (1..STATIONARY_GRID - 1).any(|k| {
            vals[k].abs() <= vals[k - 1].abs() && vals[k].abs() <= vals[k + 1].abs() && touches_zero(k)
        });
    if stationary {
        return Err(Error::UnsupportedOscillator(
            "g' vanishes in [-1, 1] (stationary point)".into(),
        ));
    }
    let iw = Complex64::new(0.0, omega);
    let mut sys = OscillatorSystem::custom(
        omega,
        Polynomial::one(),
        vec![vec![dg.scale(iw)]],
        vec![Complex64::from_polar(1.0, omega * g.eval(1.0).re)],
        vec![Complex64::from_polar(1.0, omega * g.eval(-1.0).re)],
    )?;
    sys.d = g.degree();
    sys.family = OscillatorFamily::Exponential { g: gc };
    Ok(sys)
}

/// Bessel system with caller-supplied endpoint values
/// `[J(omega (1 + a)), J'(omega (1 + a)), J(omega (a - 1)), J'(omega (a - 1))]`.
pub fn make_bessel(gamma: u32, a: f64, omega: f64, endpoint_values: [f64; 4]) -> Result<OscillatorSystem> {
    if !(a.abs() > 1.0) {
        return Err(Error::PoleInInterval(format!(
            "x + a vanishes in [-1, 1] for a = {a}"
        )));
    }
    let shift = Polynomial::from_real(&[a, 1.0]);
    let r = &shift * &shift;
    let w = Complex64::new(omega, 0.0);
    let g2 = Complex64::new((gamma as f64).powi(2) / omega, 0.0);
    let rg = vec![
        vec![Polynomial::zero(), r.scale(w)],
        vec![&r.scale(-w) + &Polynomial::constant(g2), -&shift],
    ];
    let [jp, djp, jm, djm] = endpoint_values;
    let mut sys = OscillatorSystem::custom(
        omega,
        r,
        rg,
        vec![Complex64::new(jp, 0.0), Complex64::new(djp, 0.0)],
        vec![Complex64::new(jm, 0.0), Complex64::new(djm, 0.0)],
    )?;
    sys.d = 2;
    sys.family = OscillatorFamily::Bessel { gamma, a };
    Ok(sys)
}

/// [`make_bessel`] with endpoint values from the built-in evaluator.
pub fn make_bessel_auto(gamma: u32, a: f64, omega: f64) -> Result<OscillatorSystem> {
    if !(a.abs() > 1.0) {
        return make_bessel(gamma, a, omega, [0.0; 4]);
    }
    let zp = omega * (1.0 + a);
    let zm = omega * (a - 1.0);
    make_bessel(
        gamma,
        a,
        omega,
        [
            bessel_j(gamma, zp)?,
            bessel_j_prime(gamma, zp)?,
            bessel_j(gamma, zm)?,
            bessel_j_prime(gamma, zm)?,
        ],
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemDiagnostics {
    pub valid: bool,
    pub m: usize,
    pub d: usize,
    pub deg_r: usize,
    /// `deg (r G)_{ij}`.
    pub deg_rg: Vec<Vec<usize>>,
    pub findings: Vec<String>,
}

pub fn validate_system(sys: &OscillatorSystem) -> SystemDiagnostics {
    let mut findings = Vec::new();
    if let Some(x) = find_root(&sys.r) {
        findings.push(format!("r vanishes near x = {x}"));
    }
    for v in sys.w_plus.iter().chain(&sys.w_minus) {
        if !v.re.is_finite() || !v.im.is_finite() {
            findings.push("non-finite weight endpoint value".into());
            break;
        }
    }
    SystemDiagnostics {
        valid: findings.is_empty(),
        m: sys.m,
        d: sys.d,
        deg_r: sys.r.degree(),
        deg_rg: sys
            .rg
            .iter()
            .map(|row| row.iter().map(Polynomial::degree).collect())
            .collect(),
        findings,
    }
}

/// A coefficient in JSON: either a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Coeff> for Complex64 {
    fn from(c: Coeff) -> Self {
        match c {
            Coeff::Real(re) => Complex64::new(re, 0.0),
            Coeff::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for Coeff {
    fn from(c: Complex64) -> Self {
        Coeff::Complex([c.re, c.im])
    }
}

fn to_coeffs(p: &Polynomial) -> Vec<Coeff> {
    p.coeffs().iter().map(|&c| Coeff::from(c)).collect()
}

fn from_coeffs(c: &[Coeff]) -> Polynomial {
    Polynomial::new(c.iter().map(|&v| v.into()).collect())
}

/// The JSON description of an oscillator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum OscillatorConfig {
    Exponential {
        g: Vec<f64>,
        omega: f64,
    },
    Bessel {
        gamma: u32,
        a: f64,
        omega: f64,
    },
    Custom {
        r: Vec<Coeff>,
        #[serde(rename = "rG")]
        rg: Vec<Vec<Vec<Coeff>>>,
        w_plus: Vec<Coeff>,
        w_minus: Vec<Coeff>,
        omega: f64,
    },
}

impl OscillatorConfig {
    pub fn omega(&self) -> f64 {
        match self {
            Self::Exponential { omega, .. } | Self::Bessel { omega, .. } | Self::Custom { omega, .. } => {
                *omega
            }
        }
    }

    pub fn build(&self) -> Result<OscillatorSystem> {
        match self {
            Self::Exponential { g, omega } => make_exponential(&Polynomial::from_real(g), *omega),
            Self::Bessel { gamma, a, omega } => make_bessel_auto(*gamma, *a, *omega),
            Self::Custom {
                r,
                rg,
                w_plus,
                w_minus,
                omega,
            } => OscillatorSystem::custom(
                *omega,
                from_coeffs(r),
                rg.iter()
                    .map(|row| row.iter().map(|p| from_coeffs(p)).collect())
                    .collect(),
                w_plus.iter().map(|&c| c.into()).collect(),
                w_minus.iter().map(|&c| c.into()).collect(),
            ),
        }
    }
}
