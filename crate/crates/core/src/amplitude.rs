//! Non-oscillatory amplitudes `f` and a small registry of named test cases.

use crate::cheb::ChebCoeffVector;
use crate::error::{invalid, Error, Result};
use crate::oscillator::OscillatorSystem;
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

/// One component of `f`. Must be safe to call from several threads.
pub type ComponentFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Endpoint derivatives `d^l f_i / dx^l` at `+1` and `-1`, indexed
/// `[i][l - 1]` for `l = 1..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointDerivatives {
    pub plus: Vec<Vec<Complex64>>,
    pub minus: Vec<Vec<Complex64>>,
}

impl EndpointDerivatives {
    pub fn order(&self) -> usize {
        self.plus
            .iter()
            .chain(&self.minus)
            .map(Vec::len)
            .min()
            .unwrap_or(0)
    }
}

#[derive(Clone)]
pub struct AmplitudeSpec {
    components: Vec<ComponentFn>,
    derivatives: Option<EndpointDerivatives>,
}

impl std::fmt::Debug for AmplitudeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AmplitudeSpec")
            .field("components", &self.components.len())
            .field("derivatives", &self.derivatives)
            .finish()
    }
}

impl AmplitudeSpec {
    pub fn new(components: Vec<ComponentFn>, derivatives: Option<EndpointDerivatives>) -> Result<Self> {
        if components.is_empty() {
            return invalid("amplitude needs at least one component");
        }
        if let Some(d) = &derivatives {
            if d.plus.len() != components.len() || d.minus.len() != components.len() {
                return invalid("derivative table does not match the number of components");
            }
        }
        Ok(Self {
            components,
            derivatives,
        })
    }

    /// A scalar amplitude with no derivative data.
    pub fn scalar(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            components: vec![Arc::new(f)],
            derivatives: None,
        }
    }

    /// `f = 0` in all `m` components, with derivatives of every order up to `order`.
    pub fn zero(m: usize, order: usize) -> Self {
        Self {
            components: (0..m).map(|_| Arc::new(|_: f64| ZERO) as ComponentFn).collect(),
            derivatives: Some(EndpointDerivatives {
                plus: vec![vec![ZERO; order]; m],
                minus: vec![vec![ZERO; order]; m],
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, i: usize, x: f64) -> Complex64 {
        (self.components[i])(x)
    }

    pub fn component(&self, i: usize) -> &ComponentFn {
        &self.components[i]
    }

    pub fn derivatives(&self) -> Option<&EndpointDerivatives> {
        self.derivatives.as_ref()
    }

    /// Highest derivative order available at both endpoints.
    pub fn derivative_order(&self) -> usize {
        self.derivatives.as_ref().map_or(0, EndpointDerivatives::order)
    }

    /// `d^l f_i(sign)`, with `l = 0` giving the value itself.
    pub fn endpoint_derivative(&self, i: usize, l: usize, sign: f64) -> Option<Complex64> {
        if l == 0 {
            return Some(self.eval(i, sign));
        }
        let d = self.derivatives.as_ref()?;
        let table = if sign > 0.0 { &d.plus } else { &d.minus };
        table[i].get(l - 1).copied()
    }
}

/// A scalar function with closed-form derivatives, placed in component 0
/// of an `m`-component amplitude (other components zero).
fn embed(
    m: usize,
    order: usize,
    f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    deriv: impl Fn(usize, f64) -> Complex64,
) -> AmplitudeSpec {
    let mut comps: Vec<ComponentFn> = vec![Arc::new(f)];
    let mut plus = vec![(1..=order).map(|l| deriv(l, 1.0)).collect::<Vec<_>>()];
    let mut minus = vec![(1..=order).map(|l| deriv(l, -1.0)).collect::<Vec<_>>()];
    for _ in 1..m {
        comps.push(Arc::new(|_| ZERO));
        plus.push(vec![ZERO; order]);
        minus.push(vec![ZERO; order]);
    }
    AmplitudeSpec {
        components: comps,
        derivatives: Some(EndpointDerivatives { plus, minus }),
    }
}

const RUNGE_A2: f64 = 0.02;

/// `x / (x^2 + 1/50)` with derivatives through `order`.
pub fn rational_runge(m: usize, order: usize) -> AmplitudeSpec {
    // x / (x^2 + a^2) = (1/(x - ia) + 1/(x + ia)) / 2
    let a = RUNGE_A2.sqrt();
    let deriv = move |l: usize, x: f64| {
        let fact: f64 = (1..=l).map(|k| k as f64).product();
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        let p = -(l as i32) - 1;
        let t = Complex64::new(x, -a).powi(p) + Complex64::new(x, a).powi(p);
        t * (0.5 * sign * fact)
    };
    embed(m, order, |x| Complex64::new(x / (x * x + RUNGE_A2), 0.0), deriv)
}

pub fn constant_one(m: usize, order: usize) -> AmplitudeSpec {
    embed(m, order, |_| Complex64::new(1.0, 0.0), |_, _| ZERO)
}

pub fn cosine(m: usize, order: usize) -> AmplitudeSpec {
    embed(
        m,
        order,
        |x| Complex64::new(x.cos(), 0.0),
        |l, x| Complex64::new((x + l as f64 * FRAC_PI_2).cos(), 0.0),
    )
}

/// `f = L p` for a Chebyshev series `p` (one per component), so that the
/// Levin equation has the exact solution `p`.
#[derive(Debug, Clone)]
pub struct Manufactured {
    pub amplitude: AmplitudeSpec,
    /// `<p(1), w(1)> - <p(-1), w(-1)>`.
    pub exact_value: Complex64,
    pub solution: Vec<ChebCoeffVector>,
}

pub fn manufactured(sys: &OscillatorSystem, p: Vec<ChebCoeffVector>, order: usize) -> Result<Manufactured> {
    let m = sys.dim();
    if p.len() != m {
        return invalid(format!("manufactured solution needs {m} components, got {}", p.len()));
    }
    let r = sys.r().clone();
    let rg = sys.rg().to_vec();
    let p = Arc::new(p);
    let dp: Arc<Vec<ChebCoeffVector>> = Arc::new(p.iter().map(ChebCoeffVector::derivative).collect());
    let components: Vec<ComponentFn> = (0..m)
        .map(|i| {
            let (r, rg, p, dp) = (r.clone(), rg.clone(), p.clone(), dp.clone());
            Arc::new(move |x: f64| {
                let rx = r.eval(x);
                let mut v = dp[i].eval(x).unwrap_or(ZERO);
                for k in 0..p.len() {
                    v += rg[k][i].eval(x) / rx * p[k].eval(x).unwrap_or(ZERO);
                }
                v
            }) as ComponentFn
        })
        .collect();

    // Derivatives of each p_k at the endpoints, through order + 1.
    let mut derivs: Vec<Vec<ChebCoeffVector>> = Vec::with_capacity(m);
    for pk in p.iter() {
        let mut chain = vec![pk.clone()];
        for _ in 0..=order {
            let next = chain.last().unwrap().derivative();
            chain.push(next);
        }
        derivs.push(chain);
    }
    let mut tables = [vec![Vec::new(); m], vec![Vec::new(); m]];
    for (t, sign) in [(0usize, 1.0), (1, -1.0)] {
        let g = sys.g_taylor(sign, order);
        let at = |c: &ChebCoeffVector| {
            if sign > 0.0 {
                c.value_at_plus_one()
            } else {
                c.value_at_minus_one()
            }
        };
        for i in 0..m {
            for l in 1..=order {
                let mut v = at(&derivs[i][l + 1]);
                for k in 0..m {
                    for q in 0..=l {
                        // G^{(l-q)} = (l-q)! * Taylor coefficient.
                        let gd = g[k][i][l - q] * factorial(l - q);
                        v += gd * binomial(l, q) * at(&derivs[k][q]);
                    }
                }
                tables[t][i].push(v);
            }
        }
    }
    let [plus, minus] = tables;
    let exact_value = (0..m)
        .map(|k| p[k].value_at_plus_one() * sys.w_plus()[k] - p[k].value_at_minus_one() * sys.w_minus()[k])
        .sum();
    Ok(Manufactured {
        amplitude: AmplitudeSpec::new(components, Some(EndpointDerivatives { plus, minus }))?,
        exact_value,
        solution: (*p).clone(),
    })
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Resolves a registry name: `rational_runge`, `one`, `cos` or
/// `manufactured:<n>` (`f = L(e_1 T_n)`). Derivatives are tabulated
/// through `order`.
pub fn amplitude_from_name(name: &str, sys: &OscillatorSystem, order: usize) -> Result<AmplitudeSpec> {
    let m = sys.dim();
    match name {
        "rational_runge" => Ok(rational_runge(m, order)),
        "one" => Ok(constant_one(m, order)),
        "cos" => Ok(cosine(m, order)),
        _ => {
            let n: usize = name
                .strip_prefix("manufactured:")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Config(format!("unknown amplitude '{name}'")))?;
            Ok(manufactured_unit(sys, n, order)?.amplitude)
        }
    }
}

/// Manufactured problem with `p = e_1 T_n`.
pub fn manufactured_unit(sys: &OscillatorSystem, n: usize, order: usize) -> Result<Manufactured> {
    let mut p = vec![ChebCoeffVector::zeros(n + 1); sys.dim()];
    p[0] = ChebCoeffVector::unit(n, n + 1);
    manufactured(sys, p, order)
}
