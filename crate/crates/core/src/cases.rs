//! Analytic test fields with known Fourier coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bessel::{i_pow_neg, BesselColumn};
use crate::error::{Error, Result};
use crate::gll::legendre;

/// Parameters of the rotated double series
/// `u(x) = sum_q exp(b1 |q1| + b2 |q2| + i q.L.x)`, `L = [[l1, l2], [-l2, l1]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedSeriesParams {
    pub decay: [f64; 2],
    pub rotation: [i64; 2],
    pub truncation: i64,
}

impl Default for RotatedSeriesParams {
    fn default() -> Self {
        Self { decay: [-0.4, -0.4], rotation: [1, 2], truncation: 96 }
    }
}

impl RotatedSeriesParams {
    pub fn validate(&self) -> Result<()> {
        if self.decay.iter().any(|&b| b.is_nan() || b >= 0.0) {
            return Err(Error::Param(format!("decay rates must be negative, got {:?}", self.decay)));
        }
        if self.rotation == [0, 0] {
            return Err(Error::Param("rotation must be nonzero".into()));
        }
        if self.truncation < 1 {
            return Err(Error::Param("truncation radius must be positive".into()));
        }
        Ok(())
    }

    /// Bound on the dropped part of the series at any point.
    pub fn tail_bound(&self) -> f64 {
        let f = |b: f64| {
            let rho = b.exp();
            (1.0 + rho) / (1.0 - rho)
        };
        let tail = |b: f64| 2.0 * (b * (self.truncation + 1) as f64).exp() / (1.0 - b.exp());
        tail(self.decay[0]) * f(self.decay[1]) + tail(self.decay[1]) * f(self.decay[0])
    }

    /// Image of the integer vector `q` under `L^T`.
    pub fn image(&self, q: [i64; 2]) -> [i64; 2] {
        let [l1, l2] = self.rotation;
        [l1 * q[0] - l2 * q[1], l2 * q[0] + l1 * q[1]]
    }

    /// Preimage of `q'` under `L^T`, if it is an integer vector.
    pub fn preimage(&self, qp: &[i64]) -> Option<[i64; 2]> {
        let [l1, l2] = self.rotation;
        let det = l1 * l1 + l2 * l2;
        let a = l1 * qp[0] + l2 * qp[1];
        let b = -l2 * qp[0] + l1 * qp[1];
        (a % det == 0 && b % det == 0).then(|| [a / det, b / det])
    }

    fn factor(&self, b: f64, theta: f64) -> f64 {
        let mut s = 0.0;
        for n in (1..=self.truncation).rev() {
            s += (b * n as f64).exp() * (n as f64 * theta).cos();
        }
        1.0 + 2.0 * s
    }
}

/// Wavevector and time of the 2D Burgers fields `u = -l sin(l.x)` at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersParams {
    pub wave: [i64; 2],
    pub time: f64,
    /// Viscosity in the normalization `U_t + U U_z = nu U_zz` on `z in [-1, 1]`.
    pub viscosity: f64,
}

impl Default for BurgersParams {
    fn default() -> Self {
        Self { wave: [1, 2], time: 1.6037 / (5.0 * PI), viscosity: 1e-2 / PI }
    }
}

impl BurgersParams {
    pub fn wave_norm_sq(&self) -> f64 {
        (self.wave[0] * self.wave[0] + self.wave[1] * self.wave[1]) as f64
    }
}

/// Cole-Hopf solution of `U_t + U U_z = nu U_zz` with `U(z, 0) = -sin(pi z)`,
/// evaluated from the heat-kernel integral with the exponent shifted by its
/// maximum.
#[derive(Debug, Clone)]
pub struct ColeHopf {
    nu: f64,
    t: f64,
    eta: Vec<f64>,
}

impl ColeHopf {
    const SAMPLES: usize = 16_001;

    pub fn new(nu: f64, t: f64) -> Result<Self> {
        if !(nu.is_finite() && t.is_finite() && nu > 0.0 && t >= 0.0) {
            return Err(Error::Param(format!("need nu > 0 and t >= 0, got nu={nu}, t={t}")));
        }
        // The Gaussian has to beat the exp(cos / (2 pi nu)) swing of the
        // initial potential by a margin of e^-40.
        let swing = 1.0 / (PI * nu);
        let half = (4.0 * nu * t * (swing + 40.0)).sqrt();
        let n = Self::SAMPLES;
        let eta = (0..n).map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64).collect();
        Ok(Self { nu, t, eta })
    }

    pub fn eval(&self, z: f64) -> f64 {
        if self.t == 0.0 {
            return -(PI * z).sin();
        }
        let a = 1.0 / (2.0 * PI * self.nu);
        let g = 1.0 / (4.0 * self.nu * self.t);
        let exponent = |eta: f64| -a * (PI * (z - eta)).cos() - g * eta * eta;
        let peak = self.eta.iter().map(|&e| exponent(e)).fold(f64::NEG_INFINITY, f64::max);
        let mut num = 0.0;
        let mut den = 0.0;
        for &e in &self.eta {
            let w = (exponent(e) - peak).exp();
            num += (PI * (z - e)).sin() * w;
            den += w;
        }
        -num / den
    }
}

#[derive(Debug, Clone)]
pub enum CaseKind {
    /// `u(x) = L_p(x / pi)` in 1D.
    Legendre(usize),
    /// `u(x) = sin x` in 1D.
    Sin,
    RotatedSeries(RotatedSeriesParams),
    /// `u = -l sin(l.x)`, two components.
    BurgersInitial(BurgersParams),
    /// `u = l U(l.x / pi, |l|^2 t)` with the Cole-Hopf `U`; no exact spectrum.
    BurgersEvolved(BurgersParams, ColeHopf),
}

/// A named analytic field.
#[derive(Debug, Clone)]
pub struct AnalyticCase {
    pub name: String,
    pub dim: usize,
    pub components: usize,
    pub kind: CaseKind,
}

impl AnalyticCase {
    pub fn legendre(p: usize) -> Result<Self> {
        if p > 18 {
            return Err(Error::Param(format!("Legendre case supports p <= 18, got {p}")));
        }
        Ok(Self { name: format!("legendre_{p}"), dim: 1, components: 1, kind: CaseKind::Legendre(p) })
    }

    pub fn sin() -> Self {
        Self { name: "sin".into(), dim: 1, components: 1, kind: CaseKind::Sin }
    }

    pub fn rotated_series(params: RotatedSeriesParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { name: "rotser".into(), dim: 2, components: 1, kind: CaseKind::RotatedSeries(params) })
    }

    pub fn burgers_initial(params: BurgersParams) -> Self {
        Self { name: "burgers0".into(), dim: 2, components: 2, kind: CaseKind::BurgersInitial(params) }
    }

    pub fn burgers_evolved(params: BurgersParams) -> Result<Self> {
        let solver = ColeHopf::new(params.viscosity, params.wave_norm_sq() * params.time)?;
        Ok(Self { name: "burgers_t".into(), dim: 2, components: 2, kind: CaseKind::BurgersEvolved(params, solver) })
    }

    /// Names accepted by [`AnalyticCase::by_name`].
    pub fn names() -> &'static [&'static str] {
        &["legendre_p", "sin", "rotser", "burgers0", "burgers_t"]
    }

    /// `legendre_<p>` (or `legendre_p` with `degree`), `sin`, `rotser`,
    /// `burgers0`, `burgers_t`, each with default parameters.
    pub fn by_name(name: &str, degree: Option<usize>, burgers: BurgersParams) -> Result<Self> {
        match name {
            "sin" => Ok(Self::sin()),
            "rotser" => Self::rotated_series(RotatedSeriesParams::default()),
            "burgers0" => Ok(Self::burgers_initial(burgers)),
            "burgers_t" => Self::burgers_evolved(burgers),
            "legendre_p" | "legendre" => {
                Self::legendre(degree.ok_or_else(|| Error::Param("legendre case needs a degree".into()))?)
            }
            other => match other.strip_prefix("legendre_").and_then(|p| p.parse().ok()) {
                Some(p) => Self::legendre(p),
                None => Err(Error::Param(format!("unknown case {other:?}"))),
            },
        }
    }

    /// Writes the field value(s) at `x`.
    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        match &self.kind {
            CaseKind::Legendre(p) => out[0] = legendre(*p, x[0] / PI),
            CaseKind::Sin => out[0] = x[0].sin(),
            CaseKind::RotatedSeries(prm) => {
                let [l1, l2] = prm.rotation.map(|v| v as f64);
                let t1 = l1 * x[0] + l2 * x[1];
                let t2 = -l2 * x[0] + l1 * x[1];
                out[0] = prm.factor(prm.decay[0], t1) * prm.factor(prm.decay[1], t2);
            }
            CaseKind::BurgersInitial(prm) => {
                let s = (prm.wave[0] as f64 * x[0] + prm.wave[1] as f64 * x[1]).sin();
                out[0] = -(prm.wave[0] as f64) * s;
                out[1] = -(prm.wave[1] as f64) * s;
            }
            CaseKind::BurgersEvolved(prm, solver) => {
                let phase = prm.wave[0] as f64 * x[0] + prm.wave[1] as f64 * x[1];
                let z = (phase + PI).rem_euclid(2.0 * PI) / PI - 1.0;
                let u = solver.eval(z);
                out[0] = prm.wave[0] as f64 * u;
                out[1] = prm.wave[1] as f64 * u;
            }
        }
    }

    pub fn has_exact_spectrum(&self) -> bool {
        !matches!(self.kind, CaseKind::BurgersEvolved(..))
    }

    /// Exact Fourier coefficient, when known.
    pub fn exact(&self, q: &[i64], component: usize) -> Option<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        match &self.kind {
            CaseKind::Legendre(p) => {
                let b = BesselColumn::new(PI * q[0] as f64, *p).ok()?.get(*p);
                Some(i_pow_neg(*p) * b)
            }
            CaseKind::Sin => Some(match q[0] {
                1 => Complex64::new(0.0, -0.5),
                -1 => Complex64::new(0.0, 0.5),
                _ => zero,
            }),
            CaseKind::RotatedSeries(prm) => Some(match prm.preimage(q) {
                Some([a, b]) => Complex64::new((prm.decay[0] * a.abs() as f64 + prm.decay[1] * b.abs() as f64).exp(), 0.0),
                None => zero,
            }),
            CaseKind::BurgersInitial(prm) => {
                let l = prm.wave;
                let amp = l[component] as f64 / 2.0;
                Some(if q == l {
                    Complex64::new(0.0, amp)
                } else if q[0] == -l[0] && q[1] == -l[1] {
                    Complex64::new(0.0, -amp)
                } else {
                    zero
                })
            }
            CaseKind::BurgersEvolved(..) => None,
        }
    }
}
