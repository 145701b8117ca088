//! Convergence sweeps and spectral decay profiles.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::cases::AnalyticCase;
use crate::error::{Error, Result};
use crate::field::NodalField;
use crate::mesh::Mesh;
use crate::transform::{fmt_f64, rms_relative_error, transform, Spectrum, TransformPlan, WaveSet};

pub const DEFAULT_QMAX: i64 = 16;

/// Samples `case` on `mesh` and returns its exact transform.
pub fn case_spectrum(case: &AnalyticCase, mesh: Arc<Mesh>, waves: &WaveSet) -> Result<Spectrum> {
    let field = NodalField::sample(Arc::clone(&mesh), case.components, |x, o| case.eval(x, o))?;
    let plan = TransformPlan::new(mesh, waves.clone())?;
    transform(&field, &plan)
}

/// Exact spectrum of `case` on `waves`.
pub fn exact_spectrum(case: &AnalyticCase, waves: &WaveSet) -> Result<Spectrum> {
    if !case.has_exact_spectrum() {
        return Err(Error::Param(format!("case {} has no exact spectrum", case.name)));
    }
    Ok(Spectrum::from_fn(waves.clone(), case.components, |q, c| case.exact(q, c).unwrap()))
}

/// Relative rms transform error of `case` on a uniform mesh.
pub fn case_error(case: &AnalyticCase, per_axis: usize, degree: usize, waves: &WaveSet) -> Result<f64> {
    let mesh = Arc::new(Mesh::uniform(case.dim, per_axis, degree)?);
    let spec = case_spectrum(case, mesh, waves)?;
    rms_relative_error(&spec, &exact_spectrum(case, waves)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceCell {
    pub elements: usize,
    pub degree: usize,
    pub error: f64,
}

/// Error table over uniform meshes, in `K`-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSurface {
    pub qmax: i64,
    pub cells: Vec<SurfaceCell>,
}

impl ConvergenceSurface {
    pub fn error(&self, elements: usize, degree: usize) -> Option<f64> {
        self.cells.iter().find(|c| c.elements == elements && c.degree == degree).map(|c| c.error)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# qmax={}", self.qmax)?;
        writeln!(out, "K,P,log10_err")?;
        for c in &self.cells {
            writeln!(out, "{},{},{}", c.elements, c.degree, fmt_f64(c.error.log10()))?;
        }
        Ok(())
    }
}

/// Runs `case` over every `(K, P)` pair; `K` counts elements per axis.
pub fn convergence_surface(
    case: &AnalyticCase,
    k_list: &[usize],
    p_list: &[usize],
    qmax: i64,
) -> Result<ConvergenceSurface> {
    let waves = WaveSet::centered_box(case.dim, qmax)?;
    let pairs: Vec<(usize, usize)> = k_list.iter().flat_map(|&k| p_list.iter().map(move |&p| (k, p))).collect();
    let cells = pairs
        .par_iter()
        .map(|&(k, p)| Ok(SurfaceCell { elements: k, degree: p, error: case_error(case, k, p, &waves)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceSurface { qmax, cells })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// Largest magnitude on each `|q|_inf` shell.
    ShellMax,
    /// Magnitudes at integer multiples `n v`, `n >= 0`.
    Direction(Vec<i64>),
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "shell-max" {
            return Ok(Profile::ShellMax);
        }
        let v = s
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Param(format!("bad direction {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Profile::Direction(v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile {
    /// `(|q|, |u_hat|)` pairs, `|q|` the shell index or the Euclidean length.
    pub points: Vec<(f64, f64)>,
    /// Least-squares slope of `log |u_hat|` against `log |q|`.
    pub slope: Option<f64>,
}

impl DecayProfile {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "q_norm,abs")?;
        for (q, a) in &self.points {
            writeln!(out, "{},{}", fmt_f64(*q), fmt_f64(*a))?;
        }
        match self.slope {
            Some(s) => writeln!(out, "# slope={}", fmt_f64(s))?,
            None => writeln!(out, "# slope=nan")?,
        }
        Ok(())
    }
}

/// Decay profile of one component. Points with `|q| = 0` or magnitude at or
/// below `floor` are kept in the listing but left out of the fit.
pub fn spectrum_decay_profile(spec: &Spectrum, component: usize, profile: &Profile, floor: f64) -> Result<DecayProfile> {
    let waves = spec.waves();
    if waves.is_empty() {
        return Err(Error::Param("empty spectrum".into()));
    }
    if component >= spec.components() {
        return Err(Error::Index { index: component, limit: spec.components() });
    }
    let points = match profile {
        Profile::ShellMax => {
            let mut shells: Vec<f64> = Vec::new();
            for (i, q) in waves.iter().enumerate() {
                let s = q.iter().map(|v| v.unsigned_abs() as usize).max().unwrap_or(0);
                if shells.len() <= s {
                    shells.resize(s + 1, f64::NAN);
                }
                let a = spec.get(i, component).norm();
                shells[s] = if shells[s].is_nan() { a } else { shells[s].max(a) };
            }
            shells.into_iter().enumerate().filter(|(_, a)| !a.is_nan()).map(|(s, a)| (s as f64, a)).collect()
        }
        Profile::Direction(v) => {
            if v.len() != waves.dim() {
                return Err(Error::Shape(format!("direction has {} entries, spectrum is {}D", v.len(), waves.dim())));
            }
            if v.iter().all(|&c| c == 0) {
                return Err(Error::Param("direction vector is zero".into()));
            }
            let len = v.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt();
            let mut pts = Vec::new();
            for n in 0.. {
                let q: Vec<i64> = v.iter().map(|&c| c * n).collect();
                match spec.lookup(&q, component) {
                    Some(u) => pts.push((n as f64 * len, u.norm())),
                    None => break,
                }
            }
            pts
        }
    };
    let fit: Vec<(f64, f64)> = points.iter().filter(|(q, a)| *q > 0.0 && *a > floor).map(|&(q, a)| (q, a)).collect();
    Ok(DecayProfile { slope: loglog_slope(&fit), points })
}

/// Least-squares slope of `log y` against `log x`; `None` below two points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Repeatedly refines the elements with the largest tail indicator, as long
/// as the mesh stays within `max_elements`, until every indicator is at most
/// `tol` or no element can be split.
pub fn refine_to_budget(case: &AnalyticCase, start: Mesh, tol: f64, max_elements: usize) -> Result<Mesh> {
    let children = 1usize << start.dim();
    let mut mesh = start;
    loop {
        let field = NodalField::sample(Arc::new(mesh.clone()), case.components, |x, o| case.eval(x, o))?;
        let ind = field.tail_indicators();
        let mut order: Vec<usize> = (0..ind.len()).filter(|&k| ind[k] > tol).collect();
        order.sort_by(|&a, &b| ind[b].total_cmp(&ind[a]).then(a.cmp(&b)));
        let room = max_elements.saturating_sub(mesh.len()) / (children - 1);
        if order.is_empty() || room == 0 {
            return Ok(mesh);
        }
        let mut flags = vec![false; mesh.len()];
        for &k in order.iter().take(room) {
            flags[k] = true;
        }
        mesh = mesh.refine(&flags)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (1..6).map(|k| (k as f64, 3.0 * (k as f64).powi(-2))).collect();
        assert!((loglog_slope(&pts).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&pts[..1]), None);
    }

    #[test]
    fn profile_parsing() {
        assert_eq!("shell-max".parse::<Profile>().unwrap(), Profile::ShellMax);
        assert_eq!("1,2".parse::<Profile>().unwrap(), Profile::Direction(vec![1, 2]));
        assert!("1,x".parse::<Profile>().is_err());
    }

    #[test]
    fn direction_profile_of_burgers() {
        let case = AnalyticCase::burgers_initial(Default::default());
        let spec = exact_spectrum(&case, &WaveSet::centered_box(2, 8).unwrap()).unwrap();
        let p = spectrum_decay_profile(&spec, 0, &Profile::Direction(vec![1, 2]), 1e-14).unwrap();
        assert_eq!(p.points.len(), 5);
        assert_eq!(p.points.iter().filter(|(_, a)| *a > 0.0).count(), 1);
        assert!(spectrum_decay_profile(&spec, 0, &Profile::Direction(vec![0, 0]), 0.0).is_err());
        assert!(spectrum_decay_profile(&spec, 2, &Profile::ShellMax, 0.0).is_err());
    }

    #[test]
    fn shell_max_profile() {
        let waves = WaveSet::centered_box(1, 4).unwrap();
        let spec = Spectrum::from_fn(waves, 1, |q, _| Complex64::new(1.0 / (1 + q[0] * q[0]) as f64, 0.0));
        let p = spectrum_decay_profile(&spec, 0, &Profile::ShellMax, 0.0).unwrap();
        assert_eq!(p.points.len(), 5);
        assert_eq!(p.points[2], (2.0, 0.2));
    }

    #[test]
    fn small_surface() {
        let s = convergence_surface(&AnalyticCase::sin(), &[2, 4], &[3, 4], 4).unwrap();
        assert_eq!(s.cells.len(), 4);
        assert!(s.error(4, 4).unwrap() < s.error(2, 3).unwrap());
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# qmax=4\nK,P,log10_err\n2,3,"));
    }

    #[test]
    fn budget_is_respected() {
        let case = AnalyticCase::rotated_series(Default::default()).unwrap();
        let m = refine_to_budget(&case, Mesh::uniform(2, 2, 3).unwrap(), 1e-9, 20).unwrap();
        assert!(m.len() <= 20 && m.len() > 4);
    }
}
