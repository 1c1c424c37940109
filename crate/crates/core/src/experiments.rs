//! Theorem exponents, power-law fits and scaling runs.

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use crate::counting::{count_gamma, CountQuery, CountReport};
use crate::error::{Error, Result};
use crate::geometry::FlexReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundVariant {
    /// All four exponents.
    ThmMain,
    /// First and last exponent only.
    ThmGeneric,
    /// The `tau` threshold beyond which the count is `o(B)`.
    CorThreshold,
}

impl BoundVariant {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "thm-main" => Ok(BoundVariant::ThmMain),
            "thm-generic" => Ok(BoundVariant::ThmGeneric),
            "cor-threshold" => Ok(BoundVariant::CorThreshold),
            _ => Err(Error::Parse(format!("unknown bound variant {s}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundSpec {
    pub variant: BoundVariant,
    pub k: u32,
    /// Ignored by `CorThreshold`.
    pub tau: BigRational,
}

impl BoundSpec {
    pub fn new(variant: BoundVariant, k: u32, tau: BigRational) -> Self {
        BoundSpec { variant, k, tau }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Exponent {
    Exact(BigRational),
    Real(f64),
}

impl Exponent {
    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Exact(r) => ratio_f64(r),
            Exponent::Real(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Exponent::Exact(r) => Some(r),
            Exponent::Real(_) => None,
        }
    }
}

fn ratio_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The four exponents of the main bound, in printed order.
pub fn theorem_terms(k: u32, tau: &BigRational) -> [BigRational; 4] {
    let k = BigRational::from_integer(k.into());
    [
        q(9, 4) / tau + q(1, 1) - tau / &k,
        q(2, 1) - tau / q(4, 1),
        q(2, 1) + q(27, 20) / tau - q(9, 20) * tau,
        q(3, 2) / tau + q(2, 3),
    ]
}

/// Exponent `2 - tau/nu` of the points on tangent lines of contact order `nu`.
pub fn tangent_exponent(tau: &BigRational, nu: u32) -> BigRational {
    q(2, 1) - tau / BigRational::from_integer(nu.into())
}

pub fn bound_exponents(spec: &BoundSpec) -> Result<Exponent> {
    if spec.k < 5 {
        return Err(Error::precondition("bounds need k >= 5"));
    }
    if spec.variant == BoundVariant::CorThreshold {
        if spec.k <= 9 {
            return Ok(Exponent::Exact(q(9, 2)));
        }
        let s = spec.k.sqrt();
        if s * s == spec.k {
            return Ok(Exponent::Exact(q(3 * s as i64, 2)));
        }
        return Ok(Exponent::Real(1.5 * (spec.k as f64).sqrt()));
    }
    let k = BigRational::from_integer(spec.k.into());
    if spec.tau < q(2, 1) || spec.tau > k {
        return Err(Error::precondition("bounds need 2 <= tau <= k"));
    }
    let t = theorem_terms(spec.k, &spec.tau);
    let used: &[usize] = match spec.variant {
        BoundVariant::ThmMain => &[0, 1, 2, 3],
        _ => &[0, 3],
    };
    let best = used.iter().map(|&i| t[i].clone()).max().expect("nonempty");
    Ok(Exponent::Exact(best))
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentFit {
    pub samples: Vec<(u64, u64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log2 units.
    pub residual: f64,
}

/// Least-squares line through `(log2 B, log2 max(count, 1))`.
pub fn fit_exponent(samples: &[(u64, u64)]) -> Result<ExponentFit> {
    let mut bs: Vec<u64> = samples.iter().map(|s| s.0).collect();
    bs.sort_unstable();
    bs.dedup();
    if bs.len() < 3 {
        return Err(Error::precondition("a fit needs at least 3 distinct B values"));
    }
    if bs[0] == 0 {
        return Err(Error::precondition("B must be positive"));
    }
    let pts: Vec<(f64, f64)> =
        samples.iter().map(|&(b, n)| ((b as f64).log2(), (n.max(1) as f64).log2())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    if !slope.is_finite() {
        return Err(Error::certification("fitted slope is not finite"));
    }
    Ok(ExponentFit { samples: samples.to_vec(), slope, intercept, residual: (ss / n).sqrt() })
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Allowance added to the bound before comparing slopes.
    pub slack: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { slack: 0.2 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ReportOutputs {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub form_id: String,
    pub gamma: String,
    pub tau: String,
    pub reports: Vec<CountReport>,
    /// Fit of `N_star` when tangent lines were excluded, of `N` otherwise.
    pub fit: ExponentFit,
    pub bound: Option<f64>,
    pub slack: f64,
    pub within_bound: Option<bool>,
}

impl ScalingReport {
    pub fn csv(&self) -> String {
        let mut s = String::new();
        s.push_str(CountReport::csv_header());
        s.push('\n');
        for r in &self.reports {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn fitted_count(r: &CountReport) -> u64 {
    r.n_star.unwrap_or(r.n)
}

/// Run `count_gamma` for each query in ascending `B`, fit the exponent and
/// compare it with the main bound. Rows are written to the CSV as they are
/// produced, so a failing count leaves the finished rows on disk.
pub fn fit_and_report(
    plan: &[CountQuery],
    flexes: Option<&FlexReport>,
    outputs: &ReportOutputs,
    cfg: &ExperimentConfig,
) -> Result<ScalingReport> {
    let first = plan.first().ok_or_else(|| Error::precondition("empty plan"))?;
    if plan.iter().any(|p| p.form != first.form || p.gamma != first.gamma) {
        return Err(Error::precondition("plan mixes forms or gamma values"));
    }
    let mut order: Vec<&CountQuery> = plan.iter().collect();
    order.sort_by_key(|p| p.b);
    let mut distinct: Vec<u64> = order.iter().map(|p| p.b).collect();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::precondition("a fit needs at least 3 distinct B values"));
    }

    let mut csv = match &outputs.csv {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "{}", CountReport::csv_header())?;
            w.flush()?;
            Some(w)
        }
        None => None,
    };
    let mut reports = Vec::with_capacity(order.len());
    for query in order {
        let r = count_gamma(query, flexes)?;
        if let Some(w) = csv.as_mut() {
            writeln!(w, "{}", r.csv_row())?;
            w.flush()?;
        }
        reports.push(r);
    }

    let samples: Vec<(u64, u64)> = reports.iter().map(|r| (r.b, fitted_count(r))).collect();
    let fit = fit_exponent(&samples)?;
    let k = first.form.degree();
    let tau = first.tau();
    let bound = bound_exponents(&BoundSpec::new(BoundVariant::ThmMain, k, tau.clone())).ok().map(|e| e.to_f64());
    let within_bound = bound.map(|b| fit.slope <= b + cfg.slack);
    let report = ScalingReport {
        form_id: first.form_id.clone(),
        gamma: first.gamma.to_string(),
        tau: tau.to_string(),
        reports,
        fit,
        bound,
        slack: cfg.slack,
        within_bound,
    };
    if let Some(path) = &outputs.svg {
        std::fs::write(path, scaling_svg(&report))?;
    }
    Ok(report)
}

/// Standalone log-log plot of the counts with the fitted line, and the data
/// repeated as a table underneath.
pub fn scaling_svg(r: &ScalingReport) -> String {
    let (w, h, pad) = (640.0, 420.0, 50.0);
    let pts: Vec<(f64, f64)> =
        r.fit.samples.iter().map(|&(b, n)| ((b as f64).log2(), (n.max(1) as f64).log2())).collect();
    let x0 = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x1 = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let fy = |x: f64| r.fit.intercept + r.fit.slope * x;
    let y0 = pts.iter().map(|p| p.1).chain([fy(x0), fy(x1)]).fold(f64::INFINITY, f64::min).floor();
    let y1 = pts.iter().map(|p| p.1).chain([fy(x0), fy(x1)]).fold(f64::NEG_INFINITY, f64::max).ceil();
    let sx = |x: f64| pad + (x - x0) / (x1 - x0).max(1e-9) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0).max(1.0) * (h - 2.0 * pad);

    let rows = r.reports.len() as f64;
    let total_h = h + 30.0 + 16.0 * (rows + 1.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{total_h}" viewBox="0 0 {w} {total_h}" font-family="monospace" font-size="11">"#
    );
    let _ = writeln!(s, "<desc>{}</desc>", escape(&r.csv()));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{pad}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/><line x1="{pad}" y1="{pad}" x2="{pad}" y2="{0}" stroke="black"/>"#,
        h - pad,
        w - pad
    );
    let _ = writeln!(
        s,
        r#"<text x="{pad}" y="20">{} gamma={} tau={}: slope {:.4}, bound {}</text>"#,
        escape(&r.form_id),
        r.gamma,
        r.tau,
        r.fit.slope,
        r.bound.map(|b| format!("{b:.4} + {}", r.slack)).unwrap_or_else(|| "n/a".into())
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}">log2 B</text>"#, w / 2.0, h - 15.0);
    let _ = writeln!(s, r#"<text x="5" y="{}">log2 N</text>"#, pad - 10.0);
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" stroke-width="1.5"/>"#,
        sx(x0),
        sy(fy(x0)),
        sx(x1),
        sy(fy(x1))
    );
    for (x, y) in &pts {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="darkred"/>"#, sx(*x), sy(*y));
    }
    let mut ty = h + 20.0;
    let _ = writeln!(s, r#"<text x="{pad}" y="{ty}">{:>10} {:>12} {:>12}</text>"#, "B", "N", "N_star");
    for rep in &r.reports {
        ty += 16.0;
        let ns = rep.n_star.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        let _ = writeln!(s, r#"<text x="{pad}" y="{ty}" xml:space="preserve">{:>10} {:>12} {:>12}</text>"#, rep.b, rep.n, ns);
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::IntegerForm;

    fn main_bound(k: u32, tau: BigRational) -> BigRational {
        bound_exponents(&BoundSpec::new(BoundVariant::ThmMain, k, tau)).unwrap().exact().unwrap().clone()
    }

    #[test]
    fn main_bound_goldens() {
        assert_eq!(main_bound(5, q(4, 1)), q(25, 24));
        assert_eq!(main_bound(5, q(2, 1)), q(71, 40));
    }

    #[test]
    fn corollary_threshold() {
        let cor = |k| bound_exponents(&BoundSpec::new(BoundVariant::CorThreshold, k, q(0, 1))).unwrap();
        assert_eq!(cor(7), Exponent::Exact(q(9, 2)));
        assert_eq!(cor(16), Exponent::Exact(q(6, 1)));
        assert!((cor(10).to_f64() - 1.5 * 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(bound_exponents(&BoundSpec::new(BoundVariant::ThmMain, 4, q(3, 1))).is_err());
        assert!(bound_exponents(&BoundSpec::new(BoundVariant::ThmMain, 5, q(3, 2))).is_err());
        assert!(bound_exponents(&BoundSpec::new(BoundVariant::ThmMain, 5, q(6, 1))).is_err());
    }

    #[test]
    fn exact_power_law() {
        let samples: Vec<(u64, u64)> = (2..8).map(|e| (1u64 << (2 * e), 1u64 << (3 * e))).collect();
        let fit = fit_exponent(&samples).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn too_few_samples() {
        assert!(fit_exponent(&[(4, 1), (4, 2), (8, 3)]).is_err());
        let f = IntegerForm::parse(3, "x^5 + y^5 - z^5").unwrap();
        let plan = vec![CountQuery::new(f, 8, q(1, 1)).unwrap()];
        assert!(fit_and_report(&plan, None, &ReportOutputs::default(), &ExperimentConfig::default()).is_err());
    }

    #[test]
    fn plot_embeds_table() {
        let f = IntegerForm::parse(3, "x^5 + y^5 - z^5").unwrap();
        let plan: Vec<CountQuery> =
            [8u64, 4, 16].iter().map(|&b| CountQuery::new(f.clone(), b, q(5, 2)).unwrap()).collect();
        let r = fit_and_report(&plan, None, &ReportOutputs::default(), &ExperimentConfig::default()).unwrap();
        assert_eq!(r.reports.iter().map(|x| x.b).collect::<Vec<_>>(), vec![4, 8, 16]);
        let svg = scaling_svg(&r);
        assert!(svg.contains("<desc>form_id,B,gamma"));
        assert_eq!(svg, scaling_svg(&r));
    }
}
