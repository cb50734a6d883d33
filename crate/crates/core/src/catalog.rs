//! Closed-form metrics in their native coordinates, each carried as a full
//! second-order jet plus the Jacobian dt/ds to arclength. Everything here is
//! hand-differentiated; the tests pin the jets against the first-order family
//! they solve and against quadrature of dt/ds.

use crate::error::{Error, Result};
use crate::family::ParamSet;
use crate::frame::JetPoint;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// Self-dual end of the family with a nut at r = m; domain r in (m, inf).
    TaubNut { m: f64 },
    /// Resolved cone over RP^3; domain r in (a, inf).
    EguchiHanson { a: f64 },
    /// Round complex projective plane scaled by alpha; domain t in
    /// (0, pi/alpha), the full arc with A2 > 0. A1 changes sign at the
    /// midpoint, so arclength jets exist only on the first half.
    FubiniStudy { alpha: f64 },
    /// Its noncompact sibling with sinh in place of sin; domain t in (0, inf).
    FubiniStudyHyperbolic { alpha: f64 },
    /// The incomplete metric A1 = 1/rho, A2 = rho/(c^2 - rho^2); domain rho in
    /// (0, c), with rho -> c the asymptotic end and rho -> 0 the singular one.
    Case3 { c: f64 },
    /// Cone over the round 3-sphere, A1 = A2 = t; domain t in (0, inf).
    FlatCone,
}

/// Second-order jet in the native coordinate s, with the chain-rule data
/// needed to convert to arclength: dt_ds = dt/ds and its s-derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NativeJet {
    pub coord: f64,
    pub a1: f64,
    pub da1: f64,
    pub d2a1: f64,
    pub a2: f64,
    pub da2: f64,
    pub d2a2: f64,
    pub dt_ds: f64,
    pub d_dt_ds: f64,
}

impl NativeJet {
    /// Arclength jet: A' = (dA/ds)/phi, A'' = (d2A/ds^2)/phi^2 - (dA/ds) phi'/phi^3
    /// with phi = dt/ds.
    pub fn to_arclength(&self) -> Result<JetPoint> {
        let phi = self.dt_ds;
        let dphi = self.d_dt_ds;
        JetPoint::new(
            self.a1,
            self.da1 / phi,
            self.d2a1 / (phi * phi) - self.da1 * dphi / (phi * phi * phi),
            self.a2,
            self.da2 / phi,
            self.d2a2 / (phi * phi) - self.da2 * dphi / (phi * phi * phi),
        )
    }
}

impl ClosedForm {
    pub fn from_name(name: &str, param: Option<f64>) -> Result<Self> {
        let need = |form: &'static str| {
            param.ok_or(Error::NonPositiveFormParam { form, value: f64::NAN })
        };
        match name {
            "taub-nut" => Ok(Self::TaubNut { m: need("taub-nut")? }),
            "eguchi-hanson" => Ok(Self::EguchiHanson { a: need("eguchi-hanson")? }),
            "fubini-study" => Ok(Self::FubiniStudy { alpha: need("fubini-study")? }),
            "fubini-study-hyperbolic" => Ok(Self::FubiniStudyHyperbolic {
                alpha: need("fubini-study-hyperbolic")?,
            }),
            "case3" => Ok(Self::Case3 { c: need("case3")? }),
            "flat-cone" => Ok(Self::FlatCone),
            other => Err(Error::BadRational(format!("unknown closed form {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::TaubNut { .. } => "taub-nut",
            Self::EguchiHanson { .. } => "eguchi-hanson",
            Self::FubiniStudy { .. } => "fubini-study",
            Self::FubiniStudyHyperbolic { .. } => "fubini-study-hyperbolic",
            Self::Case3 { .. } => "case3",
            Self::FlatCone => "flat-cone",
        }
    }

    pub fn param(&self) -> Option<f64> {
        match *self {
            Self::TaubNut { m } => Some(m),
            Self::EguchiHanson { a } => Some(a),
            Self::FubiniStudy { alpha } | Self::FubiniStudyHyperbolic { alpha } => Some(alpha),
            Self::Case3 { c } => Some(c),
            Self::FlatCone => None,
        }
    }

    fn check_param(&self) -> Result<()> {
        if let Some(v) = self.param() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::NonPositiveFormParam { form: self.name(), value: v });
            }
        }
        Ok(())
    }

    /// Open native-coordinate domain; the upper end may be infinite.
    pub fn domain(&self) -> Result<(f64, f64)> {
        self.check_param()?;
        Ok(match *self {
            Self::TaubNut { m } => (m, f64::INFINITY),
            Self::EguchiHanson { a } => (a, f64::INFINITY),
            Self::FubiniStudy { alpha } => (0.0, std::f64::consts::PI / alpha),
            Self::FubiniStudyHyperbolic { .. } => (0.0, f64::INFINITY),
            Self::Case3 { c } => (0.0, c),
            Self::FlatCone => (0.0, f64::INFINITY),
        })
    }

    /// First-order family solved by this form, in its native orientation.
    /// Increasing native coordinate may run against arclength; compare with
    /// `ParamSet::canonical_sign`.
    pub fn matching_params(&self) -> ParamSet {
        let ints = match self {
            Self::TaubNut { .. } => [1, 0, 0, 0, -1, 2],
            Self::EguchiHanson { .. } => [-1, 0, 2, 0, 1, 0],
            Self::FubiniStudy { .. } | Self::FubiniStudyHyperbolic { .. } => [2, 0, -1, 0, 1, 0],
            Self::Case3 { .. } => [-1, 0, 0, 0, 1, 2],
            Self::FlatCone => [0, 0, 1, 0, 0, 1],
        };
        ParamSet::from_ints(ints).expect("nonzero parameter sets")
    }

    /// Ric = lambda g, the common diagonal value of the Ricci form.
    pub fn einstein_constant(&self) -> f64 {
        match *self {
            Self::FubiniStudy { alpha } => 12.0 * alpha * alpha,
            Self::FubiniStudyHyperbolic { alpha } => -12.0 * alpha * alpha,
            _ => 0.0,
        }
    }

    pub fn evaluate(&self, coord: f64) -> Result<NativeJet> {
        let (lo, hi) = self.domain()?;
        if !coord.is_finite() || coord <= lo || coord >= hi {
            return Err(Error::OutsideDomain { form: self.name(), coord });
        }
        let jet = match *self {
            Self::TaubNut { m } => taub_nut_jet(m, coord),
            Self::EguchiHanson { a } => eguchi_hanson_jet(a, coord),
            Self::FubiniStudy { alpha } => fubini_study_jet(alpha, coord),
            Self::FubiniStudyHyperbolic { alpha } => fubini_study_hyperbolic_jet(alpha, coord),
            Self::Case3 { c } => case3_jet(c, coord),
            Self::FlatCone => NativeJet {
                coord,
                a1: coord,
                da1: 1.0,
                d2a1: 0.0,
                a2: coord,
                da2: 1.0,
                d2a2: 0.0,
                dt_ds: 1.0,
                d_dt_ds: 0.0,
            },
        };
        let finite = [jet.a1, jet.da1, jet.d2a1, jet.a2, jet.da2, jet.d2a2, jet.dt_ds, jet.d_dt_ds]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFiniteJet);
        }
        Ok(jet)
    }

    pub fn arclength_jet(&self, coord: f64) -> Result<JetPoint> {
        self.evaluate(coord)?.to_arclength()
    }

    /// Residual of the arclength jet against a first-order family:
    /// (A1' - p(x), A2' - q(x)). Any parameter set is accepted; a
    /// mismatched one simply leaves the residuals away from zero.
    pub fn ode_residual(&self, params: &ParamSet, coord: f64) -> Result<(f64, f64)> {
        let jet = self.arclength_jet(coord)?;
        let (d1, d2) = params.rhs(jet.a1(), jet.a2());
        Ok((jet.a1p() - d1, jet.a2p() - d2))
    }

    /// Arclength between two native coordinates by adaptive quadrature of
    /// dt/ds. Signed: negative when s1 < s0.
    pub fn arclength_between(&self, s0: f64, s1: f64) -> Result<f64> {
        self.evaluate(s0)?;
        self.evaluate(s1)?;
        let phi = |s: f64| self.evaluate(s).map(|j| j.dt_ds).unwrap_or(f64::NAN);
        Ok(adaptive_simpson(&phi, s0, s1, 1e-13))
    }

    /// Arclength coordinate of one native sample. Each form keeps its own
    /// time origin: the closed antiderivatives for TaubNut and Case3, the
    /// bolt for EguchiHanson, the native coordinate where it already is
    /// arclength.
    pub fn arclength_coordinate(&self, coord: f64) -> Result<f64> {
        match *self {
            Self::TaubNut { m } => taub_nut_t_of_r(m, coord),
            Self::Case3 { c } => case3_t_of_rho(c, coord),
            Self::EguchiHanson { a } => {
                self.evaluate(coord)?;
                // dt/dr has an integrable inverse-sqrt endpoint at the bolt;
                // split it off analytically: at r = a (1 + d),
                // t = a sqrt(d) (1 + 5 d / 12) + O(d^(5/2))
                let splice = 1e-6;
                let head = |d: f64| a * d.sqrt() * (1.0 + 5.0 * d / 12.0);
                let d = coord / a - 1.0;
                if d <= splice {
                    Ok(head(d))
                } else {
                    Ok(head(splice) + self.arclength_between(a * (1.0 + splice), coord)?)
                }
            }
            Self::FubiniStudy { .. } | Self::FubiniStudyHyperbolic { .. } | Self::FlatCone => {
                self.evaluate(coord)?;
                Ok(coord)
            }
        }
    }

    /// Sample points spread over the window where arclength jets exist and
    /// are well conditioned: linear for bounded windows, geometric above the
    /// lower edge otherwise.
    pub fn sample_coords(&self, n: usize) -> Result<Vec<f64>> {
        let (lo, hi) = self.domain()?;
        let (lo, hi) = match *self {
            // A1 changes sign at the midpoint; jets live on the first half
            Self::FubiniStudy { alpha } => (lo, std::f64::consts::FRAC_PI_2 / alpha),
            // curvature terms grow like c^8 / rho^6 toward the singular end,
            // so contracted quantities lose their double-precision digits on
            // the inner fifth of the interval; the asymptotic fits cover
            // that end
            Self::Case3 { c } => (0.2 * c, hi),
            _ => (lo, hi),
        };
        let n = n.max(1);
        let mut out = Vec::with_capacity(n);
        if hi.is_finite() {
            for i in 0..n {
                out.push(lo + (hi - lo) * (i as f64 + 1.0) / (n as f64 + 1.0));
            }
        } else {
            // offsets from lo covering three decades each way, scaled by lo
            // when lo > 0; the hyperbolic window is squeezed on both sides,
            // above where single ulps of cosh(2 alpha t) outgrow 1e-13 and
            // below where the 8/A2^2 term costs more than 1e-9 in roundoff
            let scale = if lo > 0.0 { lo } else { 1.0 };
            let mut o_hi = scale * 1e3;
            let mut o_lo = scale * 1e-3;
            if let Self::FubiniStudyHyperbolic { alpha } = *self {
                o_hi = o_hi.min(3.5 / alpha);
                o_lo = o_lo.max(1e-2 / alpha);
            }
            for i in 0..n {
                let f = i as f64 / (n as f64 - 1.0).max(1.0);
                out.push(lo + o_lo * (o_hi / o_lo).powf(f));
            }
        }
        Ok(out)
    }
}

fn taub_nut_jet(m: f64, r: f64) -> NativeJet {
    let rm = r - m;
    let rp = r + m;
    let u = rm / rp;
    let su = u.sqrt();
    let s2 = (r * r - m * m).sqrt();
    NativeJet {
        coord: r,
        a1: m * su,
        da1: m * m / (rp * rp * su),
        d2a1: -m * m * (2.0 * r - m) / (rp.powi(2) * rm * su * rp),
        a2: s2 / 2.0,
        da2: r / (2.0 * s2),
        d2a2: -m * m / (2.0 * s2.powi(3)),
        dt_ds: 0.25 / su,
        d_dt_ds: -m / (4.0 * rm * su * rp),
    }
}

/// Closed-form arclength for the nut metric, used as a quadrature oracle:
/// t(r) = (sqrt(r^2 - m^2) + 2 m ln(sqrt(r - m) + sqrt(r + m))) / 4.
pub fn taub_nut_t_of_r(m: f64, r: f64) -> Result<f64> {
    ClosedForm::TaubNut { m }.evaluate(r)?;
    let s = ((r * r - m * m).sqrt() + 2.0 * m * ((r - m).sqrt() + (r + m).sqrt()).ln()) / 4.0;
    Ok(s)
}

fn eguchi_hanson_jet(a: f64, r: f64) -> NativeJet {
    let a4 = a.powi(4);
    let r4 = r.powi(4);
    // factored so the bolt offset enters through the exact difference r - a;
    // the unfactored 1 - a^4/r^4 loses half its digits by r = a (1 + 1e-6)
    let w = (r - a) * (r + a) * (r * r + a * a) / r4;
    let sw = w.sqrt();
    NativeJet {
        coord: r,
        a1: r * sw,
        da1: (r4 + a4) / (r4 * sw),
        d2a1: -2.0 * a4 * (3.0 * r4 - a4) / (r.powi(9) * sw.powi(3)),
        a2: r,
        da2: 1.0,
        d2a2: 0.0,
        dt_ds: 1.0 / sw,
        d_dt_ds: -2.0 * a4 / (r.powi(5) * sw.powi(3)),
    }
}

fn fubini_study_jet(alpha: f64, t: f64) -> NativeJet {
    let (s2, c2) = (2.0 * alpha * t).sin_cos();
    let (s1, c1) = (alpha * t).sin_cos();
    NativeJet {
        coord: t,
        a1: s2 / (2.0 * alpha),
        da1: c2,
        d2a1: -2.0 * alpha * s2,
        a2: s1 / alpha,
        da2: c1,
        d2a2: -alpha * s1,
        dt_ds: 1.0,
        d_dt_ds: 0.0,
    }
}

fn fubini_study_hyperbolic_jet(alpha: f64, t: f64) -> NativeJet {
    NativeJet {
        coord: t,
        a1: (2.0 * alpha * t).sinh() / (2.0 * alpha),
        da1: (2.0 * alpha * t).cosh(),
        d2a1: 2.0 * alpha * (2.0 * alpha * t).sinh(),
        a2: (alpha * t).sinh() / alpha,
        da2: (alpha * t).cosh(),
        d2a2: alpha * (alpha * t).sinh(),
        dt_ds: 1.0,
        d_dt_ds: 0.0,
    }
}

fn case3_jet(c: f64, rho: f64) -> NativeJet {
    let c2 = c * c;
    let r2 = rho * rho;
    let d = c2 - r2;
    NativeJet {
        coord: rho,
        a1: 1.0 / rho,
        da1: -1.0 / r2,
        d2a1: 2.0 / (r2 * rho),
        a2: rho / d,
        da2: (c2 + r2) / (d * d),
        d2a2: 2.0 * rho * (3.0 * c2 + r2) / (d * d * d),
        dt_ds: r2 / (d * d),
        d_dt_ds: 2.0 * rho * (c2 + r2) / (d * d * d),
    }
}

/// Arclength from the singular end rho = 0:
/// t(rho) = (2 rho / (c^2 - rho^2) - ln((c + rho)/(c - rho)) / c) / 4.
pub fn case3_t_of_rho(c: f64, rho: f64) -> Result<f64> {
    ClosedForm::Case3 { c }.evaluate(rho)?;
    Ok((2.0 * rho / (c * c - rho * rho) - ((c + rho) / (c - rho)).ln() / c) / 4.0)
}

/// Diagonal metric coefficients in the rho chart: (g_rho_rho, A1^2, A2^2)
/// with g_rho_rho = (dt/drho)^2.
pub fn case3_metric_coeffs(c: f64, rho: f64) -> Result<(f64, f64, f64)> {
    let jet = ClosedForm::Case3 { c }.evaluate(rho)?;
    Ok((jet.dt_ds * jet.dt_ds, jet.a1 * jet.a1, jet.a2 * jet.a2))
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        // the noise term keeps integrand roundoff from forcing a full-depth
        // tree: once delta sits at the summands' ulp scale, splitting cannot
        // shrink it further
        let noise = f64::EPSILON * (left.abs() + right.abs() + whole.abs());
        if depth == 0 || delta.abs() <= 15.0 * tol + noise {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let scale = 1.0 + (b - a).abs();
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol * scale, 48)
}
