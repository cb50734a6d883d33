//! The first-order family A1' = k1 x^2 + k2 x + k3, A2' = l1 x^2 + l2 x + l3
//! in the ratio x = A1/A2, with exact rational parameters. Because both
//! derivatives depend on the state only through x, every Ricci component
//! collapses to Ric_ii = L_ii(x) / A2^2 for a Laurent polynomial L_ii, and
//! deciding Ricci-flatness of a parameter set is exact arithmetic.
//!
//! `classify` reproduces the case analysis that isolates the flat families and
//! the Einstein family, then sweeps an integer grid as an independent
//! falsification pass: no parameter set on the grid outside the reported
//! families has identically vanishing residuals.

use rayon::prelude::*;
use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::rational::{self, format_rational, rat_int, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamSet {
    k1: Rational,
    k2: Rational,
    k3: Rational,
    l1: Rational,
    l2: Rational,
    l3: Rational,
}

impl ParamSet {
    pub fn new(vals: [Rational; 6]) -> Result<Self> {
        if vals.iter().all(|v| v.is_zero()) {
            return Err(Error::AllZeroParams);
        }
        let [k1, k2, k3, l1, l2, l3] = vals;
        Ok(Self { k1, k2, k3, l1, l2, l3 })
    }

    pub fn from_ints(vals: [i64; 6]) -> Result<Self> {
        Self::new(vals.map(rat_int))
    }

    /// Six comma-separated rationals, each "p/q", integer or exact decimal.
    pub fn parse_list(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 6 {
            return Err(Error::BadRational(s.to_string()));
        }
        let mut vals = Vec::with_capacity(6);
        for p in parts {
            vals.push(rational::parse_rational(p)?);
        }
        Self::new(vals.try_into().expect("length checked"))
    }

    pub fn k1(&self) -> &Rational { &self.k1 }
    pub fn k2(&self) -> &Rational { &self.k2 }
    pub fn k3(&self) -> &Rational { &self.k3 }
    pub fn l1(&self) -> &Rational { &self.l1 }
    pub fn l2(&self) -> &Rational { &self.l2 }
    pub fn l3(&self) -> &Rational { &self.l3 }

    pub fn as_array(&self) -> [&Rational; 6] {
        [&self.k1, &self.k2, &self.k3, &self.l1, &self.l2, &self.l3]
    }

    pub fn as_strings(&self) -> [String; 6] {
        self.as_array().map(format_rational)
    }

    pub fn to_f64_array(&self) -> [f64; 6] {
        self.as_array().map(to_f64)
    }

    /// A1' as a polynomial in x.
    pub fn p_poly(&self) -> LaurentPoly {
        LaurentPoly::from_terms([
            (2, self.k1.clone()),
            (1, self.k2.clone()),
            (0, self.k3.clone()),
        ])
    }

    /// A2' as a polynomial in x.
    pub fn q_poly(&self) -> LaurentPoly {
        LaurentPoly::from_terms([
            (2, self.l1.clone()),
            (1, self.l2.clone()),
            (0, self.l3.clone()),
        ])
    }

    /// Right-hand side (A1', A2') at a state with a2 > 0.
    pub fn rhs(&self, a1: f64, a2: f64) -> (f64, f64) {
        let x = a1 / a2;
        let [k1, k2, k3, l1, l2, l3] = self.to_f64_array();
        ((k1 * x + k2) * x + k3, (l1 * x + l2) * x + l3)
    }

    pub fn sign_flip(&self) -> Self {
        Self {
            k1: -self.k1.clone(),
            k2: -self.k2.clone(),
            k3: -self.k3.clone(),
            l1: -self.l1.clone(),
            l2: -self.l2.clone(),
            l3: -self.l3.clone(),
        }
    }

    /// Representative of {c, -c} whose first nonzero entry is positive.
    pub fn canonical_sign(&self) -> Self {
        for v in self.as_array() {
            if v.is_positive() {
                return self.clone();
            }
            if v.is_negative() {
                return self.sign_flip();
            }
        }
        self.clone()
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.as_strings();
        write!(f, "({})", s.join(", "))
    }
}

/// x' = P(x)/A2 with P = p - x q; a fixed ratio is a root of P.
pub fn x_prime_poly(params: &ParamSet) -> LaurentPoly {
    params.p_poly().sub(&params.q_poly().shift(1))
}

/// The Laurent polynomials with Ric_ii = L_ii(x) / A2^2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicRicci {
    pub l00: LaurentPoly,
    pub l11: LaurentPoly,
    pub l22: LaurentPoly,
}

impl SymbolicRicci {
    pub fn is_flat(&self) -> bool {
        self.l00.is_zero() && self.l11.is_zero() && self.l22.is_zero()
    }

    /// Numeric Ricci diagonal at a state, for cross-checks against the frame
    /// formulas.
    pub fn eval(&self, a1: f64, a2: f64) -> Result<(f64, f64, f64)> {
        let x = a1 / a2;
        let s = a2 * a2;
        Ok((
            self.l00.eval_at(x)? / s,
            self.l11.eval_at(x)? / s,
            self.l22.eval_at(x)? / s,
        ))
    }
}

pub fn symbolic_ricci(params: &ParamSet) -> SymbolicRicci {
    let p = params.p_poly();
    let q = params.q_poly();
    let big_p = x_prime_poly(params);
    let pp = p.ddx();
    let qp = q.ddx();
    let two = LaurentPoly::constant(rational::rat_int(2));
    let four = LaurentPoly::constant(rational::rat_int(4));
    let eight = LaurentPoly::constant(rational::rat_int(8));
    let x2 = LaurentPoly::monomial(rational::rat_int(4), 2);

    // common piece -2 p' P / x
    let head = two.mul(&pp).mul(&big_p).shift(-1).neg();
    let l00 = head.sub(&four.mul(&qp).mul(&big_p));
    let l11 = head.sub(&four.mul(&p).mul(&q).shift(-1)).add(&x2);
    let l22 = two
        .mul(&qp)
        .mul(&big_p)
        .neg()
        .sub(&two.mul(&p).mul(&q).shift(-1))
        .sub(&x2)
        .sub(&two.mul(&q).mul(&q))
        .add(&eight);
    SymbolicRicci { l00, l11, l22 }
}

/// Second factor of L00: L00 = -2 x^-1 P(x) R(x) with
/// R = 4 l1 x^2 + 2(k1 + l2) x + k2.
pub fn l00_cofactor(params: &ParamSet) -> LaurentPoly {
    LaurentPoly::from_terms([
        (2, rat_int(4) * params.l1()),
        (1, rat_int(2) * (params.k1() + params.l2())),
        (0, params.k2().clone()),
    ])
}

pub fn is_ricci_flat(params: &ParamSet) -> bool {
    symbolic_ricci(params).is_flat()
}

/// (L00 - L11, L00 - L22): both must vanish identically for an Einstein
/// metric.
pub fn einstein_difference_polys(params: &ParamSet) -> (LaurentPoly, LaurentPoly) {
    let sr = symbolic_ricci(params);
    (sr.l00.sub(&sr.l11), sr.l00.sub(&sr.l22))
}

/// d/dt (L00(x)/A2^2) times A2^3 equals L00'(x) P(x) - 2 L00(x) q(x); its
/// identical vanishing is constancy of Ric00 along every trajectory.
pub fn einstein_constancy_poly(params: &ParamSet) -> LaurentPoly {
    let sr = symbolic_ricci(params);
    let two = LaurentPoly::constant(rat_int(2));
    sr.l00
        .ddx()
        .mul(&x_prime_poly(params))
        .sub(&two.mul(&sr.l00).mul(&params.q_poly()))
}

/// Einstein in the proper sense: differences vanish, Ric00 is constant along
/// trajectories, and the constant is not forced to zero.
pub fn is_einstein_family(params: &ParamSet) -> bool {
    let sr = symbolic_ricci(params);
    if sr.l00.is_zero() {
        return false;
    }
    sr.l00 == sr.l11 && sr.l00 == sr.l22 && einstein_constancy_poly(params).is_zero()
}

/// Positive real fixed ratios, i.e. roots x > 0 of P. Empty when P vanishes
/// identically (then every ray is invariant; test with `x_prime_poly`).
pub fn fixed_points(params: &ParamSet) -> Vec<f64> {
    let p = x_prime_poly(params);
    let c = |e: i64| to_f64(&p.coeff(e));
    let exact_zero = |e: i64| p.coeff(e).is_zero();
    let coeffs = [c(0), c(1), c(2), c(3)];
    let mut roots = if !exact_zero(3) {
        cubic_roots(coeffs[3], coeffs[2], coeffs[1], coeffs[0])
    } else if !exact_zero(2) {
        quadratic_roots(coeffs[2], coeffs[1], coeffs[0])
    } else if !exact_zero(1) {
        vec![-coeffs[0] / coeffs[1]]
    } else {
        Vec::new()
    };
    for r in roots.iter_mut() {
        *r = polish_root(&p, *r);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
    roots.retain(|&r| r > 1e-12);
    roots
}

fn polish_root(p: &LaurentPoly, mut r: f64) -> f64 {
    let dp = p.ddx();
    for _ in 0..4 {
        let (Ok(f), Ok(d)) = (p.eval_at(r), dp.eval_at(r)) else { break };
        if d == 0.0 {
            break;
        }
        let step = f / d;
        if !step.is_finite() {
            break;
        }
        r -= step;
    }
    r
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let s = disc.sqrt();
    // the numerically stable pairing
    let q = -0.5 * (b + b.signum() * s);
    if q == 0.0 {
        return vec![0.0, -b / a];
    }
    vec![q / a, c / q]
}

fn cubic_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    // depressed form t^3 + p t + q, x = t - b/(3a)
    let shift = b / (3.0 * a);
    let p = c / a - shift * shift * 3.0;
    let q = 2.0 * shift.powi(3) - shift * c / a + d / a;
    let half_q = q / 2.0;
    let disc = half_q * half_q + (p / 3.0).powi(3);
    let mut ts = Vec::new();
    if disc > 0.0 {
        let s = disc.sqrt();
        ts.push(cbrt(-half_q + s) + cbrt(-half_q - s));
    } else if disc == 0.0 {
        if p == 0.0 {
            ts.push(0.0);
        } else {
            ts.push(3.0 * q / p);
            ts.push(-3.0 * q / (2.0 * p));
        }
    } else {
        let r = (-p / 3.0).sqrt();
        let theta = (3.0 * q / (2.0 * p * r)).clamp(-1.0, 1.0).acos();
        for k in 0..3 {
            ts.push(2.0 * r * ((theta - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos());
        }
    }
    ts.into_iter().map(|t| t - shift).collect()
}

fn cbrt(v: f64) -> f64 {
    v.signum() * v.abs().powf(1.0 / 3.0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcludedBranch {
    pub branch: String,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSummary {
    pub bound: i64,
    pub points_checked: u64,
    pub matches_case_tree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationResult {
    /// Canonical-sign representatives, sorted.
    pub ricci_flat_families: Vec<ParamSet>,
    pub einstein_families: Vec<ParamSet>,
    pub excluded_branches: Vec<ExcludedBranch>,
    pub sweep: SweepSummary,
}

impl ClassificationResult {
    pub fn to_json(&self) -> serde_json::Value {
        let fam = |v: &Vec<ParamSet>| {
            serde_json::Value::Array(
                v.iter()
                    .map(|p| {
                        serde_json::Value::Array(
                            p.as_strings()
                                .iter()
                                .map(|s| serde_json::Value::String(s.clone()))
                                .collect(),
                        )
                    })
                    .collect(),
            )
        };
        serde_json::json!({
            "ricci_flat_families": fam(&self.ricci_flat_families),
            "einstein_families": fam(&self.einstein_families),
            "excluded_branches": self.excluded_branches.iter().map(|b| {
                serde_json::json!({"branch": b.branch, "witness": b.witness})
            }).collect::<Vec<_>>(),
            "sweep": {
                "bound": self.sweep.bound,
                "points_checked": self.sweep.points_checked,
                "matches_case_tree": self.sweep.matches_case_tree,
            },
        })
    }
}

/// Walks the vanishing conditions branch by branch (exactly, over the
/// rationals), then sweeps all integer parameter sets with entries in
/// [-bound, bound] to confirm that nothing else on the grid has identically
/// zero residuals. Requires bound >= 3 so the grid contains every family.
pub fn classify(search_bound: i64) -> Result<ClassificationResult> {
    if search_bound < 3 {
        return Err(Error::BoundTooSmall(search_bound));
    }
    let (tree_flat, tree_einstein, excluded_branches) = case_tree();
    let (sweep_flat, sweep_einstein, points_checked) = falsification_sweep(search_bound);

    let matches = sweep_flat == tree_flat && sweep_einstein == tree_einstein;
    let merge = |a: BTreeSet<ParamSet>, b: &BTreeSet<ParamSet>| {
        let mut out = a;
        out.extend(b.iter().cloned());
        out.into_iter().collect::<Vec<_>>()
    };
    Ok(ClassificationResult {
        ricci_flat_families: merge(sweep_flat, &tree_flat),
        einstein_families: merge(sweep_einstein, &tree_einstein),
        excluded_branches,
        sweep: SweepSummary {
            bound: search_bound,
            points_checked,
            matches_case_tree: matches,
        },
    })
}

fn case_tree() -> (BTreeSet<ParamSet>, BTreeSet<ParamSet>, Vec<ExcludedBranch>) {
    let mut excluded = Vec::new();
    let mut flat = BTreeSet::new();
    let mut einstein = BTreeSet::new();

    // Ric00 = -2 x^-1 P R / A2^2 vanishes iff P = 0 or R = 0 identically.
    //
    // R = 0: l1 = k2 = 0, k1 = -l2. There L11 = 4(1-k1^2) x^2 - 4 k3 l3 x^-1,
    // forcing k1^2 = 1 (sign-normalize to k1 = 1, l2 = -1) and k3 l3 = 0; L22
    // then pins the last parameter.
    for (k3, l3) in [(0i64, 2i64), (0, -2), (-2, 0)] {
        let c = ParamSet::from_ints([1, 0, k3, 0, -1, l3]).unwrap();
        if is_ricci_flat(&c) {
            flat.insert(c.canonical_sign());
        }
    }
    excluded.push(ExcludedBranch {
        branch: "flat, R = 0, k1^2 != 1".into(),
        witness: "L11 keeps the term 4*(1 - k1^2)*x^2".into(),
    });
    excluded.push(ExcludedBranch {
        branch: "flat, R = 0, k3*l3 != 0".into(),
        witness: "L11 keeps the term -4*k3*l3*x^-1".into(),
    });
    excluded.push(ExcludedBranch {
        branch: "flat, R = 0, k3 = 0, l3^2 != 4".into(),
        witness: "L22 = -2*(l3^2 - 4) is a nonzero constant".into(),
    });
    excluded.push(ExcludedBranch {
        branch: "flat, R = 0, l3 = 0, k3 != -2".into(),
        witness: "L22 = 4*k3 + 8 is a nonzero constant".into(),
    });
    // P = 0: l1 = k3 = 0, k1 = l2, k2 = l3; the ratio is frozen on every
    // trajectory. L11 = -4((l2^2-1)x^2 + 2 l2 l3 x + l3^2) forces l2^2 = 1 and
    // l3 = 0, after which L22 = -8(x^2 - 1) still survives.
    excluded.push(ExcludedBranch {
        branch: "flat, P = 0".into(),
        witness: "after l2^2 = 1, l3 = 0 the component L22 = -8*(x^2 - 1) is nonzero".into(),
    });

    // Einstein differences: with l1 != 0 the first difference keeps 8*l1^2*x^4;
    // with l1 = 0 it reads 4(l2^2-1)x^2 + 4(k1+l2)l3 x + 4 k2 l3 + 4 k3 l3 x^-1,
    // forcing l2^2 = 1 (normalize l2 = -1) and a split on l3.
    excluded.push(ExcludedBranch {
        branch: "einstein, l1 != 0".into(),
        witness: "L00 - L11 keeps the term 8*l1^2*x^4".into(),
    });
    excluded.push(ExcludedBranch {
        branch: "einstein, l1 = 0, l2^2 != 1".into(),
        witness: "L00 - L11 keeps the term 4*(l2^2 - 1)*x^2".into(),
    });
    // l3 != 0 forces k1 = 1, k2 = k3 = 0 and lands on the flat cases above.
    // l3 = 0: L00 - L22 = -2(2k1^2+2k1-4)x^2 - 2k2(3k1+2)x - 2(2k1k3+k2^2+4)
    //         - 2 k2 k3 x^-1.
    excluded.push(ExcludedBranch {
        branch: "einstein, l1 = l3 = 0, l2 = -1, k3 = 0".into(),
        witness: "constant term -2*(k2^2 + 4) of L00 - L22 never vanishes".into(),
    });
    excluded.push(ExcludedBranch {
        branch: "einstein, l1 = l3 = 0, l2 = -1, k2 != 0, k3 != 0".into(),
        witness: "L00 - L22 keeps the term -2*k2*k3*x^-1".into(),
    });
    // k2 = 0 leaves 2k1^2+2k1-4 = 0 and k1*k3 = -2: k1 = 1, k3 = -2 is flat
    // case 2; k1 = -2, k3 = 1 is the Einstein family (sign-normalized below).
    let fs = ParamSet::from_ints([-2, 0, 1, 0, -1, 0]).unwrap();
    if is_einstein_family(&fs) {
        einstein.insert(fs.canonical_sign());
    }

    (flat, einstein, excluded)
}

fn falsification_sweep(bound: i64) -> (BTreeSet<ParamSet>, BTreeSet<ParamSet>, u64) {
    let width = 2 * bound + 1;
    let total = (width as u64).pow(6);
    let hits: Vec<(ParamSet, bool)> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let mut rem = idx;
            let mut vals = [0i64; 6];
            for v in vals.iter_mut() {
                *v = (rem % width as u64) as i64 - bound;
                rem /= width as u64;
            }
            if vals.iter().all(|&v| v == 0) {
                return None;
            }
            let params = ParamSet::from_ints(vals).expect("nonzero");
            let sr = symbolic_ricci(&params);
            if sr.is_flat() {
                return Some((params, true));
            }
            if !sr.l00.is_zero()
                && sr.l00 == sr.l11
                && sr.l00 == sr.l22
                && einstein_constancy_poly(&params).is_zero()
            {
                return Some((params, false));
            }
            None
        })
        .collect();
    let mut flat = BTreeSet::new();
    let mut einstein = BTreeSet::new();
    for (params, is_flat) in hits {
        if is_flat {
            flat.insert(params.canonical_sign());
        } else {
            einstein.insert(params.canonical_sign());
        }
    }
    (flat, einstein, total - 1)
}
