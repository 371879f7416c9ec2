//! Piecewise-linear 1-Lipschitz functions on the real line.
//!
//! A [`PlFunction`] is stored canonically: strictly increasing breakpoints,
//! one slope per interval (adjacent equal slopes merged), and the value at
//! the origin. The alternating family `F_k` consists of the functions with
//! `k` breakpoints whose slopes run `+1, -1, +1, ...` and which vanish at 0;
//! [`make_phi`] builds them and [`decompose`] factors any member of `F_k`
//! into `⌊k/2⌋` members of `F_2` followed by a member of `F_0 ∪ F_1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slopes within this distance of ±1 are clamped onto the unit interval.
const SLOPE_TOL: f64 = 1e-12;

/// Tolerance on the value at the origin when testing `φ(0) = 0`.
pub const ANCHOR_TOL: f64 = 1e-12;

/// Relative separation below which candidate breakpoints are identified.
const KNOT_MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PlRepr", into = "PlRepr")]
pub struct PlFunction {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    anchor: f64,
    knot_values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PlRepr {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    anchor: f64,
}

impl TryFrom<PlRepr> for PlFunction {
    type Error = Error;

    fn try_from(r: PlRepr) -> Result<Self> {
        PlFunction::new(r.breakpoints, r.slopes, r.anchor)
    }
}

impl From<PlFunction> for PlRepr {
    fn from(f: PlFunction) -> Self {
        PlRepr {
            breakpoints: f.breakpoints,
            slopes: f.slopes,
            anchor: f.anchor,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ContractionClass {
    /// Alternating unit slopes starting at `+1`, `k` breakpoints, zero at 0.
    F(usize),
    /// Unit slopes, at most two breakpoints, zero at 0.
    G,
    GeneralNormal,
    NotNormal,
}

fn check_increasing(breakpoints: &[f64]) -> Result<()> {
    if let Some(index) = breakpoints.iter().position(|b| !b.is_finite()) {
        return Err(Error::BadPiecewise(format!(
            "breakpoint {index} is not finite"
        )));
    }
    match breakpoints.windows(2).position(|w| w[0] >= w[1]) {
        Some(i) => Err(Error::NotIncreasing { index: i + 1 }),
        None => Ok(()),
    }
}

impl PlFunction {
    /// Builds the canonical function with the given breakpoints, interval
    /// slopes (`breakpoints.len() + 1` of them, each in `[-1, 1]`) and value
    /// `anchor` at the origin.
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, anchor: f64) -> Result<Self> {
        check_increasing(&breakpoints)?;
        if slopes.len() != breakpoints.len() + 1 {
            return Err(Error::BadPiecewise(format!(
                "{} breakpoints need {} slopes, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                slopes.len()
            )));
        }
        if !anchor.is_finite() {
            return Err(Error::BadPiecewise("value at 0 is not finite".into()));
        }
        let mut clamped = Vec::with_capacity(slopes.len());
        for (i, &s) in slopes.iter().enumerate() {
            if !s.is_finite() || s.abs() > 1.0 + SLOPE_TOL {
                return Err(Error::BadPiecewise(format!(
                    "slope {s} on interval {i} is outside [-1, 1]"
                )));
            }
            clamped.push(s.clamp(-1.0, 1.0));
        }

        // merge equal neighbours
        let mut bps = Vec::with_capacity(breakpoints.len());
        let mut merged = vec![clamped[0]];
        for (b, &s) in breakpoints.iter().zip(&clamped[1..]) {
            if s != *merged.last().unwrap() {
                bps.push(*b);
                merged.push(s);
            }
        }

        let mut f = PlFunction {
            breakpoints: bps,
            slopes: merged,
            anchor,
            knot_values: Vec::new(),
        };
        f.knot_values = f.compute_knot_values();
        Ok(f)
    }

    /// Same as [`PlFunction::new`] but pinned by its value at an arbitrary point.
    pub fn through(breakpoints: Vec<f64>, slopes: Vec<f64>, x: f64, value: f64) -> Result<Self> {
        let probe = PlFunction::new(breakpoints, slopes, 0.0)?;
        let anchor = value - probe.eval(x);
        PlFunction::new(probe.breakpoints, probe.slopes, anchor)
    }

    pub fn identity() -> Self {
        PlFunction::new(vec![], vec![1.0], 0.0).unwrap()
    }

    pub fn neg_identity() -> Self {
        PlFunction::new(vec![], vec![-1.0], 0.0).unwrap()
    }

    /// `x ↦ slope * x + intercept`.
    pub fn affine(slope: f64, intercept: f64) -> Result<Self> {
        PlFunction::new(vec![], vec![slope], intercept)
    }

    /// `x ↦ (x - shift) ∨ 0`.
    pub fn positive_part_shifted(shift: f64) -> Self {
        PlFunction::through(vec![shift], vec![0.0, 1.0], shift, 0.0).unwrap()
    }

    /// `x ↦ x ∧ cap`.
    pub fn min_with(cap: f64) -> Self {
        PlFunction::through(vec![cap], vec![1.0, 0.0], cap, cap).unwrap()
    }

    fn compute_knot_values(&self) -> Vec<f64> {
        let b = &self.breakpoints;
        let n = b.len();
        let mut v = vec![0.0; n];
        // breakpoints[..idx] < 0 <= breakpoints[idx..]; slope idx covers 0
        let idx = b.partition_point(|&x| x < 0.0);
        if idx < n {
            v[idx] = self.anchor + self.slopes[idx] * b[idx];
            for k in idx + 1..n {
                v[k] = v[k - 1] + self.slopes[k] * (b[k] - b[k - 1]);
            }
        }
        if idx > 0 {
            v[idx - 1] = self.anchor + self.slopes[idx] * b[idx - 1];
            for k in (0..idx - 1).rev() {
                v[k] = v[k + 1] - self.slopes[k + 1] * (b[k + 1] - b[k]);
            }
        }
        v
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Value at the origin.
    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn eval(&self, x: f64) -> f64 {
        let b = &self.breakpoints;
        let k = b.partition_point(|&p| p <= x);
        // interval whose closure contains the origin
        if (k == 0 || b[k - 1] <= 0.0) && (k == b.len() || b[k] >= 0.0) {
            return self.anchor + self.slopes[k] * x;
        }
        if k == 0 {
            self.knot_values[0] + self.slopes[0] * (x - b[0])
        } else {
            self.knot_values[k - 1] + self.slopes[k] * (x - b[k - 1])
        }
    }

    /// Slope of the interval containing `x` (right derivative at breakpoints).
    pub fn slope_at(&self, x: f64) -> f64 {
        self.slopes[self.breakpoints.partition_point(|&p| p <= x)]
    }

    /// `x ↦ -φ(x)`.
    pub fn negated(&self) -> PlFunction {
        PlFunction::new(
            self.breakpoints.clone(),
            self.slopes.iter().map(|s| -s).collect(),
            -self.anchor,
        )
        .unwrap()
    }

    pub fn max_abs_slope(&self) -> f64 {
        self.slopes.iter().fold(0.0, |a, s| a.max(s.abs()))
    }

    /// Componentwise comparison with tolerance on breakpoints and anchor.
    pub fn approx_eq(&self, other: &PlFunction, tol: f64) -> bool {
        self.slopes == other.slopes
            && (self.anchor - other.anchor).abs() <= tol
            && self
                .breakpoints
                .iter()
                .zip(&other.breakpoints)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// The member of `F_k` with the given breakpoints: slope `(-1)^i` on the
/// `i`-th interval and value 0 at the origin.
pub fn make_phi(breakpoints: &[f64]) -> Result<PlFunction> {
    check_increasing(breakpoints)?;
    let slopes = (0..=breakpoints.len())
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    PlFunction::new(breakpoints.to_vec(), slopes, 0.0)
}

/// `outer ∘ inner` in canonical form.
pub fn compose(outer: &PlFunction, inner: &PlFunction) -> PlFunction {
    let ib = inner.breakpoints();
    let mut candidates: Vec<f64> = ib.to_vec();
    for (j, &s) in inner.slopes().iter().enumerate() {
        if s == 0.0 {
            // constant piece: maps its interval to a single value
            continue;
        }
        let lo = if j == 0 { f64::NEG_INFINITY } else { ib[j - 1] };
        let hi = if j == ib.len() { f64::INFINITY } else { ib[j] };
        let r = if lo.is_finite() {
            lo
        } else if hi.is_finite() {
            hi
        } else {
            0.0
        };
        let at_r = inner.eval(r);
        for &c in outer.breakpoints() {
            let x = r + (c - at_r) / s;
            if x > lo && x < hi {
                candidates.push(x);
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    let mut knots: Vec<f64> = Vec::with_capacity(candidates.len());
    for c in candidates {
        match knots.last() {
            Some(&last) if c - last <= KNOT_MERGE_TOL * c.abs().max(1.0) => {}
            _ => knots.push(c),
        }
    }

    let probe = |x: f64| outer.slope_at(inner.eval(x)) * inner.slope_at(x);
    let mut slopes = Vec::with_capacity(knots.len() + 1);
    match (knots.first(), knots.last()) {
        (Some(&first), Some(&last)) => {
            slopes.push(probe(first - 1.0));
            for w in knots.windows(2) {
                slopes.push(probe(0.5 * (w[0] + w[1])));
            }
            slopes.push(probe(last + 1.0));
        }
        _ => slopes.push(probe(0.0)),
    }
    let anchor = outer.eval(inner.eval(0.0));
    PlFunction::new(knots, slopes, anchor).expect("composition of 1-Lipschitz functions")
}

/// Composes a chain given in application order: `fs[0]` is applied first.
pub fn compose_chain<'a>(fs: impl IntoIterator<Item = &'a PlFunction>) -> PlFunction {
    fs.into_iter()
        .fold(PlFunction::identity(), |acc, f| compose(f, &acc))
}

pub fn is_normal_contraction(phi: &PlFunction) -> bool {
    phi.max_abs_slope() <= 1.0 && phi.anchor().abs() <= ANCHOR_TOL
}

pub fn classify(phi: &PlFunction) -> ContractionClass {
    let normal = is_normal_contraction(phi);
    let unit = phi.slopes().iter().all(|s| s.abs() == 1.0);
    if normal && unit && phi.slopes()[0] == 1.0 {
        // canonical form forces the signs to alternate
        ContractionClass::F(phi.breakpoints().len())
    } else if normal && unit && phi.breakpoints().len() <= 2 {
        ContractionClass::G
    } else if normal {
        ContractionClass::GeneralNormal
    } else {
        ContractionClass::NotNormal
    }
}

/// Factorisation of a member of `F_k` into `F_2` pieces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    /// `F_2` factors in application order: `factors[0]` acts first.
    pub factors: Vec<PlFunction>,
    /// Member of `F_0 ∪ F_1`, applied last.
    pub residual: PlFunction,
}

impl Decomposition {
    pub fn recompose(&self) -> PlFunction {
        compose(&self.residual, &compose_chain(&self.factors))
    }

    pub fn apply(&self, x: f64) -> f64 {
        let y = self.factors.iter().fold(x, |y, f| f.eval(y));
        self.residual.eval(y)
    }
}

/// Splits `φ ∈ F_k` as `residual ∘ factors[m-1] ∘ ... ∘ factors[0]`.
///
/// Each round removes the closest pair of adjacent breakpoints (smallest
/// index among ties), emits it as the next inner `F_2` factor, and moves the
/// remaining breakpoints to where that factor sends them.
pub fn decompose(phi: &PlFunction) -> Result<Decomposition> {
    let ContractionClass::F(_) = classify(phi) else {
        return Err(Error::NotAlternating);
    };
    let mut xs = phi.breakpoints().to_vec();
    let mut factors = Vec::with_capacity(xs.len() / 2);
    while xs.len() >= 3 {
        let i = (0..xs.len() - 1)
            .min_by(|&a, &b| (xs[a + 1] - xs[a]).total_cmp(&(xs[b + 1] - xs[b])))
            .unwrap();
        let (a, b) = (xs[i], xs[i + 1]);
        let gap = b - a;
        let (lower_shift, upper_shift) = if b <= 0.0 {
            (2.0 * gap, 0.0)
        } else if a >= 0.0 {
            (0.0, -2.0 * gap)
        } else {
            (-2.0 * a, -2.0 * b)
        };
        let next: Vec<f64> = xs[..i]
            .iter()
            .map(|x| x + lower_shift)
            .chain(xs[i + 2..].iter().map(|x| x + upper_shift))
            .collect();
        factors.push(make_phi(&[a, b])?);
        xs = next;
    }
    let residual = if xs.len() == 2 {
        factors.push(make_phi(&xs)?);
        PlFunction::identity()
    } else {
        make_phi(&xs)?
    };
    Ok(Decomposition { factors, residual })
}

/// Lower 1-Lipschitz envelope `x ↦ min_y value(y) + |x - y|` of the samples
/// lying in `[-radius, radius]`. Outside the outermost samples the result has
/// slope `-1` on the left and `+1` on the right.
pub fn envelope(samples: &[(f64, f64)], radius: f64) -> Result<PlFunction> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InconsistentSamples(format!(
            "radius {radius} must be positive and finite"
        )));
    }
    if let Some((y, v)) = samples
        .iter()
        .find(|(y, v)| !(y.is_finite() && v.is_finite()))
    {
        return Err(Error::InconsistentSamples(format!(
            "non-finite sample ({y}, {v})"
        )));
    }
    let mut pts: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(y, _)| y.abs() <= radius)
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    match pts.iter().find(|(y, _)| *y == 0.0) {
        Some(&(_, v)) if v.abs() <= ANCHOR_TOL => {}
        Some(&(_, v)) => {
            return Err(Error::InconsistentSamples(format!(
                "sample at 0 has value {v}, expected 0"
            )))
        }
        None => return Err(Error::InconsistentSamples("no sample at 0".into())),
    }
    for w in pts.windows(2) {
        let ((y0, v0), (y1, v1)) = (w[0], w[1]);
        if y0 == y1 {
            return Err(Error::InconsistentSamples(format!("duplicate sample at {y0}")));
        }
        let slack = 1e-12 * (1.0 + v0.abs().max(v1.abs()) + y1.abs().max(y0.abs()));
        if (v1 - v0).abs() > (y1 - y0) + slack {
            return Err(Error::InconsistentSamples(format!(
                "samples at {y0} and {y1} violate the 1-Lipschitz bound"
            )));
        }
    }

    let mut breakpoints = Vec::with_capacity(2 * pts.len());
    let mut slopes = vec![-1.0];
    for (j, &(y, v)) in pts.iter().enumerate() {
        breakpoints.push(y);
        let Some(&(y1, v1)) = pts.get(j + 1) else {
            slopes.push(1.0);
            break;
        };
        // the tent between consecutive samples peaks here
        let peak = 0.5 * (v1 - v + y + y1);
        if peak <= y {
            slopes.push(-1.0);
        } else if peak >= y1 {
            slopes.push(1.0);
        } else {
            slopes.push(1.0);
            breakpoints.push(peak);
            slopes.push(-1.0);
        }
    }
    let anchor = pts
        .iter()
        .map(|(y, v)| v + y.abs())
        .fold(f64::INFINITY, f64::min);
    PlFunction::new(breakpoints, slopes, anchor)
}
