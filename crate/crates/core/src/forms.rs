//! Convex energies on finite spaces.
//!
//! Every shipped kind is a sum over oriented edges `e = (head, tail)` of a
//! convex scalar penalty of the difference `u[head] - u[tail]`. The penalty
//! catalogue ([`Penalty`]) carries values, conjugates and scalar proximal maps,
//! which is all the flow module needs.

use std::fmt;
use std::ops::Add;

use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measure::{Field, MeasureSpace};
use crate::rng::stream;
use crate::sampling::FieldSampler;

/// Value in `[0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct ExtendedEnergy(f64);

impl ExtendedEnergy {
    pub const ZERO: Self = Self(0.0);
    pub const INFINITY: Self = Self(f64::INFINITY);

    /// Accepts finite nonnegative reals and `+∞`.
    pub fn new(value: f64) -> Option<Self> {
        (value >= 0.0).then_some(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl Add for ExtendedEnergy {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl fmt::Display for ExtendedEnergy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            write!(f, "{}", self.0)
        } else {
            f.write_str("inf")
        }
    }
}

impl Serialize for ExtendedEnergy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str("inf")
        }
    }
}

/// Even convex kernels for nonlocal forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Psi {
    /// `z²`
    Square,
    /// `z⁴`
    Quartic,
    /// `|z|`
    Abs,
}

impl Psi {
    pub fn eval(self, z: f64) -> f64 {
        match self {
            Psi::Square => z * z,
            Psi::Quartic => (z * z) * (z * z),
            Psi::Abs => z.abs(),
        }
    }
}

/// Integrands `f(x, v)` for local forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Integrand {
    /// `|v|^p / p`, `p >= 1`.
    AbsPower { p: f64 },
    /// `v ∨ 0`.
    MaxPositivePart,
    /// `a_i |v|` with one positive weight per grid edge.
    FinslerWeighted { a: Vec<f64> },
}

/// Weighted edge `(i, j, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge(pub usize, pub usize, pub f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FormKind {
    /// `½ Σ_{edges} w (u_i - u_j)²` over unordered edges.
    GraphQuadratic { edges: Vec<Edge> },
    /// `Σ_{(x,y)} w ψ(u_x - u_y)` over ordered pairs.
    NonlocalPsi { kernel: Vec<Edge>, psi: Psi },
    /// `Σ_i h f((u_{i+1} - u_i) / h)` over interior forward differences.
    #[serde(rename = "local_grid_1d")]
    LocalGrid1D { h: f64, integrand: Integrand },
}

impl FormKind {
    /// Short identifier, e.g. `nonlocal_psi[quartic]`.
    pub fn label(&self) -> String {
        match self {
            FormKind::GraphQuadratic { .. } => "graph_quadratic".into(),
            FormKind::NonlocalPsi { psi, .. } => {
                let p = match psi {
                    Psi::Square => "square",
                    Psi::Quartic => "quartic",
                    Psi::Abs => "abs",
                };
                format!("nonlocal_psi[{p}]")
            }
            FormKind::LocalGrid1D { integrand, .. } => match integrand {
                Integrand::AbsPower { p } => format!("local_grid_1d[abs_power_{p}]"),
                Integrand::MaxPositivePart => "local_grid_1d[max_positive_part]".into(),
                Integrand::FinslerWeighted { .. } => "local_grid_1d[finsler_weighted]".into(),
            },
        }
    }
}

/// Convex scalar penalty `g` of an edge difference. All coefficients are
/// positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Penalty {
    /// `½ c δ²`
    Quadratic(f64),
    /// `c δ⁴`
    Quartic(f64),
    /// `c |δ|`
    Abs(f64),
    /// `c (δ ∨ 0)`
    PositivePart(f64),
    /// `h |δ/h|^p / p` with `p > 1`.
    Power { h: f64, p: f64 },
}

impl Penalty {
    pub fn value(self, d: f64) -> f64 {
        match self {
            Penalty::Quadratic(c) => 0.5 * c * d * d,
            Penalty::Quartic(c) => c * (d * d) * (d * d),
            Penalty::Abs(c) => c * d.abs(),
            Penalty::PositivePart(c) => c * d.max(0.0),
            Penalty::Power { h, p } => h * (d / h).abs().powf(p) / p,
        }
    }

    /// Fenchel conjugate; `+∞` outside the domain.
    pub fn conjugate(self, q: f64) -> f64 {
        match self {
            Penalty::Quadratic(c) => q * q / (2.0 * c),
            Penalty::Quartic(c) => 0.75 * q.abs() * (q.abs() / (4.0 * c)).cbrt(),
            Penalty::Abs(c) => {
                if q.abs() <= c {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Penalty::PositivePart(c) => {
                if (0.0..=c).contains(&q) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Penalty::Power { h, p } => {
                let pc = p / (p - 1.0);
                h * q.abs().powf(pc) / pc
            }
        }
    }

    /// Nearest point of the conjugate's domain.
    pub fn clamp_dual(self, q: f64) -> f64 {
        match self {
            Penalty::Abs(c) => q.clamp(-c, c),
            Penalty::PositivePart(c) => q.clamp(0.0, c),
            _ => q,
        }
    }

    /// `g(δ) + g*(q) - qδ`, zero exactly when `q ∈ ∂g(δ)`.
    pub fn fenchel_young_gap(self, d: f64, q: f64) -> f64 {
        self.value(d) + self.conjugate(q) - q * d
    }

    /// Coefficient `c` when `g(δ) = ½ c δ²`.
    pub fn quadratic_coefficient(self) -> Option<f64> {
        match self {
            Penalty::Quadratic(c) => Some(c),
            Penalty::Power { h, p } if p == 2.0 => Some(1.0 / h),
            _ => None,
        }
    }

    /// `argmin_δ g(δ) + (δ - z)² / (2λ)`.
    pub fn prox(self, z: f64, lambda: f64) -> f64 {
        match self {
            Penalty::Quadratic(c) => z / (1.0 + lambda * c),
            Penalty::Abs(c) => z.signum() * (z.abs() - lambda * c).max(0.0),
            Penalty::PositivePart(c) => {
                if z > lambda * c {
                    z - lambda * c
                } else if z < 0.0 {
                    z
                } else {
                    0.0
                }
            }
            Penalty::Quartic(c) => {
                // 4cλ δ³ + δ = |z|
                let k = 4.0 * c * lambda;
                let a = z.abs();
                let start = a.min((a / k).cbrt());
                z.signum() * newton_from_above(start, |d| k * d * d * d + d - a, |d| 3.0 * k * d * d + 1.0)
            }
            Penalty::Power { h, p } => {
                // δ + λ (δ/h)^{p-1} = |z|
                let a = z.abs();
                let f = |d: f64| d + lambda * (d / h).powf(p - 1.0) - a;
                let mag = if p == 2.0 {
                    a / (1.0 + lambda / h)
                } else if p > 2.0 {
                    let start = a.min(h * (a / lambda).powf(1.0 / (p - 1.0)));
                    newton_from_above(start, f, |d| {
                        1.0 + lambda * (p - 1.0) * (d / h).powf(p - 2.0) / h
                    })
                } else {
                    bisect_increasing(0.0, a, f)
                };
                z.signum() * mag
            }
        }
    }
}

/// Newton iteration for a convex increasing `f` started at or right of its
/// root; stops once the iterates stop decreasing.
fn newton_from_above(mut x: f64, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let fx = f(x);
        if fx <= 0.0 {
            break;
        }
        let next = x - fx / df(x);
        if !(next < x) {
            break;
        }
        x = next.max(0.0);
    }
    x
}

fn bisect_increasing(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..2100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if f(hi).abs() < f(lo).abs() {
        hi
    } else {
        lo
    }
}

/// Penalty on `u[head] - u[tail]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeTerm {
    pub head: usize,
    pub tail: usize,
    pub penalty: Penalty,
}

/// A validated energy on a fixed measure space.
#[derive(Clone, Debug)]
pub struct FormInstance {
    kind: FormKind,
    space: MeasureSpace,
    terms: Vec<EdgeTerm>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadSpec(msg.into())
}

fn check_edges(edges: &[Edge], n: usize, what: &str) -> Result<()> {
    for (k, &Edge(i, j, w)) in edges.iter().enumerate() {
        if i >= n || j >= n {
            return Err(bad(format!("{what} {k} references a node outside 0..{n}")));
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(bad(format!("{what} {k} has weight {w}, expected a finite w >= 0")));
        }
    }
    Ok(())
}

/// Validates a descriptor against a space.
pub fn make_form(kind: FormKind, space: MeasureSpace) -> Result<FormInstance> {
    let n = space.len();
    let mut terms = Vec::new();
    match &kind {
        FormKind::GraphQuadratic { edges } => {
            check_edges(edges, n, "edge")?;
            for &Edge(i, j, w) in edges {
                if w > 0.0 && i != j {
                    terms.push(EdgeTerm { head: i, tail: j, penalty: Penalty::Quadratic(w) });
                }
            }
        }
        FormKind::NonlocalPsi { kernel, psi } => {
            check_edges(kernel, n, "kernel pair")?;
            for &Edge(i, j, w) in kernel {
                if w > 0.0 && i != j {
                    let penalty = match psi {
                        Psi::Square => Penalty::Quadratic(2.0 * w),
                        Psi::Quartic => Penalty::Quartic(w),
                        Psi::Abs => Penalty::Abs(w),
                    };
                    terms.push(EdgeTerm { head: i, tail: j, penalty });
                }
            }
        }
        FormKind::LocalGrid1D { h, integrand } => {
            let h = *h;
            if !(h.is_finite() && h > 0.0) {
                return Err(bad(format!("grid spacing h = {h} must be finite and > 0")));
            }
            let edges = n - 1;
            let penalties: Vec<Penalty> = match integrand {
                Integrand::AbsPower { p } => {
                    let p = *p;
                    if !(p.is_finite() && p >= 1.0) {
                        return Err(bad(format!("abs_power exponent p = {p} must be finite and >= 1")));
                    }
                    let g = if p == 1.0 { Penalty::Abs(1.0) } else { Penalty::Power { h, p } };
                    vec![g; edges]
                }
                Integrand::MaxPositivePart => vec![Penalty::PositivePart(1.0); edges],
                Integrand::FinslerWeighted { a } => {
                    if a.len() != edges {
                        return Err(bad(format!(
                            "finsler_weighted needs {edges} edge weights, got {}",
                            a.len()
                        )));
                    }
                    if let Some(x) = a.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                        return Err(bad(format!("finsler_weighted weight {x} must be finite and > 0")));
                    }
                    a.iter().map(|&x| Penalty::Abs(x)).collect()
                }
            };
            for (i, penalty) in penalties.into_iter().enumerate() {
                terms.push(EdgeTerm { head: i + 1, tail: i, penalty });
            }
        }
    }
    Ok(FormInstance { kind, space, terms })
}

impl FormInstance {
    /// Graph quadratic form on `n` unit-weight nodes.
    pub fn graph_quadratic(n: usize, edges: Vec<Edge>) -> Result<Self> {
        make_form(FormKind::GraphQuadratic { edges }, MeasureSpace::uniform(n)?)
    }

    /// Nonlocal form on `n` nodes of `[0, 1]` with the uniform kernel
    /// `w(x, y) = 1/n²` on ordered pairs and point weights `1/n`.
    pub fn nonlocal_uniform(n: usize, psi: Psi) -> Result<Self> {
        let kernel = uniform_kernel(n);
        let space = MeasureSpace::new(vec![1.0 / n as f64; n])?;
        make_form(FormKind::NonlocalPsi { kernel, psi }, space)
    }

    /// Local form on an `n`-node grid of spacing `h`, point weights `h`.
    pub fn local_grid(n: usize, h: f64, integrand: Integrand) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(bad(format!("grid spacing h = {h} must be finite and > 0")));
        }
        make_form(FormKind::LocalGrid1D { h, integrand }, MeasureSpace::new(vec![h; n])?)
    }

    pub fn kind(&self) -> &FormKind {
        &self.kind
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn terms(&self) -> &[EdgeTerm] {
        &self.terms
    }

    pub fn label(&self) -> String {
        self.kind.label()
    }

    /// True when every term is quadratic, so the energy is `½⟨Lu, u⟩`.
    pub fn is_quadratic(&self) -> bool {
        self.terms.iter().all(|t| t.penalty.quadratic_coefficient().is_some())
    }

    /// Energy as a plain float, for fields already known to match the space.
    pub fn energy(&self, u: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.penalty.value(u[t.head] - u[t.tail]))
            .sum()
    }

    pub fn eval(&self, u: &Field) -> Result<ExtendedEnergy> {
        eval_form(self, u)
    }
}

pub fn eval_form(e: &FormInstance, u: &Field) -> Result<ExtendedEnergy> {
    if !u.space().same_as(&e.space) {
        return Err(Error::SpaceMismatch);
    }
    Ok(ExtendedEnergy(e.energy(u.values())))
}

#[derive(Clone, Debug)]
pub struct SymmetryReport {
    pub symmetric: bool,
    /// Largest `|E(-f) - E(f)|` seen.
    pub worst_asymmetry: f64,
    /// Field attaining it.
    pub witness: Field,
}

/// Samples `n` fields and compares `E(-f)` with `E(f)`.
pub fn is_symmetric_sampled(e: &FormInstance, n: usize, seed: u64) -> SymmetryReport {
    let sampler = FieldSampler::default();
    let mut rng = stream(seed, "symmetry");
    let mut worst = (f64::NEG_INFINITY, Field::zeros(&e.space));
    for _ in 0..n.max(1) {
        let f = sampler.sample(&e.space, &mut rng);
        let gap = (e.energy(f.neg().values()) - e.energy(f.values())).abs();
        if gap > worst.0 {
            worst = (gap, f);
        }
    }
    SymmetryReport {
        symmetric: worst.0 <= 1e-9,
        worst_asymmetry: worst.0,
        witness: worst.1,
    }
}

/// `w(x, y) = 1/n²` on every ordered pair of distinct points.
pub fn uniform_kernel(n: usize) -> Vec<Edge> {
    let w = 1.0 / (n * n) as f64;
    (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| Edge(i, j, w)))
        .collect()
}

/// Erdős–Rényi graph with edge probability `p` and weights uniform in
/// `[0.1, 2]`, plus a path through all nodes so the graph is connected.
pub fn random_graph_edges<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<Edge> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || rng.gen_bool(p) {
                edges.push(Edge(i, j, rng.gen_range(0.1..=2.0)));
            }
        }
    }
    edges
}

/// The shipped instances: a random 20-node graph, nonlocal forms with
/// `ψ ∈ {z², z⁴, |z|}` on 10 nodes, and 11-node local grids with `h = 0.1`.
pub fn standard_catalog(seed: u64) -> Vec<FormInstance> {
    let mut rng = stream(seed, "catalog");
    let graph = FormInstance::graph_quadratic(20, random_graph_edges(20, 0.2, &mut rng)).unwrap();
    let finsler: Vec<f64> = (0..10).map(|_| rng.gen_range(0.5..=2.0)).collect();
    let mut out = vec![graph];
    for psi in [Psi::Square, Psi::Quartic, Psi::Abs] {
        out.push(FormInstance::nonlocal_uniform(10, psi).unwrap());
    }
    for integrand in [
        Integrand::AbsPower { p: 1.0 },
        Integrand::AbsPower { p: 2.0 },
        Integrand::AbsPower { p: 4.0 },
        Integrand::FinslerWeighted { a: finsler },
        Integrand::MaxPositivePart,
    ] {
        out.push(FormInstance::local_grid(11, 0.1, integrand).unwrap());
    }
    out
}
