//! Sampling harness for the lattice criteria, the normal contraction property
//! and the intermediate inequalities used to derive it.
//!
//! Every check draws witnesses from its own RNG stream and scores each one
//! with [`violation`]; the same function backs [`replay`], so a stored witness
//! reproduces its score bit for bit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::contraction::{compose, decompose, make_phi, PlFunction};
use crate::error::{Error, Result};
use crate::forms::{FormInstance, Integrand};
use crate::lattice::{
    h_alpha, inf, project_band, project_oracle, project_order, sup, twist_check, BandParam,
    ConstraintSet,
};
use crate::measure::{Field, MeasureSpace};
use crate::rng::{stream, StreamRng};
use crate::sampling::{sample_alpha, sample_breakpoints, ContractionSampler, FieldSampler};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Tuples per lattice criterion.
    pub n_samples: usize,
    /// Contraction/field pairs for the normal contraction check.
    pub n_contraction_samples: usize,
    /// Tuples per intermediate inequality.
    pub n_chain_samples: usize,
    /// Tuples per identity.
    pub n_identity_samples: usize,
    /// Pass threshold for inequalities between energies.
    pub ineq_tol: f64,
    /// Pass threshold for pointwise identities.
    pub identity_tol: f64,
    pub fields: FieldSampler,
    pub contractions: ContractionSampler,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_samples: 500,
            n_contraction_samples: 200,
            n_chain_samples: 200,
            n_identity_samples: 1000,
            ineq_tol: 1e-9,
            identity_tol: 1e-12,
            fields: FieldSampler::default(),
            contractions: ContractionSampler::default(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_samples", self.n_samples),
            ("n_contraction_samples", self.n_contraction_samples),
            ("n_chain_samples", self.n_chain_samples),
            ("n_identity_samples", self.n_identity_samples),
        ];
        for (name, n) in counts {
            if n < 1 {
                return Err(Error::BadConfig(format!("{name} must be at least 1")));
            }
        }
        for (name, t) in [("ineq_tol", self.ineq_tol), ("identity_tol", self.identity_tol)] {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::BadConfig(format!("{name} = {t} must be finite and > 0")));
            }
        }
        let a = self.fields.amplitude;
        if !(a.is_finite() && a > 0.0) || self.fields.shapes.is_empty() {
            return Err(Error::BadConfig("field sampler needs amplitude > 0 and a shape".into()));
        }
        let s = self.contractions.spread;
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::BadConfig("contraction spread must be finite and > 0".into()));
        }
        Ok(())
    }
}

/// Inputs of one tested tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Single { f: Vec<f64> },
    Pair { f: Vec<f64>, g: Vec<f64> },
    Band { f: Vec<f64>, g: Vec<f64>, alpha: f64 },
    Contraction { f: Vec<f64>, phi: PlFunction },
    /// Field and breakpoint parameters of an intermediate inequality.
    Cut { f: Vec<f64>, x: Vec<f64> },
    Decomposition { f: Vec<f64>, breakpoints: Vec<f64> },
    /// Form-independent pointwise identity on its own weighted space.
    Planar {
        weights: Vec<f64>,
        f: Vec<f64>,
        g: Vec<f64>,
        alpha: f64,
        t: f64,
        s: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Largest `lhs - rhs` (or residual) over all tested tuples.
    pub worst_violation: f64,
    pub witness: Witness,
    pub n_tested: usize,
    pub seed: u64,
}

pub const CRITERIA: [&str; 5] = ["minmax", "hk", "prcr1", "prcr2", "symmetry"];

pub const CHAIN_CHECKS: [&str; 15] = [
    "cusp/split",
    "cusp/symmetric_band",
    "cusp/conclusion",
    "one_sided/band",
    "one_sided/symmetric_band",
    "one_sided/split",
    "one_sided/conclusion",
    "two_sided/band_split",
    "two_sided/cusp_factor",
    "two_sided/conclusion",
    "two_sided_mirror/reflected_chain",
    "two_sided_mirror/symmetry_link",
    "two_sided_mirror/conclusion",
    "two_sided_mirror/band_split_as_stated",
    "decomposition_chain",
];

pub const IDENTITY_CHECKS: [&str; 6] = [
    "identity/band_reflection",
    "identity/twist",
    "identity/midpoint_order",
    "identity/midpoint_band",
    "identity/oracle_order",
    "identity/oracle_band",
];

pub const IDENTITY_CHECKS_AS_STATED: [&str; 2] =
    ["identity/band_half_sum", "identity/twist_unrestricted"];

fn field(space: &MeasureSpace, v: &[f64]) -> Result<Field> {
    Field::new(space, v.to_vec()).map_err(|e| Error::BadWitness(e.to_string()))
}

fn apply(phi: &PlFunction, f: &Field) -> Field {
    f.map(|y| phi.eval(y))
}

fn need_form<'a>(form: Option<&'a FormInstance>, name: &str) -> Result<&'a FormInstance> {
    form.ok_or_else(|| Error::BadWitness(format!("check {name} needs a form")))
}

fn mismatch(name: &str) -> Error {
    Error::BadWitness(format!("witness does not fit check {name}"))
}

fn alpha(a: f64) -> Result<BandParam> {
    BandParam::new(a).map_err(|e| Error::BadWitness(e.to_string()))
}

/// Functions used by the intermediate inequalities, all built from the
/// contraction algebra.
struct Cuts;

impl Cuts {
    fn pos() -> PlFunction {
        PlFunction::positive_part_shifted(0.0)
    }

    /// `0` below `0`, identity up to `x`, then slope `-1`.
    fn cusp_sigma(x: f64) -> PlFunction {
        compose(&make_phi(&[x]).unwrap(), &Self::pos())
    }

    /// `0` below `x1`, `x1 - y` up to `x2`, then `y + x1 - 2x2`.
    fn one_sided_sigma(x1: f64, x2: f64) -> PlFunction {
        compose(
            &make_phi(&[x2 - x1]).unwrap().negated(),
            &PlFunction::positive_part_shifted(x1),
        )
    }

    /// `0` below `0`, `φ_{x1,x2}` above.
    fn one_sided_psi(x1: f64, x2: f64) -> PlFunction {
        compose(&make_phi(&[x1, x2]).unwrap(), &Self::pos())
    }

    /// `y - 2x1` below `x1`, `-y` up to `x2`, `-x2` above.
    fn two_sided_psi(x1: f64, x2: f64) -> PlFunction {
        PlFunction::through(vec![x1, x2], vec![1.0, -1.0, 0.0], 0.0, 0.0).unwrap()
    }
}

/// `max(lhs_i - rhs_i)` over a chain of inequalities `a_0 <= a_1 <= ...`.
fn chain(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Literal chain for a two-sided cut with `x1 < 0 < x2`: the band split and
/// the single-cusp factor bound.
fn two_sided_links(e: &FormInstance, f: &Field, x1: f64, x2: f64) -> Result<(f64, f64, f64)> {
    let en = |u: &Field| e.energy(u.values());
    let phi = apply(&make_phi(&[x1, x2]).unwrap(), f);
    let psi = Cuts::two_sided_psi(x1, x2);
    let capped = apply(&PlFunction::min_with(x2), f);
    let psi_f = apply(&psi, f);
    let band = en(&phi) + en(&capped) - en(f) - en(&psi_f);
    let factor = compose(&make_phi(&[x1]).unwrap(), &PlFunction::min_with(x2));
    let mismatch = if factor.approx_eq(&psi, 1e-12) { 0.0 } else { f64::INFINITY };
    let cusp = (en(&psi_f) - en(&capped)).max(mismatch);
    let conclusion = en(&phi) - en(f);
    Ok((band, cusp, conclusion))
}

/// Score of one witness for the named check (names without form prefix).
pub fn violation(name: &str, form: Option<&FormInstance>, witness: &Witness) -> Result<f64> {
    if name.starts_with("identity/") {
        return identity_violation(name, witness);
    }
    let e = need_form(form, name)?;
    let sp = e.space();
    let en = |u: &Field| e.energy(u.values());
    let v = match (name, witness) {
        ("minmax", Witness::Pair { f, g }) => {
            let (f, g) = (field(sp, f)?, field(sp, g)?);
            en(&sup(&f, &g)?) + en(&inf(&f, &g)?) - en(&f) - en(&g)
        }
        ("prcr1", Witness::Pair { f, g }) => {
            let (f, g) = (field(sp, f)?, field(sp, g)?);
            let (p, q) = project_order(&f, &g)?;
            en(&p) + en(&q) - en(&f) - en(&g)
        }
        ("hk", Witness::Band { f, g, alpha: a }) => {
            let (f, g, a) = (field(sp, f)?, field(sp, g)?, alpha(*a)?);
            en(&h_alpha(&f, &g, a)?) + en(&h_alpha(&g, &f, a)?) - en(&f) - en(&g)
        }
        ("prcr2", Witness::Band { f, g, alpha: a }) => {
            let (f, g, a) = (field(sp, f)?, field(sp, g)?, alpha(*a)?);
            let (p, q) = project_band(&f, &g, a)?;
            en(&p) + en(&q) - en(&f) - en(&g)
        }
        ("symmetry", Witness::Single { f }) => {
            let f = field(sp, f)?;
            en(&f.neg()) - en(&f)
        }
        ("normal_contraction", Witness::Contraction { f, phi }) => {
            let f = field(sp, f)?;
            en(&apply(phi, &f)) - en(&f)
        }
        ("decomposition_chain", Witness::Decomposition { f, breakpoints }) => {
            let f = field(sp, f)?;
            let phi = make_phi(breakpoints).map_err(|e| Error::BadWitness(e.to_string()))?;
            let d = decompose(&phi).map_err(|e| Error::BadWitness(e.to_string()))?;
            let mut energies = vec![en(&f)];
            let mut cur = f.clone();
            for factor in d.factors.iter().chain(std::iter::once(&d.residual)) {
                cur = apply(factor, &cur);
                energies.push(en(&cur));
            }
            let increase = energies
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::NEG_INFINITY, f64::max);
            let direct = en(&apply(&phi, &f));
            increase.max((direct - energies.last().unwrap()).abs())
        }
        (_, Witness::Cut { f, x }) => {
            let f = field(sp, f)?;
            cut_violation(name, e, &f, x)?
        }
        _ => return Err(mismatch(name)),
    };
    Ok(v)
}

fn cut_violation(name: &str, e: &FormInstance, f: &Field, x: &[f64]) -> Result<f64> {
    let en = |u: &Field| e.energy(u.values());
    let pos = apply(&Cuts::pos(), f);
    let v = match (name, x) {
        ("cusp/split", &[x]) => {
            let phi = apply(&make_phi(&[x]).unwrap(), f);
            let sigma = apply(&Cuts::cusp_sigma(x), f);
            en(&phi) + en(&pos) - en(f) - en(&sigma)
        }
        ("cusp/symmetric_band", &[x]) => {
            let sigma = apply(&Cuts::cusp_sigma(x), f);
            chain(&[
                2.0 * en(&sigma),
                en(&sigma) + en(&sigma.neg()),
                en(&pos) + en(&pos.neg()),
                2.0 * en(&pos),
            ])
        }
        ("cusp/conclusion", &[x]) => en(&apply(&make_phi(&[x]).unwrap(), f)) - en(f),
        ("one_sided/band", &[x1, x2]) => {
            let psi = apply(&Cuts::one_sided_psi(x1, x2), f);
            let shifted = apply(&PlFunction::positive_part_shifted(x1), f);
            let sigma = apply(&Cuts::one_sided_sigma(x1, x2), f);
            en(&psi) + en(&shifted) - en(&pos) - en(&sigma)
        }
        ("one_sided/symmetric_band", &[x1, x2]) => {
            let shifted = apply(&PlFunction::positive_part_shifted(x1), f);
            let sigma = apply(&Cuts::one_sided_sigma(x1, x2), f);
            // 2E(a) >= E(a) + E(-a) >= E(σ) + E(-σ) >= 2E(σ), read right to left
            chain(&[
                2.0 * en(&sigma),
                en(&sigma) + en(&sigma.neg()),
                en(&shifted) + en(&shifted.neg()),
                2.0 * en(&shifted),
            ])
        }
        ("one_sided/split", &[x1, x2]) => {
            let phi = apply(&make_phi(&[x1, x2]).unwrap(), f);
            let psi = apply(&Cuts::one_sided_psi(x1, x2), f);
            en(&phi) + en(&pos) - en(&psi) - en(f)
        }
        ("one_sided/conclusion", &[x1, x2]) => en(&apply(&make_phi(&[x1, x2]).unwrap(), f)) - en(f),
        ("two_sided/band_split", &[x1, x2]) => two_sided_links(e, f, x1, x2)?.0,
        ("two_sided/cusp_factor", &[x1, x2]) => two_sided_links(e, f, x1, x2)?.1,
        ("two_sided/conclusion", &[x1, x2]) => two_sided_links(e, f, x1, x2)?.2,
        ("two_sided_mirror/reflected_chain", &[x1, x2]) => {
            let (band, cusp, _) = two_sided_links(e, &f.neg(), -x2, -x1)?;
            band.max(cusp)
        }
        ("two_sided_mirror/symmetry_link", &[x1, x2]) => {
            // φ_{x1,x2}∘f = -(φ_{-x2,-x1}∘(-f))
            let reflected = apply(&make_phi(&[-x2, -x1]).unwrap(), &f.neg());
            chain(&[
                en(&reflected.neg()),
                en(&reflected),
            ])
            .max(en(&f.neg()) - en(f))
        }
        ("two_sided_mirror/conclusion", &[x1, x2]) => two_sided_links(e, f, x1, x2)?.2,
        ("two_sided_mirror/band_split_as_stated", &[x1, x2]) => two_sided_links(e, f, x1, x2)?.0,
        _ => return Err(mismatch(name)),
    };
    Ok(v)
}

fn identity_violation(name: &str, witness: &Witness) -> Result<f64> {
    let Witness::Planar { weights, f, g, alpha: a, t, s } = witness else {
        return Err(mismatch(name));
    };
    let sp = MeasureSpace::new(weights.clone()).map_err(|e| Error::BadWitness(e.to_string()))?;
    let (f, g, a) = (field(&sp, f)?, field(&sp, g)?, alpha(*a)?);
    let v = match name {
        "identity/band_reflection" => {
            let (p1, _) = project_band(&f, &g, a)?;
            h_alpha(&f, &g, a)?.linf_distance(&p1.scale(2.0).sub(&f)?)?
        }
        "identity/band_half_sum" => {
            let (p1, _) = project_band(&f, &g, a)?;
            let (_, p2) = project_band(&g, &f, a)?;
            h_alpha(&f, &g, a)?.linf_distance(&p1.lerp(&p2, 0.5)?)?
        }
        "identity/twist" | "identity/twist_unrestricted" => {
            let (r1, r2) = twist_check(&f, &g, a, *t, *s)?;
            r1.max(r2)
        }
        "identity/midpoint_order" => {
            let (p, q) = project_order(&f, &g)?;
            let mp = f.lerp(&inf(&f, &g)?, 0.5)?;
            let mq = g.lerp(&sup(&f, &g)?, 0.5)?;
            p.linf_distance(&mp)?.max(q.linf_distance(&mq)?)
        }
        "identity/midpoint_band" => {
            let (p, q) = project_band(&f, &g, a)?;
            let mp = f.lerp(&h_alpha(&f, &g, a)?, 0.5)?;
            let mq = g.lerp(&h_alpha(&g, &f, a)?, 0.5)?;
            p.linf_distance(&mp)?.max(q.linf_distance(&mq)?)
        }
        "identity/oracle_order" => {
            let (p, q) = project_order(&f, &g)?;
            let (op, oq) = project_oracle(ConstraintSet::Order, &f, &g)?;
            p.linf_distance(&op)?.max(q.linf_distance(&oq)?)
        }
        "identity/oracle_band" => {
            let (p, q) = project_band(&f, &g, a)?;
            let (op, oq) = project_oracle(ConstraintSet::Band(a), &f, &g)?;
            p.linf_distance(&op)?.max(q.linf_distance(&oq)?)
        }
        _ => return Err(mismatch(name)),
    };
    Ok(v)
}

/// Re-scores a stored witness.
pub fn replay(form: Option<&FormInstance>, name: &str, witness: &Witness) -> Result<f64> {
    violation(name, form, witness)
}

fn run(
    name: &str,
    form: Option<&FormInstance>,
    seed: u64,
    n: usize,
    tol: f64,
    mut draw: impl FnMut(&mut StreamRng, usize) -> Witness,
) -> CheckResult {
    let mut rng = stream(seed, name);
    let mut worst: Option<(f64, Witness)> = None;
    for k in 0..n {
        let w = draw(&mut rng, k);
        let v = violation(name, form, &w).expect("sampled witness fits its check");
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if worst.as_ref().is_none_or(|(b, _)| v > *b) {
            worst = Some((v, w));
        }
    }
    let (worst_violation, witness) = worst.expect("at least one sample");
    CheckResult {
        name: name.to_string(),
        passed: worst_violation <= tol,
        worst_violation,
        witness,
        n_tested: n,
        seed,
    }
}

/// Minmax, band clamp, both projection criteria and symmetry.
pub fn check_criteria(e: &FormInstance, cfg: &SuiteConfig) -> Vec<CheckResult> {
    let sp = e.space();
    let fs = &cfg.fields;
    let pair = |rng: &mut StreamRng, _| Witness::Pair {
        f: fs.sample(sp, rng).into_values(),
        g: fs.sample(sp, rng).into_values(),
    };
    let band = |rng: &mut StreamRng, _| Witness::Band {
        f: fs.sample(sp, rng).into_values(),
        g: fs.sample(sp, rng).into_values(),
        alpha: sample_alpha(rng),
    };
    let single = |rng: &mut StreamRng, _| Witness::Single {
        f: fs.sample(sp, rng).into_values(),
    };
    let (n, tol, seed) = (cfg.n_samples, cfg.ineq_tol, cfg.seed);
    vec![
        run("minmax", Some(e), seed, n, tol, pair),
        run("hk", Some(e), seed, n, tol, band),
        run("prcr1", Some(e), seed, n, tol, pair),
        run("prcr2", Some(e), seed, n, tol, band),
        run("symmetry", Some(e), seed, n, tol, single),
    ]
}

/// Unit ramp descending from `0` to `-1`.
fn descending_ramp(sp: &MeasureSpace) -> Vec<f64> {
    let denom = (sp.len().max(2) - 1) as f64;
    (0..sp.len()).map(|i| 0.0 - i as f64 / denom).collect()
}

/// `E(φ∘f) - E(f)` over sampled contractions; the first two draws are
/// `id` and `-id` (the latter on a descending ramp).
pub fn check_normal_contraction(e: &FormInstance, cfg: &SuiteConfig) -> CheckResult {
    let sp = e.space();
    run(
        "normal_contraction",
        Some(e),
        cfg.seed,
        cfg.n_contraction_samples.max(2),
        cfg.ineq_tol,
        |rng, k| {
            let (phi, f) = match k {
                0 => (PlFunction::identity(), cfg.fields.sample(sp, rng).into_values()),
                1 => (PlFunction::neg_identity(), descending_ramp(sp)),
                _ => (cfg.contractions.sample(rng), cfg.fields.sample(sp, rng).into_values()),
            };
            Witness::Contraction { f, phi }
        },
    )
}

/// Intermediate inequalities for single cusps, one-sided and two-sided
/// double cusps, and the factor-by-factor decomposition chain.
pub fn run_proof_chain(e: &FormInstance, cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let failed: Vec<String> = check_criteria(e, cfg)
        .into_iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    if !failed.is_empty() {
        return Err(Error::PreconditionFailed(format!(
            "{} fails {}",
            e.label(),
            failed.join(", ")
        )));
    }
    let sp = e.space();
    let a = cfg.fields.amplitude;
    let (n, tol, seed) = (cfg.n_chain_samples, cfg.ineq_tol, cfg.seed);
    let cut = |rng: &mut StreamRng, x: Vec<f64>| Witness::Cut {
        f: cfg.fields.sample(sp, rng).into_values(),
        x,
    };
    let mut out = Vec::new();
    for name in CHAIN_CHECKS {
        let r = match name.split('/').next().unwrap() {
            "cusp" => run(name, Some(e), seed, n, tol, |rng, k| {
                let x = if k % 8 == 0 { 0.0 } else { rng.gen_range(0.0..=a) };
                cut(rng, vec![x])
            }),
            "one_sided" => run(name, Some(e), seed, n, tol, |rng, k| {
                let x1 = if k % 8 == 0 { 0.0 } else { rng.gen_range(0.0..=a) };
                let x2 = x1 + rng.gen_range(1e-3..=a);
                cut(rng, vec![x1, x2])
            }),
            "two_sided" => run(name, Some(e), seed, n, tol, |rng, _| {
                let x1 = -rng.gen_range(1e-3..=a);
                let x2 = -x1 + rng.gen_range(1e-3..=a);
                cut(rng, vec![x1, x2])
            }),
            "two_sided_mirror" => run(name, Some(e), seed, n, tol, |rng, _| {
                let x1 = -rng.gen_range(1e-3..=a);
                let x2 = rng.gen_range(0.0..-x1).max(1e-4 * -x1);
                cut(rng, vec![x1, x2])
            }),
            _ => run(name, Some(e), seed, n, tol, |rng, _| {
                let k = rng.gen_range(0..=cfg.contractions.max_k);
                let s = cfg.contractions.spread;
                Witness::Decomposition {
                    f: cfg.fields.sample(sp, rng).into_values(),
                    breakpoints: sample_breakpoints(rng, k, -s, s),
                }
            }),
        };
        out.push(r);
    }
    Ok(out)
}

fn planar(rng: &mut StreamRng, cfg: &SuiteConfig, k: usize, restrict_twist: bool) -> Witness {
    let n = 8;
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..=2.0)).collect();
    let sp = MeasureSpace::new(weights.clone()).unwrap();
    let f = cfg.fields.sample(&sp, rng).into_values();
    // every tenth tuple has f = g
    let g = if k % 10 == 9 {
        f.clone()
    } else {
        cfg.fields.sample(&sp, rng).into_values()
    };
    let alpha = sample_alpha(rng);
    let t = rng.gen_range(0.0..=1.0);
    let s = if restrict_twist {
        rng.gen_range(0.0..=1.0 - t)
    } else {
        rng.gen_range(0.0..=1.0)
    };
    Witness::Planar { weights, f, g, alpha, t, s }
}

/// Pointwise identities between the clamp and the two projections.
pub fn check_identities(cfg: &SuiteConfig) -> Vec<CheckResult> {
    IDENTITY_CHECKS
        .iter()
        .map(|&name| {
            run(name, None, cfg.seed, cfg.n_identity_samples, cfg.identity_tol, |rng, k| {
                planar(rng, cfg, k, true)
            })
        })
        .collect()
}

/// The clamp as the mean of the two band projections, and the twist
/// relations for all `t, s ∈ [0, 1]`. Neither holds in general.
pub fn check_identities_as_stated(cfg: &SuiteConfig) -> Vec<CheckResult> {
    IDENTITY_CHECKS_AS_STATED
        .iter()
        .map(|&name| {
            run(name, None, cfg.seed, cfg.n_identity_samples, cfg.identity_tol, |rng, k| {
                planar(rng, cfg, k, false)
            })
        })
        .collect()
}

/// The local positive-part energy on an 11-node grid of `[0, 1]`.
pub fn counterexample_form() -> FormInstance {
    FormInstance::local_grid(11, 0.1, Integrand::MaxPositivePart).unwrap()
}

/// `f_i = -i/10`.
pub fn counterexample_field() -> Field {
    let e = counterexample_form();
    Field::from_fn(e.space(), |i| 0.0 - i as f64 / 10.0).unwrap()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub energy_f: f64,
    pub energy_neg_f: f64,
    pub result: CheckResult,
}

/// `E(-f) > E(f)` for the descending ramp: `-id` is not a contraction of the
/// positive-part energy.
pub fn counterexample_demo() -> Counterexample {
    let e = counterexample_form();
    let f = counterexample_field();
    let witness = Witness::Contraction {
        f: f.values().to_vec(),
        phi: PlFunction::neg_identity(),
    };
    let worst = violation("normal_contraction", Some(&e), &witness).unwrap();
    Counterexample {
        energy_f: e.energy(f.values()),
        energy_neg_f: e.energy(f.neg().values()),
        result: CheckResult {
            name: "normal_contraction".into(),
            passed: worst <= SuiteConfig::default().ineq_tol,
            worst_violation: worst,
            witness,
            n_tested: 1,
            seed: 0,
        },
    }
}
