use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use nbdf_core::forms::{random_graph_edges, uniform_kernel};
use nbdf_core::rng::stream;
use nbdf_core::{make_form, Edge, Error, FlowConfig, FormInstance, FormKind, Integrand, MeasureSpace, Psi, SuiteConfig};
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomEdges {
    /// Probability of each extra edge beyond the connecting path.
    pub probability: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormDescriptor {
    GraphQuadratic {
        nodes: usize,
        label: Option<String>,
        weights: Option<Vec<f64>>,
        edges: Option<Vec<Edge>>,
        random_edges: Option<RandomEdges>,
    },
    NonlocalPsi {
        nodes: usize,
        label: Option<String>,
        weights: Option<Vec<f64>>,
        /// Defaults to `1/n²` on every ordered pair.
        kernel: Option<Vec<Edge>>,
        psi: Psi,
    },
    #[serde(rename = "local_grid_1d")]
    LocalGrid1D {
        nodes: usize,
        label: Option<String>,
        /// Defaults to `h` at every node.
        weights: Option<Vec<f64>>,
        h: f64,
        integrand: Integrand,
    },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub report: Option<PathBuf>,
    pub trace: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowSection {
    pub tau: f64,
    pub n_steps: usize,
    pub inner_tol: f64,
    pub max_inner_iters: usize,
    /// Index into `forms`.
    pub form: usize,
    /// Initial datum; a seeded random field when absent.
    pub initial: Option<Vec<f64>>,
}

impl Default for FlowSection {
    fn default() -> Self {
        let c = FlowConfig::default();
        Self {
            tau: c.tau,
            n_steps: c.n_steps,
            inner_tol: c.inner_tol,
            max_inner_iters: c.max_inner_iters,
            form: 0,
            initial: None,
        }
    }
}

impl FlowSection {
    pub fn config(&self, seed: u64) -> FlowConfig {
        FlowConfig {
            tau: self.tau,
            n_steps: self.n_steps,
            inner_tol: self.inner_tol,
            max_inner_iters: self.max_inner_iters,
            seed,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub forms: Vec<FormDescriptor>,
    #[serde(default)]
    pub suite: Option<SuiteConfig>,
    pub flow: Option<FlowSection>,
    #[serde(default)]
    pub output: Outputs,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).context("malformed config")?;
        if cfg.forms.is_empty() {
            bail!("config must list at least one form");
        }
        Ok(cfg)
    }

    /// Suite settings with the run seed applied.
    pub fn suite(&self) -> Result<SuiteConfig> {
        let mut s = self.suite.clone().unwrap_or_default();
        s.seed = self.seed;
        s.validate()?;
        Ok(s)
    }

    /// Built forms paired with unique labels.
    pub fn build_forms(&self) -> Result<Vec<(String, FormInstance)>> {
        let mut out: Vec<(String, FormInstance)> = Vec::new();
        for (k, d) in self.forms.iter().enumerate() {
            let form = d.build(self.seed, k).with_context(|| format!("form {k}"))?;
            let mut label = d.label().map(str::to_owned).unwrap_or_else(|| form.label());
            if out.iter().any(|(l, _)| *l == label) {
                label = format!("{label}#{k}");
            }
            out.push((label, form));
        }
        Ok(out)
    }
}

fn space(nodes: usize, weights: Option<&Vec<f64>>, default: f64) -> Result<MeasureSpace> {
    let w = match weights {
        Some(w) if w.len() != nodes => bail!("weights has {} entries for {nodes} nodes", w.len()),
        Some(w) => w.clone(),
        None => vec![default; nodes],
    };
    Ok(MeasureSpace::new(w)?)
}

impl FormDescriptor {
    pub fn label(&self) -> Option<&str> {
        match self {
            FormDescriptor::GraphQuadratic { label, .. }
            | FormDescriptor::NonlocalPsi { label, .. }
            | FormDescriptor::LocalGrid1D { label, .. } => label.as_deref(),
        }
    }

    pub fn build(&self, seed: u64, index: usize) -> Result<FormInstance> {
        let form = match self {
            FormDescriptor::GraphQuadratic { nodes, weights, edges, random_edges, .. } => {
                let edges = match (edges, random_edges) {
                    (Some(e), None) => e.clone(),
                    (None, Some(r)) => {
                        if !(0.0..=1.0).contains(&r.probability) {
                            bail!("random_edges.probability must lie in [0, 1]");
                        }
                        let mut rng = stream(seed, &format!("graph/{index}"));
                        random_graph_edges(*nodes, r.probability, &mut rng)
                    }
                    _ => bail!("graph_quadratic needs exactly one of edges, random_edges"),
                };
                make_form(FormKind::GraphQuadratic { edges }, space(*nodes, weights.as_ref(), 1.0)?)?
            }
            FormDescriptor::NonlocalPsi { nodes, weights, kernel, psi, .. } => {
                let n = *nodes;
                let kernel = kernel.clone().unwrap_or_else(|| uniform_kernel(n));
                let sp = space(n, weights.as_ref(), 1.0 / n.max(1) as f64)?;
                make_form(FormKind::NonlocalPsi { kernel, psi: *psi }, sp)?
            }
            FormDescriptor::LocalGrid1D { nodes, weights, h, integrand, .. } => {
                if !(h.is_finite() && *h > 0.0) {
                    bail!(Error::BadSpec(format!("grid spacing h = {h} must be finite and > 0")));
                }
                let kind = FormKind::LocalGrid1D { h: *h, integrand: integrand.clone() };
                make_form(kind, space(*nodes, weights.as_ref(), *h)?)?
            }
        };
        Ok(form)
    }
}
