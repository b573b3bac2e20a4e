//! Config-driven analysis of one grid (given directly or exported from a model)
//! written as a tidy `quantity,direction,cell,value` table.

use serde::Deserialize;

use crate::conflict::worst_case_ratio;
use crate::contamination::{self as ct, Direction, MAX_SEARCH_CELLS};
use crate::error::{Error, Result};
use crate::models::{BernoulliBetaModel, GridAxis, LocationNormalModel, LocationScaleModel};
use crate::rb_core::{build_belief_state, credible_region, rb_estimate, strength, BeliefState, Label, ParamGrid};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub gamma: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub psi0: Option<CellRef>,
    #[serde(default)]
    pub grid: Option<GridBlock>,
    #[serde(default)]
    pub model: Option<ModelBlock>,
    #[serde(default)]
    pub directions: Vec<DirectionBlock>,
    /// Threads for the exhaustive subset search; the output does not depend on it.
    #[serde(default)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum CellRef {
    Value(f64),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub labels: Vec<CellRef>,
    pub prior: Vec<f64>,
    pub cond_predictive: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisBlock {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelBlock {
    LocationNormal {
        n: u64,
        xbar: f64,
        mu0: f64,
        sigma0_sq: f64,
        axis: AxisBlock,
    },
    BernoulliBeta {
        n: u64,
        t: u64,
        alpha0: f64,
        beta0: f64,
        axis: AxisBlock,
    },
    LocationScale {
        n: u64,
        xbar: f64,
        s_sq: f64,
        mu0: f64,
        tau0_sq: f64,
        alpha0: f64,
        beta0: f64,
        axis: AxisBlock,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DirectionBlock {
    /// Either `mass` (weights, normalized) or `point` (a cell label).
    Marginal {
        name: String,
        #[serde(default)]
        mass: Option<Vec<f64>>,
        #[serde(default)]
        point: Option<CellRef>,
    },
    Conditional {
        name: String,
        cond_predictive: Vec<f64>,
    },
    Full {
        name: String,
        mass: Vec<f64>,
        cond_predictive: Vec<f64>,
    },
}

impl DirectionBlock {
    pub fn name(&self) -> &str {
        match self {
            DirectionBlock::Marginal { name, .. }
            | DirectionBlock::Conditional { name, .. }
            | DirectionBlock::Full { name, .. } => name,
        }
    }
}

fn config_err(path: impl Into<String>, e: impl ToString) -> Error {
    Error::Config {
        path: path.into(),
        message: e.to_string(),
    }
}

/// Parses a TOML document; schema violations carry the offending key path.
pub fn parse_config(text: &str) -> Result<AnalysisConfig> {
    let de = toml::Deserializer::new(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        config_err(path, e.into_inner().message())
    })
}

/// A validated analysis: the belief state, resolved directions and options.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub state: BeliefState,
    pub gamma: f64,
    pub epsilon: f64,
    pub psi0: Option<usize>,
    pub directions: Vec<(String, Direction)>,
    pub model: Option<ModelBlock>,
    pub workers: usize,
}

fn lookup(grid: &ParamGrid, cell: &CellRef, path: &str) -> Result<usize> {
    match cell {
        CellRef::Value(v) => grid.index_of(&Label::Value(*v)),
        CellRef::Name(s) => grid.find(s),
    }
    .map_err(|e| config_err(path, e))
}

fn axis(a: &AxisBlock) -> Result<GridAxis> {
    GridAxis::new(a.lo, a.hi, a.cells).map_err(|e| config_err("model.axis", e))
}

fn export(model: &ModelBlock) -> Result<(ParamGrid, Vec<f64>)> {
    let m = |e: Error| config_err("model", e);
    match *model {
        ModelBlock::LocationNormal {
            n,
            xbar,
            mu0,
            sigma0_sq,
            axis: ref a,
        } => LocationNormalModel::new(n, xbar, mu0, sigma0_sq).map_err(m)?.grid_export(&axis(a)?),
        ModelBlock::BernoulliBeta {
            n,
            t,
            alpha0,
            beta0,
            axis: ref a,
        } => BernoulliBetaModel::new(n, t, alpha0, beta0).map_err(m)?.grid_export(&axis(a)?),
        ModelBlock::LocationScale {
            n,
            xbar,
            s_sq,
            mu0,
            tau0_sq,
            alpha0,
            beta0,
            axis: ref a,
        } => LocationScaleModel::new(n, xbar, s_sq, mu0, tau0_sq, alpha0, beta0)
            .map_err(m)?
            .grid_export(&axis(a)?),
    }
    .map_err(|e| match e {
        Error::Config { .. } => e,
        other => config_err("model.axis", other),
    })
}

pub fn prepare(cfg: &AnalysisConfig) -> Result<Prepared> {
    if !(cfg.gamma > 0.0 && cfg.gamma <= 1.0) {
        return Err(config_err("gamma", format!("{} is not in (0, 1]", cfg.gamma)));
    }
    if !(cfg.epsilon >= 0.0 && cfg.epsilon < 1.0) {
        return Err(config_err("epsilon", format!("{} is not in [0, 1)", cfg.epsilon)));
    }
    if cfg.workers == Some(0) {
        return Err(config_err("workers", "must be at least 1"));
    }
    let (grid, cond) = match (&cfg.grid, &cfg.model) {
        (Some(g), None) => {
            let labels: Vec<Label> = g
                .labels
                .iter()
                .map(|l| match l {
                    CellRef::Value(v) => Label::Value(*v),
                    CellRef::Name(s) => Label::Name(s.clone()),
                })
                .collect();
            if let Some(l) = labels.iter().find(|l| l.to_string().contains([',', '"', '\n', '\r'])) {
                return Err(config_err("grid.labels", format!("label {l:?} cannot be written to CSV")));
            }
            if g.cond_predictive.len() != labels.len() {
                return Err(config_err(
                    "grid.cond_predictive",
                    Error::LengthMismatch {
                        expected: labels.len(),
                        found: g.cond_predictive.len(),
                    },
                ));
            }
            let grid = ParamGrid::new(labels, g.prior.clone()).map_err(|e| config_err("grid", e))?;
            (grid, g.cond_predictive.clone())
        }
        (None, Some(m)) => export(m)?,
        _ => return Err(config_err("", "exactly one of `grid` and `model` must be given")),
    };
    let state = build_belief_state(grid, cond).map_err(|e| config_err("grid.cond_predictive", e))?;
    let g = state.grid();
    let psi0 = cfg.psi0.as_ref().map(|p| lookup(g, p, "psi0")).transpose()?;
    let mut directions = Vec::with_capacity(cfg.directions.len());
    for (k, d) in cfg.directions.iter().enumerate() {
        let path = format!("directions[{k}]");
        if d.name().contains([',', '"', '\n', '\r']) {
            return Err(config_err(format!("{path}.name"), "name cannot be written to CSV"));
        }
        if directions.iter().any(|(n, _)| n == d.name()) {
            return Err(config_err(format!("{path}.name"), format!("duplicate direction {:?}", d.name())));
        }
        let q = match d {
            DirectionBlock::Marginal {
                mass: Some(w),
                point: None,
                ..
            } => Direction::marginal_from_weights(w),
            DirectionBlock::Marginal {
                mass: None,
                point: Some(p),
                ..
            } => Direction::point_mass(state.len(), lookup(g, p, &format!("{path}.point"))?),
            DirectionBlock::Marginal { .. } => {
                return Err(config_err(&path, "a marginal direction needs exactly one of `mass` and `point`"))
            }
            DirectionBlock::Conditional { cond_predictive, .. } => Direction::conditional(cond_predictive.clone()),
            DirectionBlock::Full {
                mass, cond_predictive, ..
            } => {
                let total: f64 = mass.iter().sum();
                Direction::full(mass.iter().map(|w| w / total).collect(), cond_predictive.clone())
            }
        }
        .and_then(|q| {
            q.resolve(&state)?;
            Ok(q)
        })
        .map_err(|e| config_err(&path, e))?;
        directions.push((d.name().to_string(), q));
    }
    Ok(Prepared {
        state,
        gamma: cfg.gamma,
        epsilon: cfg.epsilon,
        psi0,
        directions,
        model: cfg.model.clone(),
        workers: cfg.workers.unwrap_or(1),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub quantity: &'static str,
    pub direction: String,
    pub cell: String,
    pub value: f64,
}

pub const HEADER: &str = "quantity,direction,cell,value";

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.quantity, r.direction, r.cell, r.value));
    }
    out
}

struct Sink(Vec<Row>);

impl Sink {
    fn put(&mut self, quantity: &'static str, direction: &str, cell: &str, value: f64) {
        self.0.push(Row {
            quantity,
            direction: direction.to_string(),
            cell: cell.to_string(),
            value,
        });
    }
}

fn model_rows(model: &ModelBlock, out: &mut Sink) -> Result<()> {
    match *model {
        ModelBlock::LocationNormal {
            n, xbar, mu0, sigma0_sq, ..
        } => {
            let m = LocationNormalModel::new(n, xbar, mu0, sigma0_sq)?;
            out.put("tail_probability", "", "", m.tail_probability()?);
            out.put("sup_ratio", "", "", m.sup_ratio());
        }
        ModelBlock::BernoulliBeta { n, t, alpha0, beta0, .. } => {
            let m = BernoulliBetaModel::new(n, t, alpha0, beta0)?;
            out.put("tail_probability", "", "", m.tail_probability()?);
            out.put("sup_ratio", "", "", m.sup_ratio());
        }
        ModelBlock::LocationScale {
            n,
            xbar,
            s_sq,
            mu0,
            tau0_sq,
            alpha0,
            beta0,
            ..
        } => {
            let m = LocationScaleModel::new(n, xbar, s_sq, mu0, tau0_sq, alpha0, beta0)?;
            out.put("tail_sigma_sq", "", "", m.tail_pi1()?);
            out.put("rb1_max", "", "", m.rb1_s2_max());
            out.put("tail_mu", "", "", m.tail_pi2()?);
            out.put("integrated_worst_case", "", "", m.integrated_worst_case());
        }
    }
    Ok(())
}

/// Every report quantity, in grid order then direction order.
pub fn run(p: &Prepared) -> Result<Vec<Row>> {
    let s = &p.state;
    let label = |i: usize| s.grid().label(i).to_string();
    let mut out = Sink(Vec::new());

    for i in 0..s.len() {
        let l = label(i);
        out.put("prior", "", &l, s.prior_mass()[i]);
        out.put("cond_predictive", "", &l, s.cond_predictive()[i]);
        out.put("posterior", "", &l, s.posterior_mass()[i]);
        out.put("rb", "", &l, s.rb()[i]);
    }
    out.put("prior_predictive", "", "", s.prior_predictive());
    let est = rb_estimate(s);
    out.put("rb_estimate", "", &label(est), s.rb()[est]);
    out.put("worst_case_ratio", "", "", worst_case_ratio(s));

    let region = credible_region(s, p.gamma)?;
    out.put("credible_cutoff", "", "", region.cutoff);
    out.put("credible_content", "", "", region.exact_content);
    for &i in &region.cells {
        out.put("credible_member", "", &label(i), 1.0);
    }
    if region.cells.len() == s.len() {
        // contamination cannot move mass out of the whole space
        out.put("huber_upper", "", "", 1.0);
        out.put("huber_lower", "", "", 1.0);
        out.put("huber_delta", "", "", 0.0);
    } else {
        let hb = ct::huber_bounds(s, &region.cells, p.epsilon)?;
        out.put("huber_upper", "", "", hb.upper);
        out.put("huber_lower", "", "", hb.lower);
        out.put("huber_delta", "", "", hb.delta);
        out.put("delta_credible", "", "", ct::delta_credible(s, p.gamma, p.epsilon)?);
        if s.len() <= MAX_SEARCH_CELLS && p.gamma < 1.0 {
            let so = ct::optimality_search_parallel(s, p.gamma, p.epsilon, p.workers)?;
            out.put("min_delta", "", "", so.min_delta);
            for &i in &so.argmin {
                out.put("min_delta_member", "", &label(i), 1.0);
            }
        }
    }

    if let Some(k) = p.psi0 {
        let ev = strength(s, k)?;
        let l = label(k);
        out.put("strength", "", &l, ev.strength);
        out.put("strength_lower", "", &l, ev.lower_bound);
        out.put("strength_upper", "", &l, ev.upper_bound);
    }

    if let Some(m) = &p.model {
        model_rows(m, &mut out)?;
    }

    for (name, q) in &p.directions {
        out.put("m_q_over_m", name, "", ct::m_q_over_m(s, q)?);
        for i in 0..s.len() {
            out.put("gateaux_rb", name, &label(i), ct::gateaux_rb(s, i, q)?);
        }
        let marginal = matches!(q, Direction::Marginal { .. });
        if marginal {
            out.put("relative_sensitivity_rb", name, "", ct::relative_sensitivity_rb(s, q)?);
        }
        if let Some(k) = p.psi0 {
            let l = label(k);
            match q {
                Direction::Marginal { .. } => {
                    out.put("gateaux_map", name, &l, ct::gateaux_map(s, k, q)?);
                    out.put("relative_sensitivity_map", name, &l, ct::relative_sensitivity_map(s, k, q)?);
                    out.put("gateaux_strength", name, &l, ct::gateaux_strength_marginal(s, k, q)?);
                }
                Direction::Conditional { .. } => {
                    out.put("strength_threshold", name, &l, ct::strength_threshold(s, k, q)?);
                    out.put("gateaux_strength", name, &l, ct::gateaux_strength_conditional(s, k, q)?);
                }
                Direction::Full { .. } => {}
            }
        }
    }
    Ok(out.0)
}

/// Parse, validate and run: the whole `analyze` command minus I/O.
pub fn analyze_str(text: &str) -> Result<String> {
    let cfg = parse_config(text)?;
    let p = prepare(&cfg)?;
    Ok(to_csv(&run(&p)?))
}
