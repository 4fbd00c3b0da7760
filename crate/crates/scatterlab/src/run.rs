//! Task orchestration: runs the configured tasks in order, judges each
//! against its gates and collects the tables the emitters need.

use std::collections::BTreeMap;
use std::time::Instant;

use scatterlab_core::chords::symmetry_diagnostics;
use scatterlab_core::chords::{chord_field, chord_report};
use scatterlab_core::domain::Domain;
use scatterlab_core::energy::{
    bol_check, deficit_identity_rhs, energy_from_grid, mixed_formula_rhs, planar_deficit,
    relative_gap, residual_grid, EnergyOptions, ResidualGrid,
};
use scatterlab_core::highdim::highdim_identity;
use scatterlab_core::quadrature::richardson_orders;
use scatterlab_core::sobolev::{sobolev_chain, sobolev_sides};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Check, RunConfig, Task};

/// Floor of the identity residual scale, relative to `L²`, so that equality
/// cases (energy and deficit both near zero) are judged absolutely.
pub const IDENTITY_SCALE_FLOOR: f64 = 1e-6;

/// Grid used for the curvature supremum of non-model metrics.
const SUP_K_GRID: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub limit: f64,
    pub pass: bool,
}

impl Gate {
    pub fn new(name: &str, value: f64, relation: Relation, limit: f64) -> Gate {
        let pass = match relation {
            Relation::AtMost => value <= limit,
            Relation::AtLeast => value >= limit,
            Relation::Above => value > limit,
        };
        Gate {
            name: name.to_string(),
            value,
            relation,
            limit,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskOutcome {
    pub task: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub values: BTreeMap<String, Value>,
    pub gates: Vec<Gate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub level: u32,
    pub tasks: Vec<TaskOutcome>,
    pub checks: Vec<Gate>,
    pub pass: bool,
}

impl RunReport {
    pub fn has_errors(&self) -> bool {
        self.tasks.iter().any(|t| t.status == Status::Error)
    }

    /// 0 when every gate passes, 3 when a task could not be computed, 1
    /// otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.has_errors() {
            3
        } else if self.pass {
            0
        } else {
            1
        }
    }

    /// A reported scalar addressed as `task.path.to.field`.
    pub fn lookup(&self, address: &str) -> Option<f64> {
        let mut parts = address.split('.');
        let task = parts.next()?;
        let outcome = self.tasks.iter().find(|t| t.task == task)?;
        let first = parts.next()?;
        let mut v = outcome.values.get(first)?;
        for p in parts {
            v = match v {
                Value::Object(m) => m.get(p)?,
                Value::Array(a) => a.get(p.parse::<usize>().ok()?)?,
                _ => return None,
            };
        }
        v.as_f64()
    }
}

/// One row of the chord table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChordRow {
    pub node: usize,
    pub s: f64,
    pub theta: f64,
    pub weight: f64,
    pub rho: f64,
    pub beta: f64,
    pub tau: f64,
    pub rho_prime: f64,
    pub exit_angle: f64,
    pub sqrt_g: f64,
    pub reflected_normal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub quantities: Vec<String>,
    /// `(level, n_boundary, values per quantity)`.
    pub rows: Vec<(u32, usize, Vec<f64>)>,
    /// Estimated orders between consecutive levels, per quantity.
    pub orders: Vec<Vec<f64>>,
}

/// Tables kept out of the JSON report.
#[derive(Debug, Clone, Default)]
pub struct RunTables {
    /// Residual grid with the boundary arclengths of its rows.
    pub residual_grid: Option<(ResidualGrid, Vec<f64>, f64)>,
    pub chords: Vec<ChordRow>,
    pub convergence: Option<ConvergenceTable>,
}

pub struct RunOutput {
    pub report: RunReport,
    pub tables: RunTables,
    /// Wall-clock seconds per task, in task order.
    pub timings: Vec<(String, f64)>,
}

struct Context<'a> {
    cfg: &'a RunConfig,
    level: u32,
    domain: Option<Result<Domain, String>>,
    energy: Option<f64>,
}

impl<'a> Context<'a> {
    fn domain(&mut self) -> Result<&Domain, String> {
        if self.domain.is_none() {
            self.domain = Some(self.cfg.domain(self.level).map_err(|e| e.to_string()));
        }
        self.domain
            .as_ref()
            .unwrap()
            .as_ref()
            .map_err(|e| e.clone())
    }

    fn energy_options(&self) -> EnergyOptions {
        let r = &self.cfg.resolution;
        EnergyOptions {
            interior_radial: r.radial,
            interior_angular: r.interior_angular,
            mixed_radial: r.mixed_radial,
            mixed_angular: r.mixed_angular,
            ..EnergyOptions::default()
        }
    }

    /// Direct energy, computing and keeping the residual grid on first use.
    fn energy(&mut self, tables: &mut RunTables) -> Result<f64, String> {
        if let Some(e) = self.energy {
            return Ok(e);
        }
        let d = self.domain()?;
        let grid = residual_grid(d).map_err(|e| e.to_string())?;
        let e = energy_from_grid(d, &grid);
        let s = d.boundary.nodes().iter().map(|n| n.s).collect();
        tables.residual_grid = Some((grid, s, d.boundary.length()));
        self.energy = Some(e);
        Ok(e)
    }
}

fn identity_scale(d: &Domain) -> f64 {
    let l = d.boundary.length();
    planar_deficit(d).abs().max(IDENTITY_SCALE_FLOOR * l * l)
}

type TaskResult = Result<(BTreeMap<String, Value>, Vec<Gate>), String>;

fn values(v: Value) -> BTreeMap<String, Value> {
    match v {
        Value::Object(m) => m.into_iter().collect(),
        _ => unreachable!("task values are objects"),
    }
}

fn energy_task(cx: &mut Context, tables: &mut RunTables) -> TaskResult {
    let e = cx.energy(tables)?;
    let d = cx.domain()?;
    let grid_max = tables
        .residual_grid
        .as_ref()
        .map(|g| g.0.max())
        .unwrap_or(0.0);
    let v = json!({
        "length": d.boundary.length(),
        "area": d.area,
        "e_direct": e,
        "planar_deficit": planar_deficit(d),
        "n_boundary": d.boundary.nodes().len(),
        "residual_max": grid_max,
    });
    let gates = vec![Gate::new("e_direct", e, Relation::AtLeast, 0.0)];
    Ok((values(v), gates))
}

fn identity_task(cx: &mut Context, tables: &mut RunTables) -> TaskResult {
    let e = cx.energy(tables)?;
    let opts = cx.energy_options();
    let tol = cx.cfg.tolerances.identity;
    let d = cx.domain()?;
    let id = deficit_identity_rhs(d, &opts).map_err(|e| e.to_string())?;
    let scale = identity_scale(d);
    let residual = relative_gap(e, id.rhs, scale);
    let mut gates = vec![Gate::new(
        "identity_residual",
        residual,
        Relation::AtMost,
        tol,
    )];
    let mut v = json!({
        "e_direct": e,
        "planar_deficit": id.planar_deficit,
        "interior_integral": id.interior_integral,
        "deficit_rhs": id.rhs,
        "identity_residual": residual,
        "scale": scale,
    });
    // the mixed form needs a convex boundary; other domains skip it
    match mixed_formula_rhs(d, &opts) {
        Ok(mixed) => {
            let r = relative_gap(e, mixed, scale);
            v["mixed_rhs"] = json!(mixed);
            v["mixed_residual"] = json!(r);
            gates.push(Gate::new("mixed_residual", r, Relation::AtMost, tol));
        }
        Err(scatterlab_core::Error::NotConvex(why)) => v["mixed_skipped"] = json!(why),
        Err(e) => return Err(e.to_string()),
    }
    Ok((values(v), gates))
}

fn bol_task(cx: &mut Context, tables: &mut RunTables) -> TaskResult {
    let e = cx.energy(tables)?;
    let opts = cx.energy_options();
    let tol = cx.cfg.tolerances.identity;
    let d = cx.domain()?;
    let sup_k = d.metric().sup_curvature(SUP_K_GRID);
    let b = bol_check(d, e, sup_k, &opts).map_err(|e| e.to_string())?;
    let slack = -tol * identity_scale(d);
    let v = json!({
        "lhs": b.lhs,
        "rhs": b.rhs,
        "margin": b.margin,
        "sup_k_used": b.sup_k,
        "diameter": b.diameter,
    });
    Ok((
        values(v),
        vec![Gate::new("margin", b.margin, Relation::AtLeast, slack)],
    ))
}

fn convex_task(cx: &mut Context, tables: &mut RunTables) -> TaskResult {
    let n_theta = cx.cfg.resolution.n_theta;
    let rows = cx.cfg.resolution.chord_table_nodes;
    let e = cx.energy(tables)?;
    let tol = &cx.cfg.tolerances;
    let (santalo_tol, chords_tol) = (tol.santalo, tol.chords);
    let d = cx.domain()?;
    let conv = d.is_strictly_convex(64);
    let mut v = json!({
        "convex": conv.convex,
        "min_curvature": conv.min_curvature,
        "min_curvature_at": conv.min_curvature_at,
    });
    if !conv.convex {
        let gates = vec![Gate::new(
            "min_curvature",
            conv.min_curvature,
            Relation::Above,
            0.0,
        )];
        return Ok((values(v), gates));
    }
    let r = chord_report(d, n_theta).map_err(|e| e.to_string())?;
    let scale = identity_scale(d);
    let chords_gap = relative_gap(r.e_chords, e, scale);
    for (k, x) in [
        ("n_theta", json!(r.n_theta)),
        ("santalo_lhs", json!(r.santalo_lhs)),
        ("santalo_rhs", json!(r.santalo_rhs)),
        ("santalo_residual", json!(r.santalo_residual)),
        ("jacobi_term", json!(r.jacobi_term)),
        ("e_direct", json!(e)),
        ("e_chords", json!(r.e_chords)),
        ("e_reflection", json!(r.e_reflection)),
        ("e_parts", json!(r.e_parts)),
        ("chords_residual", json!(chords_gap)),
        ("parts_residual", json!(r.parts_residual)),
        ("formula_residual", json!(r.formula_residual)),
        ("max_exit_angle_gap", json!(r.max_exit_angle_gap)),
    ] {
        v[k] = x;
    }
    let gates = vec![
        Gate::new(
            "santalo_residual",
            r.santalo_residual,
            Relation::AtMost,
            santalo_tol,
        ),
        Gate::new("chords_residual", chords_gap, Relation::AtMost, chords_tol),
        Gate::new("jacobi_term", r.jacobi_term, Relation::Above, 0.0),
    ];
    let nodes = d.boundary.nodes();
    let step = (nodes.len() / rows.max(1)).max(1);
    for (k, node) in nodes.iter().enumerate().step_by(step).take(rows) {
        let f = chord_field(d, node.s, n_theta).map_err(|e| e.to_string())?;
        for t in 0..f.theta.len() {
            tables.chords.push(ChordRow {
                node: k,
                s: f.s_y,
                theta: f.theta[t],
                weight: f.weights[t],
                rho: f.rho[t],
                beta: f.beta[t],
                tau: f.tau[t],
                rho_prime: f.rho_prime[t],
                exit_angle: f.exit_angle[t],
                sqrt_g: f.sqrt_g[t],
                reflected_normal: f.reflected_normal[t],
            });
        }
    }
    Ok((values(v), gates))
}

fn sobolev_task(cx: &mut Context) -> TaskResult {
    let spec = cx.cfg.sobolev.as_ref().expect("validated");
    let tol = &cx.cfg.tolerances;
    let metric = cx.cfg.metric();
    let f = spec.function().map_err(|e| e.to_string())?;
    let opts = spec.options();
    let (sides, chain) = if spec.chain {
        let c = sobolev_chain(&metric, &f, &opts).map_err(|e| e.to_string())?;
        (c.sides, Some(c))
    } else {
        (
            sobolev_sides(&metric, &f, &opts).map_err(|e| e.to_string())?,
            None,
        )
    };
    let mut v = json!({
        "l1": sides.l1,
        "l2_squared": sides.l2_squared,
        "gradient_l1": sides.gradient_l1,
        "lhs": sides.lhs,
        "rhs": sides.rhs,
        "margin": sides.margin,
        "sup_k": sides.sup_k,
        "support_diameter": sides.support_diameter,
    });
    let mut gates = vec![Gate::new("margin", sides.margin, Relation::Above, 0.0)];
    if let Some(c) = chain {
        let ordered = c.ordered(tol.sobolev_chain);
        v["gradient_squared"] = json!(c.gradient_squared);
        v["crossterm"] = json!(c.crossterm);
        v["lower"] = json!(c.lower);
        v["upper_gap"] = json!(c.upper_gap);
        v["lower_gap"] = json!(c.lower_gap);
        v["ordered"] = json!(ordered);
        let worst = (c.upper_gap.min(c.lower_gap) / c.gradient_squared.abs().max(1e-300)).min(0.0);
        gates.push(Gate::new(
            "chain_order",
            worst,
            Relation::AtLeast,
            -tol.sobolev_chain,
        ));
        if metric.is_flat() {
            let gap = relative_gap(c.crossterm, sides.lhs, 0.0);
            v["planar_crossterm_residual"] = json!(gap);
            gates.push(Gate::new(
                "planar_crossterm_residual",
                gap,
                Relation::AtMost,
                tol.identity,
            ));
        }
    }
    Ok((values(v), gates))
}

fn symmetry_task(cx: &mut Context) -> TaskResult {
    let n = cx.cfg.resolution.symmetry_samples;
    let d = cx.domain()?;
    let s = symmetry_diagnostics(d, n).map_err(|e| e.to_string())?;
    let v = json!({
        "samples": n,
        "angle_residual": s.angle_residual,
        "chord_dispersion": s.chord_dispersion,
        "curvature_dispersion": s.curvature_dispersion,
        "residual_max": s.residual_grid.max(),
    });
    Ok((values(v), Vec::new()))
}

fn highdim_task(cx: &mut Context) -> TaskResult {
    let spec = cx.cfg.highdim.as_ref().expect("validated");
    let tol = cx.cfg.tolerances.highdim;
    let d = spec.domain().map_err(|e| e.to_string())?;
    let opts = spec.options(cx.cfg.tolerances.diag_cutoff);
    let mut list = Vec::new();
    let mut gates = Vec::new();
    for &p in &spec.p {
        let id = highdim_identity(&d, p, &opts).map_err(|e| e.to_string())?;
        list.push(json!({
            "p": id.p,
            "lhs": id.lhs,
            "rhs": id.rhs,
            "residual": id.residual,
            "scale": id.scale,
            "boundary_term": id.boundary_term,
            "interior_term": id.interior_term,
            "interior_std_error": id.interior_std_error,
            "volume": id.volume,
            "samples": id.samples,
            "seed": id.seed,
        }));
        gates.push(Gate::new(
            &format!("residual[p={p}]"),
            id.residual,
            Relation::AtMost,
            tol,
        ));
        gates.push(Gate::new(
            &format!("lhs[p={p}]"),
            id.lhs,
            Relation::AtLeast,
            0.0,
        ));
    }
    Ok((values(json!({ "identities": list })), gates))
}

/// Santaló residual and the energy identity residual over doubling boundary
/// resolutions, with estimated orders.
pub fn convergence_study(cfg: &RunConfig, levels: usize) -> Result<ConvergenceTable, String> {
    let n_theta = cfg.resolution.n_theta;
    let mut rows = Vec::new();
    for level in 0..levels as u32 {
        let mut cx = Context {
            cfg,
            level,
            domain: None,
            energy: None,
        };
        let mut scratch = RunTables::default();
        let e = cx.energy(&mut scratch)?;
        let opts = cx.energy_options();
        let d = cx.domain()?;
        let santalo = chord_report(d, n_theta)
            .map_err(|e| e.to_string())?
            .santalo_residual;
        let id = deficit_identity_rhs(d, &opts).map_err(|e| e.to_string())?;
        let identity = relative_gap(e, id.rhs, identity_scale(d));
        rows.push((
            level,
            d.boundary.nodes().len(),
            vec![santalo, identity, d.boundary.length()],
        ));
    }
    let quantities = vec![
        "santalo_residual".to_string(),
        "identity_residual".into(),
        "length".into(),
    ];
    let orders = (0..2)
        .map(|q| richardson_orders(&rows.iter().map(|r| r.2[q]).collect::<Vec<_>>()))
        .collect();
    Ok(ConvergenceTable {
        quantities,
        rows,
        orders,
    })
}

fn converge_task(cx: &mut Context, tables: &mut RunTables) -> TaskResult {
    let table = convergence_study(cx.cfg, cx.cfg.resolution.levels)?;
    let min_order = cx.cfg.tolerances.min_order;
    let mut v = json!({ "levels": table.rows.iter().map(|r| r.1).collect::<Vec<_>>() });
    let mut gates = Vec::new();
    for (q, name) in table.quantities.iter().enumerate().take(2) {
        let series: Vec<f64> = table.rows.iter().map(|r| r.2[q]).collect();
        let worst = table.orders[q]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let steps = series.windows(2).filter(|w| !(w[1] < w[0])).count();
        v[name.as_str()] = json!({ "values": series, "orders": table.orders[q] });
        gates.push(Gate::new(
            &format!("{name}.increases"),
            steps as f64,
            Relation::AtMost,
            0.0,
        ));
        gates.push(Gate::new(
            &format!("{name}.order"),
            worst,
            Relation::AtLeast,
            min_order,
        ));
    }
    let lengths: Vec<f64> = table.rows.iter().map(|r| r.2[2]).collect();
    v["length"] = json!(lengths);
    tables.convergence = Some(table);
    Ok((values(v), gates))
}

fn run_task(task: Task, cx: &mut Context, tables: &mut RunTables) -> TaskResult {
    match task {
        Task::Energy => energy_task(cx, tables),
        Task::Identity => identity_task(cx, tables),
        Task::Bol => bol_task(cx, tables),
        Task::Convex => convex_task(cx, tables),
        Task::Sobolev => sobolev_task(cx),
        Task::Symmetry => symmetry_task(cx),
        Task::Highdim => highdim_task(cx),
        Task::Converge => converge_task(cx, tables),
    }
}

fn check_gate(report: &RunReport, c: &Check) -> Gate {
    let value = report.lookup(&c.value).unwrap_or(f64::NAN);
    if let (Some(t), Some(r)) = (c.target, c.rel_tol) {
        let mut g = Gate::new(&c.value, (value - t).abs(), Relation::AtMost, r * t.abs());
        g.name = format!("{} ≈ {t}", c.value);
        return g;
    }
    let mut gates = Vec::new();
    if let Some(min) = c.min {
        gates.push(Gate::new(&c.value, value, Relation::AtLeast, min));
    }
    if let Some(max) = c.max {
        gates.push(Gate::new(&c.value, value, Relation::AtMost, max));
    }
    gates.iter().find(|g| !g.pass).unwrap_or(&gates[0]).clone()
}

/// Runs every task of a validated configuration at boundary level `level`
/// (`n_boundary · 2^level` nodes). Task errors are recorded and do not stop
/// later tasks.
pub fn run(cfg: &RunConfig, level: u32) -> RunOutput {
    let mut cx = Context {
        cfg,
        level,
        domain: None,
        energy: None,
    };
    let mut tables = RunTables::default();
    let mut outcomes = Vec::new();
    let mut timings = Vec::new();
    for &task in &cfg.tasks {
        let start = Instant::now();
        let outcome = match run_task(task, &mut cx, &mut tables) {
            Ok((values, gates)) => TaskOutcome {
                task: task.name().into(),
                status: if gates.iter().all(|g| g.pass) {
                    Status::Pass
                } else {
                    Status::Fail
                },
                error: None,
                values,
                gates,
            },
            Err(e) => TaskOutcome {
                task: task.name().into(),
                status: Status::Error,
                error: Some(e),
                values: BTreeMap::new(),
                gates: Vec::new(),
            },
        };
        timings.push((task.name().to_string(), start.elapsed().as_secs_f64()));
        outcomes.push(outcome);
    }
    let mut report = RunReport {
        config: cfg.clone(),
        level,
        tasks: outcomes,
        checks: Vec::new(),
        pass: false,
    };
    report.checks = cfg.checks.iter().map(|c| check_gate(&report, c)).collect();
    report.pass = report.tasks.iter().all(|t| t.status == Status::Pass)
        && report.checks.iter().all(|g| g.pass);
    RunOutput {
        report,
        tables,
        timings,
    }
}
