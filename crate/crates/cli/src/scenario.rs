//! Scenario runners: one table per config.

use anyhow::{Context, Result};
use rayon::prelude::*;
use stqrf_core::dynamics::{compute_moments_with, evolve, threshold_time};
use stqrf_core::qsl::{dynamical_qsl_bound, mt_bound_pure, static_qsl_bound};
use stqrf_core::relational::{relational_minimum, relational_tradeoff_check, relational_variance};
use stqrf_core::relational::{EnergyGrid, PovmSpec, SeedWeighting};
use stqrf_core::spatial::{fit_lambda_squared, general_min_spread};
use stqrf_core::tradeoff::tradeoff_check;
use stqrf_core::{povm_normalization_audit, Error, Family, Grid, HamiltonianOrder, Params, State};

use crate::config::{OutputKind, ScenarioConfig, Weighting};
use crate::studies::{
    contractive_state, family_excess, ideal_frame, params_for, qubit_state, system,
};
use crate::table::{col, Cell, PlotSpec, Provenance, ResultTable};

const T: &str = "hbar/dH";
const X2: &str = "hbar^2/(m*dH)";
const X: &str = "hbar/sqrt(m*dH)";
const V2: &str = "dH/m";
const XV: &str = "hbar/m";
const ONE: &str = "1";
const TAU0: &str = "hbar/(m*c^2)";
const XT: &str = "hbar^2/(sqrt(m*dH)*dH)";

fn grid_note(state: &State) -> String {
    format!("momentum {} points", state.n_p())
}

fn state_for(cfg: &ScenarioConfig, lambda: f64, t_max: f64) -> Result<State> {
    let s = &cfg.state;
    let t_max = t_max.max(1.0);
    Ok(match cfg.family() {
        Some(f) => qubit_state(f, lambda, s.theta, s.momentum_spread, s.drift, t_max)?,
        None => contractive_state(lambda, s.theta, s.momentum_spread, s.gamma, t_max)?,
    })
}

fn t_max(cfg: &ScenarioConfig) -> f64 {
    cfg.times().into_iter().fold(0.0, f64::max)
}

/// Runs a validated scenario. Rows are computed in the current rayon pool and
/// collected in input order, so the table does not depend on the thread count.
pub fn run(cfg: &ScenarioConfig) -> Result<ResultTable> {
    let table = match cfg.output {
        OutputKind::Moments => moments(cfg),
        OutputKind::SpreadBounds => spread_bounds(cfg),
        OutputKind::PrefactorFit => prefactor_fit(cfg),
        OutputKind::Qsl => qsl(cfg),
        OutputKind::Tradeoff => tradeoff(cfg),
        OutputKind::Relational => relational(cfg),
        OutputKind::PovmAudit => povm_audit(cfg),
    };
    table.with_context(|| format!("scenario `{}` ({})", cfg.name, cfg.output.tag()))
}

fn moments(cfg: &ScenarioConfig) -> Result<ResultTable> {
    let mut prov = Provenance::default();
    let state = state_for(cfg, cfg.state.lambda, t_max(cfg))?;
    prov.grids.insert(grid_note(&state));
    let mut rows = Vec::new();
    for order in cfg.orders()? {
        prov.orders.insert(order.tag());
        let m0 = compute_moments_with(&state, order).context("dynamics")?;
        let chunk: Vec<Vec<Cell>> = cfg
            .times()
            .par_iter()
            .map(|&t| -> Result<Vec<Cell>> {
                let m = compute_moments_with(&evolve(&state, t, order), order)?;
                let law = m0.var_x + 2.0 * t * m0.cov_xv + t * t * m0.var_v;
                Ok(vec![
                    order.tag().into(),
                    t.into(),
                    m.mean_x.into(),
                    m.var_x.into(),
                    law.into(),
                    m.cov_xv.into(),
                    m.var_v.into(),
                ])
            })
            .collect::<Result<_>>()
            .context("dynamics")?;
        rows.extend(chunk);
    }
    Ok(ResultTable {
        columns: vec![
            col("order", ONE),
            col("t", T),
            col("mean_x", X),
            col("var_x_oracle", X2),
            col("var_x_law", X2),
            col("cov_xv", XV),
            col("var_v", V2),
        ],
        rows,
        provenance: prov,
        plot: PlotSpec {
            x: "t",
            ys: vec!["var_x_oracle", "var_x_law"],
            log_y: false,
        },
    })
}

fn spread_bounds(cfg: &ScenarioConfig) -> Result<ResultTable> {
    let mut prov = Provenance::default();
    prov.orders.insert(HamiltonianOrder::Exact.tag());
    let state = state_for(cfg, cfg.state.lambda, t_max(cfg))?;
    prov.grids.insert(grid_note(&state));
    let rows = cfg
        .times()
        .par_iter()
        .map(|&t| -> Result<Vec<Cell>> {
            let b = general_min_spread(&state, t)?;
            let var = crate::studies::oracle_var_x(&state, t)?;
            Ok(vec![
                t.into(),
                var.into(),
                b.salecker_wigner.into(),
                b.bound_exact.into(),
                b.bound_final.into(),
            ])
        })
        .collect::<Result<_>>()
        .context("spatial bounds")?;
    Ok(ResultTable {
        columns: vec![
            col("t", T),
            col("var_x_oracle", X2),
            col("sw_bound", X2),
            col("general_bound", X2),
            col("general_bound_expanded", X2),
        ],
        rows,
        provenance: prov,
        plot: PlotSpec {
            x: "t",
            ys: vec!["var_x_oracle", "general_bound", "sw_bound"],
            log_y: false,
        },
    })
}

fn prefactor_fit(cfg: &ScenarioConfig) -> Result<ResultTable> {
    let mut prov = Provenance::default();
    prov.orders.insert(HamiltonianOrder::Exact.tag());
    prov.grids
        .insert("momentum resolved per width (>= 1024 points)".into());
    let t = cfg.times()[0];
    let lambdas = cfg.lambdas();
    let fits: Vec<[(f64, f64); 2]> = lambdas
        .par_iter()
        .map(|&l| {
            Ok([
                family_excess(Family::Gaussian, l, t)?,
                family_excess(Family::Mus, l, t)?,
            ])
        })
        .collect::<Result<_>>()
        .context("spatial bounds")?;
    let mut rows: Vec<Vec<Cell>> = lambdas
        .iter()
        .zip(&fits)
        .map(|(l, f)| {
            vec![
                "point".into(),
                (*l).into(),
                f[0].0.into(),
                f[1].0.into(),
                f[0].1.into(),
                f[1].1.into(),
            ]
        })
        .collect();
    let column = |fam: usize, oracle: bool| -> Vec<f64> {
        fits.iter()
            .map(|f| if oracle { f[fam].0 } else { f[fam].1 })
            .collect()
    };
    rows.push(vec![
        "fit".into(),
        Cell::Empty,
        fit_lambda_squared(&lambdas, &column(0, true)).into(),
        fit_lambda_squared(&lambdas, &column(1, true)).into(),
        fit_lambda_squared(&lambdas, &column(0, false)).into(),
        fit_lambda_squared(&lambdas, &column(1, false)).into(),
    ]);
    Ok(ResultTable {
        columns: vec![
            col("row", ONE),
            col("lambda", ONE),
            col("gaussian_excess", ONE),
            col("mus_excess", ONE),
            col("gaussian_excess_closed", ONE),
            col("mus_excess_closed", ONE),
        ],
        rows,
        provenance: prov,
        plot: PlotSpec {
            x: "lambda",
            ys: vec!["gaussian_excess", "mus_excess"],
            log_y: false,
        },
    })
}

fn qsl(cfg: &ScenarioConfig) -> Result<ResultTable> {
    let mut prov = Provenance::default();
    prov.orders.insert(HamiltonianOrder::Exact.tag());
    let cases: Vec<(f64, f64)> = cfg
        .lambdas()
        .iter()
        .flat_map(|&l| cfg.sweep.delta.iter().map(move |&d| (l, d)))
        .collect();
    let states: Vec<State> = cfg
        .lambdas()
        .iter()
        .map(|&l| state_for(cfg, l, 1.0))
        .collect::<Result<_>>()?;
    for s in &states {
        prov.grids.insert(grid_note(s));
    }
    let n_delta = cfg.sweep.delta.len();
    let rows = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(l, d))| -> Result<Vec<Cell>> {
            let s = &states[i / n_delta];
            let st = static_qsl_bound(s, d)?.bound_time;
            let dy = dynamical_qsl_bound(s, d)?.bound_time;
            let oracle = match threshold_time(s, d, HamiltonianOrder::Exact) {
                Ok(t) => Some(t),
                Err(Error::NotReached(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let mt = mt_bound_pure(s.params().hbar, s.var_energy())?;
            Ok(vec![
                l.into(),
                d.into(),
                st.into(),
                dy.into(),
                oracle.into(),
                mt.into(),
            ])
        })
        .collect::<Result<_>>()
        .context("clock speed limits")?;
    Ok(ResultTable {
        columns: vec![
            col("lambda", ONE),
            col("delta", ONE),
            col("static_bound", T),
            col("dynamical_bound", T),
            col("oracle_time", T),
            col("mt_time", T),
        ],
        rows,
        provenance: prov,
        plot: PlotSpec {
            x: "delta",
            ys: vec!["static_bound", "dynamical_bound", "oracle_time"],
            log_y: false,
        },
    })
}

fn tradeoff(cfg: &ScenarioConfig) -> Result<ResultTable> {
    let mut prov = Provenance::default();
    prov.orders.insert(HamiltonianOrder::Exact.tag());
    let times = cfg.times();
    let mut rows = Vec::new();
    for l in cfg.lambdas() {
        let s = state_for(cfg, l, t_max(cfg))?;
        prov.grids.insert(grid_note(&s));
        let chunk: Vec<Vec<Cell>> = times
            .par_iter()
            .map(|&t| -> Result<Vec<Cell>> {
                let r = tradeoff_check(&s, t)?;
                Ok(vec![
                    l.into(),
                    t.into(),
                    r.dx.into(),
                    r.t_perp.into(),
                    r.lhs.into(),
                    r.rhs.into(),
                    r.slack.into(),
                ])
            })
            .collect::<Result<_>>()
            .context("trade-off")?;
        rows.extend(chunk);
    }
    Ok(ResultTable {
        columns: vec![
            col("lambda", ONE),
            col("t", T),
            col("dx", X),
            col("t_perp", T),
            col("lhs", XT),
            col("rhs", XT),
            col("slack", ONE),
        ],
        rows,
        provenance: prov,
        plot: PlotSpec {
            x: "t",
            ys: vec!["lhs", "rhs"],
            log_y: false,
        },
    })
}

fn relational(cfg: &ScenarioConfig) -> Result<ResultTable> {
    let rc = cfg.relational.as_ref().context("missing [relational]")?;
    let mut prov = Provenance::default();
    let lambda = cfg.state.lambda;
    let frame = ideal_frame(
        lambda,
        cfg.state.momentum_spread,
        rc.momentum_points,
        rc.energy_points,
    )?;
    let params = *frame.params();
    let sys = system(
        rc.system_mass,
        rc.system_spread * params.m * params.c,
        0.0,
        512,
    )?;
    prov.grids
        .insert(format!("momentum {} points", rc.momentum_points));
    prov.grids
        .insert(format!("energy {} points", rc.energy_points));
    prov.grids.insert("system momentum 512 points".into());
    let u = params.hbar / params.rest_energy();
    let orders = cfg.orders()?;
    let cases: Vec<(HamiltonianOrder, f64)> = orders
        .iter()
        .flat_map(|&o| cfg.sweep.tau0.iter().map(move |&t| (o, t)))
        .collect();
    for o in &orders {
        prov.orders.insert(o.tag());
    }
    let rows = cases
        .par_iter()
        .map(|&(order, tau0)| -> Result<Vec<Cell>> {
            let tau = tau0 * u;
            let r = relational_variance(&frame, &sys, rc.readout_x, tau, order)?;
            let tr = relational_tradeoff_check(&frame, rc.readout_x, tau)?;
            let min = relational_minimum(&params, params.m, tau)
                .ok()
                .map(|m| m.value());
            let b = r.bound_chain;
            Ok(vec![
                order.tag().into(),
                tau0.into(),
                r.total.into(),
                r.rod_total.into(),
                r.terms.closed_form().into(),
                b.spread_bound.into(),
                b.energy_bound.into(),
                b.compton_bound.into(),
                b.init_time_bound.into(),
                tr.lhs.into(),
                tr.rhs.into(),
                min.into(),
            ])
        })
        .collect::<Result<_>>()
        .context("relational")?;
    Ok(ResultTable {
        columns: vec![
            col("order", ONE),
            col("tau0", TAU0),
            col("var_relational", X2),
            col("var_rod", X2),
            col("var_closed_form", X2),
            col("spread_bound", X2),
            col("energy_bound", X2),
            col("compton_bound", X2),
            col("init_time_bound", X2),
            col("tradeoff_lhs", XT),
            col("tradeoff_rhs", XT),
            col("minimum", X2),
        ],
        rows,
        provenance: prov,
        plot: PlotSpec {
            x: "tau0",
            ys: vec!["var_rod", "spread_bound", "energy_bound", "compton_bound"],
            log_y: false,
        },
    })
}

fn povm_audit(cfg: &ScenarioConfig) -> Result<ResultTable> {
    let pc = cfg.povm.as_ref().context("missing [povm]")?;
    let params: Params = params_for(cfg.state.lambda)?;
    let momentum = Grid::new(
        -pc.momentum_max,
        pc.momentum_max,
        pc.momentum_points.max(64),
    )?;
    let weighting = match pc.weighting {
        Weighting::Sandwiched => SeedWeighting::Sandwiched,
        Weighting::Unweighted => SeedWeighting::Unweighted,
    };
    let mut prov = Provenance::default();
    prov.grids
        .insert(format!("momentum {} points", momentum.n_points));
    let orders = cfg.orders()?;
    let cases: Vec<(HamiltonianOrder, usize)> = orders
        .iter()
        .flat_map(|&o| cfg.sweep.energy_points.iter().map(move |&n| (o, n)))
        .collect();
    for (o, n) in &cases {
        prov.orders.insert(o.tag());
        prov.grids.insert(format!("energy {n} points"));
    }
    let rows = cases
        .par_iter()
        .map(|&(order, n)| -> Result<Vec<Cell>> {
            let energy = EnergyGrid::spanning(-pc.energy_max, pc.energy_max, n)?;
            let spec = PovmSpec {
                x0: 0.0,
                tau0: 0.0,
                momentum,
                energy,
                order,
                weighting,
            };
            let a = povm_normalization_audit(&spec, &params)?;
            Ok(vec![
                order.tag().into(),
                (n as f64).into(),
                a.deviation.into(),
                a.frobenius.into(),
                a.spatial_deviation.into(),
                a.min_eigenvalue.into(),
            ])
        })
        .collect::<Result<_>>()
        .context("covariant POVM")?;
    Ok(ResultTable {
        columns: vec![
            col("order", ONE),
            col("energy_points", ONE),
            col("deviation", ONE),
            col("frobenius", ONE),
            col("spatial_deviation", ONE),
            col("min_eigenvalue", ONE),
        ],
        rows,
        provenance: prov,
        plot: PlotSpec {
            x: "energy_points",
            ys: vec!["deviation", "frobenius"],
            log_y: true,
        },
    })
}
