use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use lasso_tradeoff::boundary::{alpha0, sample_boundary};
use lasso_tradeoff::l0_search::{best_subset, l0_auto_lambda, L0Config, L0Result};
use lasso_tradeoff::lasso_sim::{
    gen_instance_with, path_events, run_replicate, GenOptions, PathConfig, PathEvents, Replicate, SimConfig, StopRule,
};
use lasso_tradeoff::output::{
    fmt_g, fmt_opt, parse_trace_csv, replicate_note, trace_rows, Header, EVENTS_COLUMNS, TRACE_COLUMNS,
};
use lasso_tradeoff::state_evolution::sweep_alpha;
use lasso_tradeoff::{ProblemShape, ScalarGrid, SweepPoint};

use crate::{
    check_reps, layout, write_file, AlphaSpec, BoundaryArgs, EventsArgs, L0Args, LambdaMode, SeCurveArgs, SimulateArgs,
    StopArg, TOOL, VERSION,
};

const AUTO_ALPHA_MAX: f64 = 20.0;
const AUTO_ALPHA_POINTS: usize = 400;

fn header(command: &str) -> Header {
    Header::new(TOOL, VERSION, command)
}

fn seeds(base: u64, reps: usize) -> Result<Vec<u64>> {
    (0..reps as u64)
        .map(|r| {
            base.checked_add(r)
                .ok_or_else(|| anyhow!("seed {base} + {r} overflows u64"))
        })
        .collect()
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building worker pool")
}

pub fn boundary(a: &BoundaryArgs) -> Result<()> {
    let shape = ProblemShape::new(a.delta, a.epsilon)?;
    let samples = sample_boundary(shape, a.n_points)?;
    let mut out = header("boundary")
        .param("delta", a.delta)
        .param("epsilon", a.epsilon)
        .param("n_points", a.n_points)
        .seed(None)
        .note(format!("u_star = {}", fmt_g(shape.u_star())))
        .render();
    out.push_str("u,t_star,q_star\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{}", fmt_g(s.u), fmt_g(s.t_star), fmt_g(s.q_star));
    }
    write_file(&a.out, &out)
}

fn alpha_grid(spec: &AlphaSpec, delta: f64) -> Result<ScalarGrid> {
    Ok(match spec {
        AlphaSpec::Auto => {
            let lo = alpha0(delta)?.max(0.0) + 1e-3;
            ScalarGrid::linspace(lo, AUTO_ALPHA_MAX, AUTO_ALPHA_POINTS)?
        }
        AlphaSpec::Linspace { lo, hi, count } => ScalarGrid::linspace(*lo, *hi, *count)?,
        AlphaSpec::List(v) => ScalarGrid::new(v.clone())?,
    })
}

pub fn se_curve(a: &SeCurveArgs) -> Result<()> {
    let grid = alpha_grid(&a.alpha, a.delta)?;
    let points = sweep_alpha(&a.prior, a.delta, a.sigma, &grid)?;
    let skipped = points.iter().filter(|p| p.solved().is_none()).count();
    let mut out = header("se-curve")
        .param("prior", &a.prior)
        .param("delta", a.delta)
        .param("sigma", a.sigma)
        .param("alpha", &a.alpha)
        .seed(None)
        .note(format!("skipped = {skipped}"))
        .render();
    out.push_str("alpha,tau,lambda,tpp_inf,fdp_inf,fd_inf,td_inf\n");
    for p in &points {
        match p {
            SweepPoint::Solved(s) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    fmt_g(s.alpha),
                    fmt_g(s.tau),
                    fmt_g(s.lambda),
                    fmt_g(s.tpp_inf),
                    fmt_g(s.fdp_inf),
                    fmt_g(s.fd_inf),
                    fmt_g(s.td_inf)
                );
            }
            SweepPoint::Skipped { alpha, reason } => {
                let _ = writeln!(out, "# warning: alpha = {}: {reason}", fmt_g(*alpha));
            }
        }
    }
    if skipped > 0 {
        eprintln!("warning: {skipped} of {} alpha values skipped", points.len());
    }
    write_file(&a.out, &out)
}

fn events_row(rep: usize, e: &PathEvents) -> String {
    format!(
        "{rep},{},{},{},{}\n",
        fmt_opt(e.tpp_at_first_false),
        fmt_opt(e.fdp_at_full_power),
        e.rank_first_false,
        e.perfect_recovery
    )
}

fn events_path(a: &SimulateArgs) -> PathBuf {
    a.events_out.clone().unwrap_or_else(|| {
        let stem = a
            .out
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        a.out.with_file_name(format!("{stem}.events.csv"))
    })
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    check_reps(a.reps)?;
    let cfg = SimConfig {
        n: a.n,
        p: a.p,
        prior: a.prior.clone(),
        sigma: a.sigma,
        grid: a.grid.clone(),
        gen: GenOptions {
            layout: layout(a.exact_counts),
            max_cells: a.max_cells,
        },
        path: PathConfig {
            refine_jump: (a.refine_jump > 0).then_some(a.refine_jump),
            stop: match a.stop {
                StopArg::GridEnd => StopRule::GridEnd,
                StopArg::FullPower => StopRule::FullPower,
                StopArg::EventsResolved => StopRule::EventsResolved,
            },
            ..PathConfig::default()
        },
    };
    // Surface configuration errors once instead of per replicate.
    if a.n.saturating_mul(a.p) > a.max_cells {
        bail!("n·p = {} exceeds the cell cap {}", a.n.saturating_mul(a.p), a.max_cells);
    }
    let seeds = seeds(a.seed, a.reps)?;
    let results: Vec<lasso_tradeoff::Result<Replicate>> =
        pool(a.jobs)?.install(|| seeds.par_iter().map(|&s| run_replicate(&cfg, s)).collect());

    let mut head = header("simulate")
        .param("n", a.n)
        .param("p", a.p)
        .param("prior", &a.prior)
        .param("sigma", a.sigma)
        .param("grid", &a.grid)
        .param("reps", a.reps)
        .param("exact_counts", a.exact_counts)
        .param("refine_jump", a.refine_jump)
        .param("stop", format!("{:?}", a.stop))
        .param("max_cells", a.max_cells)
        .seed(Some(a.seed));
    let mut failed = 0;
    for (rep, (res, seed)) in results.iter().zip(&seeds).enumerate() {
        head = match res {
            Ok(r) => head.note(replicate_note(rep, *seed, r.k)),
            Err(e) => {
                failed += 1;
                eprintln!("warning: replicate {rep} (seed {seed}) failed: {e}");
                head.note(format!("replicate {rep}: seed = {seed}, failed: {e}"))
            }
        };
    }
    let head = head.render();

    let mut trace = format!("{head}{TRACE_COLUMNS}\n");
    let mut events = format!("{head}{EVENTS_COLUMNS}\n");
    for (rep, res) in results.iter().enumerate() {
        if let Ok(r) = res {
            trace.push_str(&trace_rows(rep, &r.trace));
            events.push_str(&events_row(rep, &r.events));
        }
    }
    write_file(&a.out, &trace)?;
    write_file(&events_path(a), &events)?;
    if failed == a.reps {
        bail!("all {failed} replicates failed");
    }
    Ok(())
}

pub fn l0(a: &L0Args) -> Result<()> {
    check_reps(a.reps)?;
    if a.p > a.max_p {
        bail!("p = {} exceeds the enumeration cap {}", a.p, a.max_p);
    }
    if a.n == 0 || a.p == 0 {
        bail!("n and p must be positive");
    }
    let lambda = match a.lambda {
        LambdaMode::Auto => l0_auto_lambda(a.sigma, a.n as f64 / a.p as f64, a.prior.epsilon(), a.c)?,
        LambdaMode::Value(v) => v,
    };
    let mut cfg = L0Config::new(lambda)?;
    cfg.max_p = a.max_p;
    let opts = GenOptions {
        layout: layout(a.exact_counts),
        ..GenOptions::default()
    };
    let seeds = seeds(a.seed, a.reps)?;
    let results: Vec<lasso_tradeoff::Result<(usize, L0Result)>> = pool(a.jobs)?.install(|| {
        seeds
            .par_iter()
            .map(|&s| {
                let inst = gen_instance_with(a.n, a.p, &a.prior, a.sigma, s, &opts)?;
                Ok((inst.k(), best_subset(&inst, &cfg)?))
            })
            .collect()
    });
    let results: Vec<(usize, L0Result)> = results.into_iter().collect::<lasso_tradeoff::Result<_>>()?;
    let successes = results.iter().filter(|(_, r)| r.tpp == 1.0 && r.fdp == 0.0).count();

    let mut out = header("l0")
        .param("n", a.n)
        .param("p", a.p)
        .param("prior", &a.prior)
        .param("sigma", a.sigma)
        .param("lambda", a.lambda)
        .param("c", a.c)
        .param("reps", a.reps)
        .param("exact_counts", a.exact_counts)
        .param("max_p", a.max_p)
        .seed(Some(a.seed))
        .note(format!("lambda_used = {}", fmt_g(lambda)))
        .note(format!(
            "success_rate = {} (TPP = 1 and FDP = 0)",
            fmt_g(successes as f64 / a.reps as f64)
        ));
    for (rep, ((k, _), seed)) in results.iter().zip(&seeds).enumerate() {
        out = out.note(replicate_note(rep, *seed, *k));
    }
    let mut out = out.render();
    out.push_str("rep,support_size,m0,m1,objective,tpp,fdp\n");
    for (rep, (_, r)) in results.iter().enumerate() {
        let _ = writeln!(
            out,
            "{rep},{},{},{},{},{},{}",
            r.support.len(),
            r.m0,
            r.m1,
            fmt_g(r.objective),
            fmt_g(r.tpp),
            fmt_g(r.fdp)
        );
    }
    write_file(&a.out, &out)
}

pub fn events(a: &EventsArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.trace).with_context(|| format!("reading {}", a.trace.display()))?;
    let traces = parse_trace_csv(&text)?;
    let mut head = header("events").param("trace", a.trace.display());
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        head = head.note(format!("source: {}", line.trim_start_matches('#').trim()));
    }
    let mut out = head.seed(None).render();
    out.push_str(EVENTS_COLUMNS);
    out.push('\n');
    for (rep, trace) in &traces {
        out.push_str(&events_row(*rep, &path_events(trace, trace.k)?));
    }
    write_file(&a.out, &out)
}
