//! Thin adapters from parsed arguments to library calls.

use glasner_core::arith::{count_power_full, enumerate_power_full, factorize};
use glasner_core::expsum::{
    self, bound_report, decompose_modulus, exhaustive_size, extremal_scan, finish_extremal,
    merge_best, refined_bound_gcd, unrank, ExtremalResult, SearchMode, SumSpec, Twiddles,
};
use glasner_core::glasner::{
    assemble_search, bad_set_functional, certify_dilation, check_nondegenerate, hq_histogram,
    k_bound_new, k_bound_prior, m_cutoff, proof_pipeline_report, r_opt, BvecStrategy,
    GlasnerSearchResult, KBoundExponents, PolyMatrix, SearchConfig,
};
use glasner_core::torus::{certify_density, PointSet, Verdict};
use glasner_core::{Budget, Rat};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cli::*;
use crate::error::{CliError, CliResult};
use crate::formats::{parse_matrix, parse_point_set, point_to_json, read_file};
use crate::output::{float_cell, opt_cell, Table};

/// What a command hands back before timing and rendering.
pub struct CommandOutput {
    pub name: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub table: Option<Table>,
}

/// Settings shared by all commands.
pub struct Context {
    pub seed: u64,
    pub budget: Budget,
}

pub fn dispatch(cmd: &Command, ctx: &Context) -> CliResult<CommandOutput> {
    match cmd {
        Command::Expsum { command } => match command {
            ExpsumCommand::Eval { e, q, f, method } => expsum_eval(*e, *q, f, *method, ctx),
            ExpsumCommand::Extremal {
                e,
                q,
                q_max,
                mode,
                samples,
            } => expsum_extremal(*e, *q, *q_max, *mode, *samples, ctx),
        },
        Command::Modulus {
            command: ModulusCommand::Decompose { q, e },
        } => modulus_decompose(*q, *e),
        Command::Powerfull { command } => match command {
            PowerfullCommand::List { nu, lo, hi } => powerfull_list(*nu, *lo, *hi, ctx),
            PowerfullCommand::Count { nu, x } => powerfull_count(*nu, *x),
        },
        Command::Torus {
            command: TorusCommand::Density { set, density },
        } => torus_density(set, density),
        Command::Glasner { command } => match command {
            GlasnerCommand::Search {
                matrix,
                set,
                n_max,
                density,
            } => glasner_search(matrix, set, *n_max, density),
            GlasnerCommand::Hq { set } => glasner_hq(set),
            GlasnerCommand::Functional {
                matrix,
                set,
                eps,
                strategy,
            } => glasner_functional(matrix, set, eps, *strategy, ctx),
            GlasnerCommand::CheckMatrix { matrix, box_bound } => check_matrix(matrix, *box_bound),
        },
        Command::Bounds { command } => match command {
            BoundsCommand::K { params } => bounds_k(params),
            BoundsCommand::Pipeline { params, k, r } => bounds_pipeline(params, *k, *r),
        },
    }
}

pub fn parse_eps(s: &str) -> CliResult<Rat> {
    let eps: Rat = s
        .parse()
        .map_err(|e: glasner_core::Error| CliError::validation(e.to_string()).at("--eps"))?;
    if eps <= Rat::ZERO {
        return Err(CliError::validation(format!("'{s}' must be positive")).at("--eps"));
    }
    Ok(eps)
}

pub fn load_set(path: &str) -> CliResult<PointSet> {
    parse_point_set(&read_file(path)?).map_err(|e| e.at(&format!("--set {path}")))
}

pub fn load_matrix(path: &str) -> CliResult<PolyMatrix> {
    parse_matrix(&read_file(path)?).map_err(|e| e.at(&format!("--matrix {path}")))
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Dense => "dense",
        Verdict::NotDense => "not_dense",
        Verdict::Unknown => "unknown",
    }
}

fn rat_json(r: Option<Rat>) -> Value {
    r.map(|x| Value::String(x.to_string()))
        .unwrap_or(Value::Null)
}

fn expsum_eval(
    e: u32,
    q: u64,
    f: &[i128],
    method: Method,
    ctx: &Context,
) -> CliResult<CommandOutput> {
    if f.len() != e as usize {
        return Err(CliError::validation(format!(
            "--f: got {} coefficients, expected e = {e}",
            f.len()
        )));
    }
    let spec = SumSpec::new(f.to_vec(), q)?;
    let value = match method {
        Method::Auto => expsum::eval_auto(&spec, &ctx.budget)?,
        Method::Direct => expsum::eval_direct_limited(&spec, ctx.budget.direct_terms)?,
        Method::Crt => expsum::eval_crt_limited(&spec, &factorize(q)?, ctx.budget.total_terms)?,
    };
    let report = bound_report(&spec, value.norm())?;
    let refined_gcd = if e >= 2 {
        Some(refined_bound_gcd(
            &decompose_modulus(q, e)?,
            report.content,
        )?)
    } else {
        None
    };
    Ok(CommandOutput {
        name: "expsum eval",
        inputs: json!({ "e": e, "q": q, "f": f, "method": format!("{method:?}").to_lowercase() }),
        results: json!({
            "re": value.re,
            "im": value.im,
            "abs": report.abs_sum,
            "content": report.content,
            "hua": report.hua,
            "hua_content": expsum::hua_bound_content(q, e, report.content),
            "refined": report.refined,
            "refined_gcd": refined_gcd,
            "weil": report.weil,
        }),
        table: None,
    })
}

/// Exhaustive search split across the thread pool; the merge is order
/// independent, so the result equals the sequential one.
pub fn extremal_exhaustive_parallel(q: u64, e: u32) -> CliResult<ExtremalResult> {
    if q == 0 || e == 0 {
        return Err(CliError::validation("q and e must be positive"));
    }
    let size = exhaustive_size(q, e)?;
    let tw = Twiddles::new(q)?;
    let chunk = (size / (rayon::current_num_threads() as u64 * 16)).max(1024);
    let best = (0..size.div_ceil(chunk))
        .into_par_iter()
        .map(|c| extremal_scan(&tw, e, c * chunk..((c + 1) * chunk).min(size)))
        .reduce(|| None, merge_best);
    Ok(finish_extremal(
        q,
        best.map(|(v, idx)| (v, unrank(idx, q, e))),
        size,
    )?)
}

fn expsum_extremal(
    e: u32,
    q: u64,
    q_max: Option<u64>,
    mode: Mode,
    samples: u64,
    ctx: &Context,
) -> CliResult<CommandOutput> {
    let last = q_max.unwrap_or(q);
    if last < q {
        return Err(CliError::validation(format!(
            "--q-max {last} is below --q {q}"
        )));
    }
    let mut rows = Vec::new();
    let mut table = Table::new(&[
        "q",
        "e",
        "max_abs",
        "argmax",
        "evaluated",
        "hua",
        "refined",
        "weil",
    ]);
    for modulus in q..=last {
        let res = match mode {
            Mode::Exhaustive => extremal_exhaustive_parallel(modulus, e)?,
            Mode::Random => expsum::extremal_search(
                modulus,
                e,
                SearchMode::Random {
                    samples,
                    seed: ctx.seed,
                },
            )?,
        };
        table.push(vec![
            modulus.to_string(),
            e.to_string(),
            float_cell(res.max_abs),
            res.argmax
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(" "),
            res.evaluated.to_string(),
            float_cell(res.report.hua),
            float_cell(res.report.refined),
            opt_cell(res.report.weil.map(float_cell)),
        ]);
        rows.push(json!({
            "q": modulus,
            "e": e,
            "max_abs": res.max_abs,
            "argmax": res.argmax,
            "evaluated": res.evaluated,
            "hua": res.report.hua,
            "refined": res.report.refined,
            "weil": res.report.weil,
        }));
    }
    let mode_name = match mode {
        Mode::Exhaustive => "exhaustive",
        Mode::Random => "random",
    };
    Ok(CommandOutput {
        name: "expsum extremal",
        inputs: json!({ "e": e, "q": q, "q_max": last, "mode": mode_name, "samples": samples, "seed": ctx.seed }),
        results: json!({ "rows": rows }),
        table: Some(table),
    })
}

fn modulus_decompose(q: u64, e: u32) -> CliResult<CommandOutput> {
    let dec = decompose_modulus(q, e)?;
    let mut parts = serde_json::Map::new();
    if e == 2 {
        parts.insert("q2".into(), json!(dec.parts()[0]));
        parts.insert("q2_cube_full".into(), json!(dec.parts()[1]));
    } else {
        for (i, v) in dec.indexed_parts() {
            parts.insert(format!("q{i}"), json!(v));
        }
    }
    Ok(CommandOutput {
        name: "modulus decompose",
        inputs: json!({ "q": q, "e": e }),
        results: Value::Object(parts),
        table: None,
    })
}

fn powerfull_list(nu: u32, lo: u64, hi: u64, ctx: &Context) -> CliResult<CommandOutput> {
    // members up to hi number roughly 2.2 hi^(1/nu)
    let estimate = 3u128 * glasner_core::arith::iroot(hi, nu.max(1)) as u128;
    if estimate > ctx.budget.total_terms as u128 {
        return Err(glasner_core::Error::BudgetExceeded {
            what: "power-full listing",
            needed: estimate,
            limit: ctx.budget.total_terms,
        }
        .into());
    }
    let set = enumerate_power_full(nu, lo, hi)?;
    let mut table = Table::new(&["n"]);
    for m in &set.members {
        table.push(vec![m.to_string()]);
    }
    Ok(CommandOutput {
        name: "powerfull list",
        inputs: json!({ "nu": nu, "lo": lo, "hi": hi }),
        results: json!({ "count": set.len(), "members": set.members }),
        table: Some(table),
    })
}

fn powerfull_count(nu: u32, x: u64) -> CliResult<CommandOutput> {
    let count = count_power_full(nu, x)?;
    Ok(CommandOutput {
        name: "powerfull count",
        inputs: json!({ "nu": nu, "x": x }),
        results: json!({
            "count": count,
            "ratio": count as f64 / (x as f64).powf(1.0 / nu as f64),
        }),
        table: None,
    })
}

fn search_config(d: &DensityArgs, eps: &Rat) -> CliResult<SearchConfig> {
    let mesh = d.mesh.unwrap_or_else(|| (eps.to_f64() / 2.0).min(0.05));
    if mesh.is_nan() || mesh <= 0.0 {
        return Err(CliError::validation("--mesh must be positive"));
    }
    Ok(SearchConfig {
        mesh,
        max_rounds: d.rounds,
    })
}

fn torus_density(set: &str, d: &DensityArgs) -> CliResult<CommandOutput> {
    let s = load_set(set)?;
    let eps = parse_eps(&d.eps)?;
    let cfg = search_config(d, &eps)?;
    let cert = certify_density(&s, &eps, cfg.mesh, cfg.max_rounds)?;
    Ok(CommandOutput {
        name: "torus density",
        inputs: json!({ "set": set, "eps": eps.to_string(), "mesh": cfg.mesh, "rounds": cfg.max_rounds }),
        results: json!({
            "verdict": verdict_name(cert.verdict),
            "covering_radius": rat_json(cert.covering_radius),
            "witness": cert.witness.as_ref().map(point_to_json),
            "witness_distance": cert.witness_distance,
            "mesh": cert.mesh,
            "dim": s.dim(),
            "k": s.len(),
        }),
        table: None,
    })
}

/// Certifies `n = 1, 2, …` in batches across the thread pool and stops
/// after the batch holding the first dense `n`; the trace is the one the
/// sequential scan produces.
pub fn search_parallel(
    a: &PolyMatrix,
    s: &PointSet,
    eps: &Rat,
    n_max: u64,
    cfg: &SearchConfig,
) -> CliResult<GlasnerSearchResult> {
    if n_max == 0 {
        return Err(CliError::validation("--n-max must be positive"));
    }
    let batch = rayon::current_num_threads() as u64 * 2;
    let mut trace = Vec::new();
    let mut start = 1u64;
    'outer: while start <= n_max {
        let end = start.saturating_add(batch - 1).min(n_max);
        let results: Vec<_> = (start..=end)
            .into_par_iter()
            .map(|n| certify_dilation(a, s, eps, n, cfg))
            .collect();
        for r in results {
            let entry = r?;
            let dense = entry.verdict == Verdict::Dense;
            trace.push(entry);
            if dense {
                break 'outer;
            }
        }
        start = end + 1;
    }
    Ok(assemble_search(trace, *eps, n_max))
}

fn glasner_search(
    matrix: &str,
    set: &str,
    n_max: u64,
    d: &DensityArgs,
) -> CliResult<CommandOutput> {
    let a = load_matrix(matrix)?;
    let s = load_set(set)?;
    if a.dim() != s.dim() {
        return Err(CliError::validation(format!(
            "matrix is {0}x{0} but the set lives in dimension {1}",
            a.dim(),
            s.dim()
        )));
    }
    let eps = parse_eps(&d.eps)?;
    let cfg = search_config(d, &eps)?;
    let res = search_parallel(&a, &s, &eps, n_max, &cfg)?;
    let trace: Vec<Value> = res
        .trace
        .iter()
        .map(|t| {
            json!({
                "n": t.n,
                "verdict": verdict_name(t.verdict),
                "covering_radius": rat_json(t.covering_radius),
                "witness_distance": t.witness_distance,
                "mesh": t.mesh,
                "support": t.support,
            })
        })
        .collect();
    Ok(CommandOutput {
        name: "glasner search",
        inputs: json!({
            "matrix": matrix, "set": set, "eps": eps.to_string(), "n_max": n_max,
            "mesh": cfg.mesh, "rounds": cfg.max_rounds,
        }),
        results: json!({
            "minimal_n": res.minimal_n,
            "first_dense": res.first_dense,
            "unresolved": res.unresolved,
            "trace": trace,
        }),
        table: None,
    })
}

fn glasner_hq(set: &str) -> CliResult<CommandOutput> {
    let s = load_set(set)?;
    let h = hq_histogram(&s)?;
    let mut table = Table::new(&["q", "h_q"]);
    let rows: Vec<Value> = h
        .entries
        .iter()
        .map(|(&q, &c)| {
            table.push(vec![q.to_string(), c.to_string()]);
            json!({ "q": q, "h_q": c })
        })
        .collect();
    Ok(CommandOutput {
        name: "glasner hq",
        inputs: json!({ "set": set }),
        results: json!({ "k": h.k, "dim": h.dim, "total": h.total(), "histogram": rows }),
        table: Some(table),
    })
}

fn glasner_functional(
    matrix: &str,
    set: &str,
    eps: &str,
    strategy: Strategy,
    ctx: &Context,
) -> CliResult<CommandOutput> {
    let a = load_matrix(matrix)?;
    let s = load_set(set)?;
    let eps = parse_eps(eps)?;
    let (strategy, name) = match strategy {
        Strategy::FirstPair => (BvecStrategy::FirstPair, "first-pair"),
        Strategy::MaxOverPairs => (BvecStrategy::MaxOverPairs, "max-over-pairs"),
    };
    let rep = bad_set_functional(&s, &a, &eps, strategy, &ctx.budget)?;
    let terms: Vec<Value> = rep
        .terms
        .iter()
        .map(|t| {
            json!({
                "q": t.q,
                "h_q": t.h_q,
                "b": t.b.iter().map(|&x| x as i64).collect::<Vec<_>>(),
                "sum_abs": t.sum_abs,
            })
        })
        .collect();
    Ok(CommandOutput {
        name: "glasner functional",
        inputs: json!({ "matrix": matrix, "set": set, "eps": eps.to_string(), "strategy": name }),
        results: json!({
            "M": rep.m_cutoff,
            "frequencies": rep.frequencies,
            "lhs": rep.lhs as u64,
            "rhs": rep.rhs,
            "main_sum": rep.main_sum,
            "trailing": rep.trailing,
            "terms": terms,
        }),
        table: None,
    })
}

fn check_matrix(matrix: &str, box_bound: u64) -> CliResult<CommandOutput> {
    let a = load_matrix(matrix)?;
    let rep = check_nondegenerate(&a, box_bound).map_err(|e| CliError::from(e).at("--box"))?;
    Ok(CommandOutput {
        name: "glasner check-matrix",
        inputs: json!({ "matrix": matrix, "box": box_bound }),
        results: json!({
            "dim": a.dim(),
            "degree": rep.degree,
            "height": rep.height,
            "pairs_checked": rep.pairs_checked,
            "clear_in_box": rep.is_clear(),
            "witness": rep.witness.map(|(u, v)| json!({ "u": u, "v": v })),
        }),
        table: None,
    })
}

fn exponents_json(x: KBoundExponents) -> Value {
    json!({ "H": x.height(), "eps": x.eps() })
}

fn bounds_k(p: &BoundParams) -> CliResult<CommandOutput> {
    let eps = parse_eps(&p.eps)?;
    let prior = k_bound_prior(p.d, p.e, p.height, &eps)?;
    let new = k_bound_new(p.d, p.e, p.height, &eps)?;
    let r = r_opt(p.d, p.e, p.height, &eps, p.c)?;
    Ok(CommandOutput {
        name: "bounds k",
        inputs: json!({ "d": p.d, "e": p.e, "H": p.height, "eps": eps.to_string(), "C": p.c }),
        results: json!({
            "prior": prior.value,
            "prior_log10": prior.log10,
            "new": new.value,
            "new_log10": new.log10,
            "r_opt": r,
            "M": m_cutoff(p.d as usize, &eps)?,
            "exponents": {
                "prior": exponents_json(KBoundExponents::prior(p.d, p.e)),
                "new": exponents_json(KBoundExponents::improved(p.d, p.e)),
            },
        }),
        table: None,
    })
}

fn bounds_pipeline(p: &BoundParams, k: u64, r: Option<f64>) -> CliResult<CommandOutput> {
    let eps = parse_eps(&p.eps)?;
    let r = match r {
        Some(r) => r,
        None => r_opt(p.d, p.e, p.height, &eps, p.c)?,
    };
    let rep = proof_pipeline_report(p.d, p.e, p.height, &eps, r, k)?;
    Ok(CommandOutput {
        name: "bounds pipeline",
        inputs: json!({ "d": p.d, "e": p.e, "H": p.height, "eps": eps.to_string(), "C": p.c, "k": k, "R": r }),
        results: json!({
            "M": rep.m_cutoff,
            "s1": rep.s1_envelope,
            "s2": rep.s2_envelope,
            "trailing": rep.trailing,
            "combined": rep.combined,
            "lhs": rep.lhs,
        }),
        table: None,
    })
}
