//! Subcommand bodies. Each returns its artifacts; nothing touches the disk
//! until every computation has succeeded.

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use abc_shadow::io::{fmt_f64, write_envelope_csv, write_errors_csv, write_summary_csv};
use abc_shadow::mcmc::abc::{abc_draws, Distance};
use abc_shadow::mcmc::aux::aux_var_mh;
use abc_shadow::mcmc::direct::gaussian_direct_mh;
use abc_shadow::mcmc::pp::PpChain;
use abc_shadow::posterior::{quantile, ErrorEstimates, PosteriorSummary};
use abc_shadow::prelude::*;
use rayon::prelude::*;
use serde_json::json;
use std::result::Result;

use crate::config::{resolve, ExperimentConfig};
use crate::error::CliError;
use crate::ingest::{ingest_pattern, parse_window, Normalization};
use crate::output::Artifacts;
use crate::{Command, ModelKind, PatternArgs, OUT_ENV};

type Res<T> = Result<T, CliError>;

#[derive(Debug)]
pub struct RunReport {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Resolves the config, computes, then writes artifacts and the manifest.
pub fn run(cmd: &Command) -> Res<RunReport> {
    let common = cmd.common();
    let (cfg, doc) = resolve(cmd.name(), common.config.as_deref(), &common.set, common.seed)?;
    let dir = common
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let threads = common.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::config(format!("cannot start {threads} threads: {e}")))?;
    let mut ctx = Ctx { cfg, artifacts: Artifacts::default(), normalization: None };
    pool.install(|| dispatch(cmd, &mut ctx))?;

    let manifest = json!({
        "subcommand": cmd.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": ctx.cfg.seed,
        "threads": pool.current_num_threads(),
        "normalization": ctx.normalization,
        "config": doc,
        "files": ctx.artifacts.names(),
        "created_unix": SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    });
    let files = ctx.artifacts.commit(&dir, &manifest)?;
    Ok(RunReport { dir, files })
}

struct Ctx {
    cfg: ExperimentConfig,
    artifacts: Artifacts,
    normalization: Option<Normalization>,
}

impl Ctx {
    fn rng(&self, stream: u64) -> RngState {
        RngState::new(self.cfg.seed, stream)
    }

    fn t_obs(&self) -> Res<SufficientStatistics> {
        Ok(SufficientStatistics::new(ExperimentConfig::need(&self.cfg.t_obs, "t_obs")?.clone()))
    }

    fn summaries(&mut self, rows: &[(String, &ChainTrace)]) -> Res<()> {
        let sums: Vec<(String, PosteriorSummary)> = rows
            .iter()
            .filter(|(_, t)| t.len() >= 2)
            .map(|(l, t)| Ok((l.clone(), summarize(t, &self.cfg.quantiles)?)))
            .collect::<Res<_>>()?;
        if sums.is_empty() {
            return Ok(());
        }
        let refs: Vec<(String, &PosteriorSummary)> = sums.iter().map(|(l, s)| (l.clone(), s)).collect();
        let mut buf = Vec::new();
        write_summary_csv(&refs, &mut buf)?;
        self.artifacts.add("summary.csv", buf);
        Ok(())
    }

    /// Pattern from `--input` or the config, with its window resolved.
    fn pattern(&mut self, args: &PatternArgs) -> Res<Option<PointPattern>> {
        let src = self.cfg.pattern.clone();
        let path = match (&args.input, &src) {
            (Some(p), _) => p.clone(),
            (None, Some(s)) => s.path.clone(),
            (None, None) => return Ok(None),
        };
        let window = match &args.window {
            Some(w) => Some(parse_window(w)?),
            None => src
                .as_ref()
                .and_then(|s| s.window)
                .or_else(|| self.cfg.model.as_ref().and_then(|m| m.window().copied())),
        };
        let normalize = args.normalize || src.as_ref().is_some_and(|s| s.normalize);
        let (pattern, norm) = ingest_pattern(&path, window, normalize)?;
        self.normalization = norm;
        Ok(Some(pattern))
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Res<()> {
    match cmd {
        Command::GaussianBench(_) => gaussian_bench(ctx),
        Command::StraussBench(_) | Command::CandyBench(_) => point_process_bench(ctx),
        Command::AnalyzePattern { pattern, model, r, .. } => analyze_pattern(ctx, pattern, *model, r),
        Command::Envelope { pattern, .. } => envelope(ctx, pattern),
        Command::Errors(_) => errors(ctx),
        Command::DeltaSweep(_) => delta_sweep(ctx),
        Command::Shadow { pattern, .. } => shadow(ctx, pattern),
        Command::AbcReject(_) => abc(ctx, false),
        Command::AbcKnn(_) => abc(ctx, true),
        Command::AuxMh(_) => aux_mh(ctx),
    }
}

fn gaussian_bench(ctx: &mut Ctx) -> Res<()> {
    let model = ctx.cfg.model()?.clone();
    let ModelSpec::Gaussian { m } = model else {
        return Err(CliError::config("gaussian-bench needs a gaussian model"));
    };
    let t = ctx.t_obs()?;
    let direct = ExperimentConfig::need(&ctx.cfg.direct, "direct")?;
    let shadow = ExperimentConfig::need(&ctx.cfg.shadow, "shadow")?;
    let mh = gaussian_direct_mh(&t, m, direct, &mut ctx.rng(0))?;
    let sh = abc_shadow_run(&model, &t, shadow, &mut ctx.rng(1))?;
    ctx.artifacts.add_trace("mh", &mh)?;
    ctx.artifacts.add_trace("abc-shadow", &sh)?;
    ctx.summaries(&[("mh".into(), &mh), ("abc-shadow".into(), &sh)])
}

fn delta_sweep(ctx: &mut Ctx) -> Res<()> {
    let model = ctx.cfg.model()?.clone();
    let t = ctx.t_obs()?;
    let base = ExperimentConfig::need(&ctx.cfg.shadow, "shadow")?.clone();
    let runs = ExperimentConfig::need(&ctx.cfg.sweep, "sweep")?.clone();
    let seed = ctx.cfg.seed;
    let traces = runs
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let c = ShadowConfig { delta: r.delta.clone(), initial: r.initial.clone(), ..base.clone() };
            abc_shadow_run(&model, &t, &c, &mut RngState::new(seed, i as u64))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for (i, (r, tr)) in runs.iter().zip(&traces).enumerate() {
        ctx.artifacts.add_trace(&format!("run{i}"), tr)?;
        let join = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(":");
        rows.push((format!("delta={} theta0={}", join(&r.delta), join(r.initial.values())), tr));
    }
    ctx.summaries(&rows)
}

fn point_process_bench(ctx: &mut Ctx) -> Res<()> {
    let model = ctx.cfg.model()?.clone();
    if !model.is_point_process() {
        return Err(CliError::config("this bench needs a point-process model"));
    }
    if let Some(fw) = ctx.cfg.forward.clone() {
        fw.aux.validate()?;
        let mut rng = ctx.rng(0);
        let mut chain = PpChain::empty(&model)?;
        chain.run(&fw.theta, fw.aux.burn_in_steps(), &fw.aux, &mut rng)?;
        let mut stats = Vec::with_capacity(fw.samples);
        for _ in 0..fw.samples {
            chain.run(&fw.theta, fw.aux.sweeps, &fw.aux, &mut rng)?;
            stats.push(chain.statistics().values().to_vec());
        }
        let n = stats.len().max(1) as f64;
        let mut csv = String::from("statistic,mean,sd,samples\n");
        for (i, name) in model.stat_names().iter().enumerate() {
            let mean = stats.iter().map(|s| s[i]).sum::<f64>() / n;
            let sd = (stats.iter().map(|s| (s[i] - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
            csv.push_str(&format!("{name},{},{},{}\n", fmt_f64(mean), fmt_f64(sd), stats.len()));
        }
        ctx.artifacts.add("forward.csv", csv.into_bytes());
    }
    if let Some(shadow) = ctx.cfg.shadow.clone() {
        let t = ctx.t_obs()?;
        let tr = abc_shadow_run(&model, &t, &shadow, &mut ctx.rng(1))?;
        ctx.artifacts.add_trace("abc-shadow", &tr)?;
        ctx.summaries(&[("abc-shadow".into(), &tr)])?;
    }
    Ok(())
}

/// The model with its interaction range replaced by `r`.
fn with_range(model: &ModelSpec, r: f64) -> Res<ModelSpec> {
    let m = match model {
        ModelSpec::Strauss { window, .. } => ModelSpec::Strauss { r, window: *window },
        ModelSpec::AreaInteraction { r: r0, resolution, window } => {
            ModelSpec::AreaInteraction { r, resolution: resolution / r0 * r, window: *window }
        }
        _ => return Err(CliError::config(format!("ranges cannot be swept for the {} model", model.name()))),
    };
    m.validate()?;
    Ok(m)
}

fn on_window(model: &ModelSpec, w: Window) -> ModelSpec {
    match model.clone() {
        ModelSpec::Strauss { r, .. } => ModelSpec::Strauss { r, window: w },
        ModelSpec::Candy { params, .. } => ModelSpec::Candy { params, window: w },
        ModelSpec::AreaInteraction { r, resolution, .. } => ModelSpec::AreaInteraction { r, resolution, window: w },
        g => g,
    }
}

fn range_label(r: Option<f64>) -> String {
    r.map_or_else(|| "all".to_string(), |r| format!("r={}", fmt_f64(r)))
}

/// One `(label, model, t_obs)` per range, from a pattern or from `t_obs`.
fn observations(
    ctx: &mut Ctx,
    args: &PatternArgs,
    base: &ModelSpec,
) -> Res<Vec<(String, ModelSpec, SufficientStatistics)>> {
    let pattern = ctx.pattern(args)?;
    let ranges: Vec<Option<f64>> = match &ctx.cfg.ranges {
        Some(rs) if !rs.is_empty() => rs.iter().map(|r| Some(*r)).collect(),
        _ => vec![None],
    };
    let mut out = Vec::new();
    for r in ranges {
        let mut model = match r {
            Some(r) => with_range(base, r)?,
            None => base.clone(),
        };
        let t = match &pattern {
            Some(p) => {
                model = on_window(&model, *p.window());
                let obs = if matches!(model, ModelSpec::Gaussian { .. }) {
                    return Err(CliError::config("a gaussian model takes t_obs, not a pattern"));
                } else {
                    Observation::Pattern(p)
                };
                sufficient_statistics(&model, obs)?
            }
            None if r.is_none() => ctx.t_obs()?,
            None => return Err(CliError::config("sweeping ranges needs a pattern to compute statistics from")),
        };
        out.push((range_label(r), model, t));
    }
    Ok(out)
}

fn statistics_csv(rows: &[(String, ModelSpec, SufficientStatistics)]) -> Vec<u8> {
    let mut csv = String::from("label,model,r,statistic,value\n");
    for (label, m, t) in rows {
        let r = m.interaction_range().map(fmt_f64).unwrap_or_default();
        for (name, v) in m.stat_names().iter().zip(t.values()) {
            csv.push_str(&format!("{label},{},{r},{name},{}\n", m.name(), fmt_f64(*v)));
        }
    }
    csv.into_bytes()
}

fn analyze_pattern(ctx: &mut Ctx, args: &PatternArgs, kind: Option<ModelKind>, r: &[f64]) -> Res<()> {
    if !r.is_empty() {
        ctx.cfg.ranges = Some(r.to_vec());
    }
    let unit = Window::unit_square();
    let rr = r.first().copied().unwrap_or(0.05);
    let base = match (kind, &ctx.cfg.model) {
        (Some(ModelKind::Strauss), _) => ModelSpec::Strauss { r: rr, window: unit },
        (Some(ModelKind::Area), _) => ModelSpec::AreaInteraction { r: rr, resolution: rr / 50.0, window: unit },
        (Some(ModelKind::Candy), Some(m @ ModelSpec::Candy { .. })) => m.clone(),
        (Some(ModelKind::Candy), _) => {
            return Err(CliError::config("candy geometry must come from the config `model`"))
        }
        (None, Some(m)) => m.clone(),
        (None, None) => return Err(CliError::config("pass --model or give a `model` in the config")),
    };
    if ctx.cfg.pattern.is_none() && args.input.is_none() {
        return Err(CliError::config("analyze-pattern needs --input or a `pattern` in the config"));
    }
    let rows = observations(ctx, args, &base)?;
    ctx.artifacts.add("statistics.csv", statistics_csv(&rows));
    Ok(())
}

fn envelope(ctx: &mut Ctx, args: &PatternArgs) -> Res<()> {
    let settings = ExperimentConfig::need(&ctx.cfg.summaries, "summaries")?.clone();
    let pattern = ctx.pattern(args)?.ok_or_else(|| CliError::config("envelope needs --input or a `pattern`"))?;
    let env = envelope_test(&pattern, settings.n_sim, &settings.u, &ctx.rng(0))?;
    let mut buf = Vec::new();
    write_envelope_csv(&env, &mut buf)?;
    ctx.artifacts.add("envelope.csv", buf);
    Ok(())
}

fn errors(ctx: &mut Ctx) -> Res<()> {
    let base = ctx.cfg.model()?.clone();
    let settings = ExperimentConfig::need(&ctx.cfg.errors, "errors")?.clone();
    let ranges: Vec<Option<f64>> = match &ctx.cfg.ranges {
        Some(rs) if !rs.is_empty() => rs.iter().map(|r| Some(*r)).collect(),
        _ => vec![None],
    };
    if settings.theta_hat.len() != ranges.len() {
        return Err(CliError::config(format!(
            "errors.theta_hat has {} entries for {} ranges",
            settings.theta_hat.len(),
            ranges.len()
        )));
    }
    let seed = ctx.cfg.seed;
    let results = ranges
        .par_iter()
        .zip(&settings.theta_hat)
        .enumerate()
        .map(|(i, (r, th))| {
            let model = match r {
                Some(r) => with_range(&base, *r)?,
                None => base.clone(),
            };
            Ok((
                range_label(*r),
                error_estimates(&model, th, settings.n_sim, &settings.aux, &mut RngState::new(seed, i as u64))?,
            ))
        })
        .collect::<Res<Vec<(String, ErrorEstimates)>>>()?;
    let refs: Vec<(String, &ErrorEstimates)> = results.iter().map(|(l, e)| (l.clone(), e)).collect();
    let mut buf = Vec::new();
    write_errors_csv(&refs, &mut buf)?;
    ctx.artifacts.add("errors.csv", buf);
    Ok(())
}

fn shadow(ctx: &mut Ctx, args: &PatternArgs) -> Res<()> {
    let base = ctx.cfg.model()?.clone();
    let config = ExperimentConfig::need(&ctx.cfg.shadow, "shadow")?.clone();
    let obs = observations(ctx, args, &base)?;
    let seed = ctx.cfg.seed;
    let traces = obs
        .par_iter()
        .enumerate()
        .map(|(i, (_, m, t))| abc_shadow_run(m, t, &config, &mut RngState::new(seed, i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    ctx.artifacts.add("observed.csv", statistics_csv(&obs));
    let mut rows = Vec::new();
    for (i, ((label, _, _), tr)) in obs.iter().zip(&traces).enumerate() {
        let name = if obs.len() == 1 { "abc-shadow".to_string() } else { format!("run{i}") };
        ctx.artifacts.add_trace(&name, tr)?;
        rows.push((label.clone(), tr));
    }
    ctx.summaries(&rows)
}

fn abc(ctx: &mut Ctx, knn: bool) -> Res<()> {
    let model = ctx.cfg.model()?.clone();
    let t = ctx.t_obs()?;
    let s = ExperimentConfig::need(&ctx.cfg.abc, "abc")?.clone();
    let start = Instant::now();
    let distance = if s.pilot > 0 {
        Distance::from_pilot(&model, &s.prior, s.pilot, &s.aux, &ctx.rng(1))?
    } else {
        Distance::Euclidean
    };
    let mut draws = abc_draws(&model, &t, &s.prior, s.n_draws, &distance, &s.aux, &ctx.rng(0))?;
    let (algorithm, tolerance) = if knn {
        let k = *ExperimentConfig::need(&s.k, "abc.k")?;
        if k == 0 || k > s.n_draws {
            return Err(CliError::config(format!("abc.k must lie in [1, {}], got {k}", s.n_draws)));
        }
        draws.sort_by(|a, b| a.distance.total_cmp(&b.distance));
        draws.truncate(k);
        ("abc-knn", draws.last().map(|d| d.distance))
    } else {
        let eps = match (s.epsilon, s.quantile) {
            (Some(e), _) => e,
            (None, Some(q)) => {
                let mut d: Vec<f64> = draws.iter().map(|d| d.distance).filter(|d| d.is_finite()).collect();
                if d.is_empty() {
                    return Err(CliError::input("no finite distances to calibrate the tolerance"));
                }
                d.sort_by(f64::total_cmp);
                quantile(&d, q)
            }
            (None, None) => return Err(CliError::config("abc-reject needs abc.epsilon or abc.quantile")),
        };
        draws.retain(|d| d.distance <= eps);
        ("abc-rejection", Some(eps))
    };
    let trace = ChainTrace {
        algorithm: algorithm.into(),
        names: model.param_names().iter().map(|s| s.to_string()).collect(),
        acceptance_rate: draws.len() as f64 / s.n_draws.max(1) as f64,
        samples: draws.into_iter().map(|d| d.theta).collect(),
        seed: ctx.cfg.seed,
        stream: 0,
        config: json!({ "model": model, "t_obs": t, "abc": s, "distance": distance, "tolerance": tolerance }),
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    ctx.artifacts.add_trace(algorithm, &trace)?;
    ctx.summaries(&[(algorithm.into(), &trace)])
}

fn aux_mh(ctx: &mut Ctx) -> Res<()> {
    let model = ctx.cfg.model()?.clone();
    let t = ctx.t_obs()?;
    let c = ExperimentConfig::need(&ctx.cfg.aux_mh, "aux_mh")?.clone();
    let tr = aux_var_mh(&model, &t, &c, &mut ctx.rng(0))?;
    ctx.artifacts.add_trace("aux-mh", &tr)?;
    ctx.summaries(&[("aux-mh".into(), &tr)])
}
