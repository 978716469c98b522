use std::fs;
use std::io::Write;
use std::path::PathBuf;

use satharm::analysis::{spectrum, stft, SpectrumFrame, TFMap};
use satharm::error::Result;
use satharm::harmonic_model::DecompositionTable;
use satharm::scenario::{self, CancelModel, CancelOutcome, Resolved, ScenarioConfig, Simulation};
use satharm::signals::{write_binary, write_csv, ComplexSignal};
use satharm::verify::{run_suite, Suite};
use satharm::Error;

use crate::{plot, Common, Failure};

/// Write to stdout, treating a closed pipe as success.
fn emit(text: &str) -> std::io::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

/// Split `--key value` / `--key=value` tokens into pairs.
pub fn parse_overrides(tokens: &[String]) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = tokens.iter();
    while let Some(tok) = it.next() {
        let Some(key) = tok.strip_prefix("--") else {
            return Err(Error::InvalidParameter(format!("expected --key, found '{tok}'")));
        };
        if let Some((k, v)) = key.split_once('=') {
            out.push((k.to_string(), v.to_string()));
        } else {
            let v = it
                .next()
                .ok_or_else(|| Error::InvalidParameter(format!("--{key} needs a value")))?;
            out.push((key.to_string(), v.clone()));
        }
    }
    Ok(out)
}

struct Context {
    cfg: ScenarioConfig,
    resolved: Resolved,
    out_dir: PathBuf,
    plots: bool,
}

fn context(common: &Common) -> std::result::Result<Context, Failure> {
    let mut cfg = match &common.config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => ScenarioConfig::default(),
    };
    cfg.apply(&parse_overrides(&common.overrides)?)?;
    let resolved = cfg.resolve()?;
    let out_dir = cfg.output_dir.clone();
    fs::create_dir_all(&out_dir).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("cannot create {}: {e}", out_dir.display())))
    })?;
    fs::write(out_dir.join("manifest.txt"), resolved.manifest())?;
    Ok(Context { cfg, resolved, out_dir, plots: common.plots })
}

impl Context {
    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn spectrum(&self, x: &ComplexSignal) -> Result<SpectrumFrame> {
        spectrum(x, x.len())?.with_full_scale(self.resolved.full_scale())
    }

    fn tf(&self, x: &ComplexSignal) -> Result<TFMap> {
        stft(x, self.cfg.stft_window, self.cfg.stft_hop)?.with_full_scale(self.resolved.full_scale())
    }

    /// Signal, spectrum and TF map of one series under `stem`.
    fn write_signal_set(&self, stem: &str, x: &ComplexSignal) -> std::result::Result<(), Failure> {
        write_binary(self.path(&format!("{stem}.csig")), x)?;
        write_csv(self.path(&format!("{stem}.csv")), x)?;
        let s = self.spectrum(x)?;
        s.write_csv(self.path(&format!("spectrum_{stem}.csv")))?;
        let tf = self.tf(x)?;
        tf.write_csv(self.path(&format!("tf_{stem}.csv")))?;
        tf.write_binary(self.path(&format!("tf_{stem}.tfg")))?;
        if self.plots {
            plot::spectrum_png(&s, &self.path(&format!("spectrum_{stem}.png")))?;
            plot::tf_png(&tf, &self.path(&format!("tf_{stem}.png")))?;
        }
        Ok(())
    }

    fn simulate(&self) -> Result<Simulation> {
        scenario::simulate(&self.resolved)
    }
}

pub fn simulate(common: &Common) -> std::result::Result<(), Failure> {
    let ctx = context(common)?;
    let sim = ctx.simulate()?;
    ctx.write_signal_set("unsaturated", &sim.unsaturated)?;
    ctx.write_signal_set("saturated", &sim.saturated)?;
    emit(&ctx.resolved.manifest())?;
    emit(&format!("artifacts written to {}\n", ctx.out_dir.display()))?;
    Ok(())
}

fn format_table(table: &DecompositionTable) -> String {
    let threshold = 1e-6 * table.b;
    let mut out = format!("{:>3} {:>3} {:>14} {:>14}  {:<36} significant\n", "m", "n", "beta", "combined", "kind");
    for t in &table.entries {
        let c = t.combined_coefficient();
        out.push_str(&format!(
            "{:>3} {:>3} {:>14.6e} {:>14.6e}  {:<36} {}{}\n",
            t.m,
            t.n,
            t.beta,
            c,
            t.kind.label(),
            if c.abs() > threshold { "yes" } else { "no" },
            if t.converged() { "" } else { " (unconverged)" }
        ));
    }
    out
}

pub fn decompose(common: &Common) -> std::result::Result<(), Failure> {
    let ctx = context(common)?;
    let table = scenario::decompose_scenario(&ctx.resolved, ctx.cfg.max_order)?;
    table.write_csv(ctx.path("decomposition.csv"))?;
    emit(&format_table(&table))?;
    Ok(())
}

fn write_outcome(ctx: &Context, out: &CancelOutcome) -> std::result::Result<(), Failure> {
    let tag = format!("{}_{}_{}", out.model, out.m, out.n);
    ctx.write_signal_set(&format!("reconstruction_{tag}"), &out.reconstruction)?;
    ctx.write_signal_set(&format!("residual_{tag}"), &out.residual)?;
    out.report.write(ctx.path(&format!("report_{tag}.txt")))?;
    Ok(())
}

pub fn cancel(common: &Common, m: u32, n: u32, model: CancelModel) -> std::result::Result<(), Failure> {
    let ctx = context(common)?;
    let sim = ctx.simulate()?;
    let out = scenario::cancel_harmonic(&sim, m, n, model, ctx.cfg.band)?;
    write_outcome(&ctx, &out)?;
    emit(&format!("# model = {model}, harmonic ({m}, {n}), coefficient {}\n", out.coefficient))?;
    emit(&out.report.to_string())?;
    Ok(())
}

pub fn compare(common: &Common, n: u32) -> std::result::Result<(), Failure> {
    let ctx = context(common)?;
    let sim = ctx.simulate()?;
    let cmp = scenario::compare(&sim, n, ctx.cfg.band)?;
    write_outcome(&ctx, &cmp.bessel)?;
    write_outcome(&ctx, &cmp.tanh)?;
    let text = cmp.to_string();
    fs::write(ctx.path("comparison.txt"), &text)?;
    emit(&text)?;
    Ok(())
}

pub fn verify(common: &Common, suite: Suite) -> std::result::Result<(), Failure> {
    let ctx = context(common)?;
    let report = run_suite(suite, &ctx.resolved, ctx.cfg.max_order, ctx.cfg.oracle_grid)?;
    emit(&report.to_string())?;
    fs::write(ctx.path(&format!("verify_{suite}.txt")), report.to_string())?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
