use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use radbkg::analysis::{
    fit_exponential, fit_linear, fit_power_law, spectrum_mode, summarize_spectrum, FitRecord, SpectrumRates, Weighting,
    M_THRESHOLD_KEV,
};
use radbkg::phase_space::PhaseSpace;
use radbkg::pipeline::{run_cosmic, run_deposition, run_gamma, Stage, StageResult};
use radbkg::rate_model::{compute_rates, RateReport, RateTriple, SourceId};
use radbkg::species::Species;

use crate::config::Config;
use crate::units::{parse_quantity, split_number, Dim};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "radbkg", version, about = "Natural-radiation background rates in device substrates")]
pub struct Cli {
    /// Configuration file; built-in nominal values when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random stream (overrides mc.seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo runs (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Print the rate-model parameters in effect and exit.
    #[arg(long)]
    pub print_params: bool,
    /// Print the effective configuration in file format and exit.
    #[arg(long)]
    pub dump_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StageArg {
    Gamma,
    Cosmic,
}

impl From<StageArg> for Stage {
    fn from(s: StageArg) -> Stage {
        match s {
            StageArg::Gamma => Stage::Gamma,
            StageArg::Cosmic => Stage::Cosmic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Thickness,
    Elevation,
    Ceiling,
    Material,
    Size,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form rates with the per-source breakdown.
    Estimate,
    /// Two-stage Monte Carlo for one source class.
    Simulate {
        #[arg(long, value_enum)]
        stage: StageArg,
        /// Stage-1 histories (overrides mc.histories).
        #[arg(short = 'n', long)]
        histories: Option<u64>,
        /// Re-aimed copies per stage-1 history (overrides mc.copies).
        #[arg(long)]
        copies: Option<u32>,
        /// Output directory (overrides output.directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Restrict cosmic species, e.g. `mu-,mu+`.
        #[arg(long, value_delimiter = ',')]
        species: Vec<String>,
    },
    /// Re-aim and deposit a saved stage-1 phase space.
    Deposit {
        phase_space: PathBuf,
        #[arg(long)]
        copies: Option<u32>,
        /// Spectrum file to write.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vary one parameter, tabulate rates and fit the scaling law.
    Sweep {
        #[arg(long = "param", value_enum, required = true)]
        params: Vec<SweepParam>,
        /// Comma-separated values with units, e.g. `30um,100um`; material
        /// names; sizes as `10x1mm`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        /// Also run the Monte Carlo for this stage at every point.
        #[arg(long, value_enum)]
        mc: Option<StageArg>,
        #[arg(short = 'n', long)]
        histories: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        species: Vec<String>,
        /// Weight fits by Poisson statistics instead of uniformly.
        #[arg(long)]
        poisson: bool,
        /// Also write the table to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn load_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.mc.seed = seed;
    }
    Ok(cfg)
}

fn json_line<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report types serialize");
    writeln!(out, "{text}").map_err(CliError::io("<stdout>"))
}

/// Execute a parsed command line, writing reports to `out`.
pub fn run<W: Write>(cli: &Cli, out: &mut W) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    let stdout = CliError::io("<stdout>");
    if cli.dump_config {
        return write!(out, "{}", cfg.dump()).map_err(stdout);
    }
    if cli.print_params {
        #[derive(Serialize)]
        struct Params<'a> {
            params: &'a radbkg::rate_model::SourceParams,
            scale_height: radbkg::rate_model::ScaleHeight,
        }
        return json_line(out, &Params { params: &cfg.params, scale_height: cfg.scale.to_scale_height() });
    }
    match &cli.command {
        None => Err(CliError::Usage("no command given (try `radbkg estimate` or --help)".into())),
        Some(Command::Estimate) => {
            let report = estimate(&cfg)?;
            if cli.json {
                json_line(out, &report)
            } else {
                write_estimate(out, &cfg, &report).map_err(stdout)
            }
        }
        Some(Command::Simulate { stage, histories, copies, out: dir, species }) => {
            let mut cfg = cfg;
            if let Some(n) = histories {
                cfg.mc.histories = *n;
            }
            if let Some(c) = copies {
                cfg.mc.copies = *c as u64;
            }
            if let Some(d) = dir {
                cfg.output.directory = d.clone();
            }
            restrict_species(&mut cfg, species)?;
            simulate(&cfg, (*stage).into(), cli.threads, cli.json, out)
        }
        Some(Command::Deposit { phase_space, copies, out: path }) => {
            let mut cfg = cfg;
            if let Some(c) = copies {
                cfg.mc.copies = *c as u64;
            }
            deposit(&cfg, phase_space, path.as_deref(), cli.threads, cli.json, out)
        }
        Some(Command::Sweep { params, values, mc, histories, species, poisson, csv }) => {
            if params.len() != 1 {
                return Err(CliError::Usage(format!(
                    "a sweep varies exactly one parameter with all others held at their configured values; \
                     got {} (run one sweep per parameter)",
                    params.len()
                )));
            }
            let mut cfg = cfg;
            if let Some(n) = histories {
                cfg.mc.histories = *n;
            }
            restrict_species(&mut cfg, species)?;
            let opts = SweepOptions { mc: mc.map(Stage::from), threads: cli.threads, poisson: *poisson };
            let report = sweep(&cfg, params[0], values, &opts)?;
            if let Some(path) = csv {
                let f = File::create(path).map_err(CliError::io(path))?;
                let mut w = BufWriter::new(f);
                write_sweep_csv(&mut w, &report).and_then(|_| w.flush()).map_err(CliError::io(path))?;
            }
            if cli.json {
                json_line(out, &report)
            } else {
                write_sweep_csv(out, &report).and_then(|_| write_fits(out, &report)).map_err(stdout)
            }
        }
    }
}

fn restrict_species(cfg: &mut Config, species: &[String]) -> Result<(), CliError> {
    if species.is_empty() {
        return Ok(());
    }
    let mut keep = Vec::new();
    for s in species {
        keep.push(s.parse::<Species>().map_err(|e| CliError::Usage(e.to_string()))?);
    }
    cfg.cosmic = std::mem::take(&mut cfg.cosmic).only(&keep);
    Ok(())
}

pub fn estimate(cfg: &Config) -> Result<RateReport, CliError> {
    let s = cfg.substrate.to_spec()?;
    Ok(compute_rates(&s, &cfg.environment, &cfg.params, &cfg.scale.to_scale_height())?)
}

fn write_estimate<W: Write>(out: &mut W, cfg: &Config, r: &RateReport) -> std::io::Result<()> {
    let s = &cfg.substrate;
    let e = &cfg.environment;
    writeln!(
        out,
        "substrate {} {} um x {} mm x {} mm; elevation {} m, ceiling {} cm",
        s.material, s.thickness_um, s.width_mm, s.length_mm, e.elevation_m, e.ceiling_cm
    )?;
    writeln!(
        out,
        "{:<7} {:>9} {:>7} {:>7} {:>7} {:>7} {:>7} {:>11} {:>11} {:>11}",
        "source", "a~", "k_c", "k_sh:R", "k_sh:P", "k_rho:R", "k_rho:M", "R (1/s)", "P (keV/s)", "M (1/s)"
    )?;
    for row in &r.sources {
        writeln!(
            out,
            "{:<7} {:>9.4} {:>7.4} {:>7.4} {:>7.4} {:>7.4} {:>7.4} {:>11.4e} {:>11.4e} {:>11.4e}",
            row.source.to_string(),
            row.relative_strength,
            row.corrections_r.kappa_c,
            row.corrections_r.kappa_sh,
            row.corrections_p.kappa_sh,
            row.corrections_r.kappa_rho,
            row.corrections_m.kappa_rho,
            row.rates.r,
            row.rates.p,
            row.rates.m,
        )?;
    }
    let t = r.total;
    writeln!(out, "{:<71} {:>11.4e} {:>11.4e} {:>11.4e}", "total", t.r, t.p, t.m)?;
    if t.m > 0.0 {
        writeln!(out, "one event above 1 MeV every {:.1} min", t.m_interval_s() / 60.0)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub stage: Stage,
    pub histories: u64,
    pub copies: u64,
    pub seed: u64,
    pub emerging_histories: u64,
    pub stage1_time_s: f64,
    pub live_time_s: f64,
    pub summary: SpectrumRates,
    pub mode_kev: Option<f64>,
    pub files: Vec<PathBuf>,
}

pub fn run_stage(cfg: &Config, stage: Stage, threads: Option<usize>) -> Result<StageResult, CliError> {
    let s = cfg.substrate.to_spec()?;
    let mut mc = cfg.mc.to_mc(threads)?;
    mc.keep_phase_space = cfg.output.phase_space;
    Ok(match stage {
        Stage::Gamma => run_gamma(&s, &cfg.environment, &mc)?,
        Stage::Cosmic => run_cosmic(&s, &cfg.environment, &cfg.cosmic, &mc)?,
    })
}

fn stage_name(stage: Stage) -> &'static str {
    match stage {
        Stage::Gamma => "gamma",
        Stage::Cosmic => "cosmic",
    }
}

fn simulate<W: Write>(
    cfg: &Config,
    stage: Stage,
    threads: Option<usize>,
    json: bool,
    out: &mut W,
) -> Result<(), CliError> {
    let result = run_stage(cfg, stage, threads)?;
    let dir = &cfg.output.directory;
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let base = format!("{}_{}", cfg.output.prefix, stage_name(stage));
    let mut files = Vec::new();
    if let Some(ps) = &result.phase_space {
        let path = dir.join(format!("{base}_phase_space.csv"));
        write_with(&path, |w| ps.write_csv(w))?;
        files.push(path);
    }
    let path = dir.join(format!("{base}_spectrum.csv"));
    write_with(&path, |w| result.spectrum.write_csv(w))?;
    files.push(path);
    let report = SimulateReport {
        stage,
        histories: cfg.mc.histories,
        copies: cfg.mc.copies,
        seed: cfg.mc.seed,
        emerging_histories: result.emerging_histories,
        stage1_time_s: result.stage1_time_s,
        live_time_s: result.spectrum.live_time_s(),
        summary: result.summary,
        mode_kev: spectrum_mode(&result.spectrum),
        files,
    };
    if json {
        json_line(out, &report)
    } else {
        write_simulate(out, &report).map_err(CliError::io("<stdout>"))
    }
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> radbkg::error::Result<()>) -> Result<(), CliError> {
    let file = File::create(path).map_err(CliError::io(path))?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(|e| match e {
        radbkg::error::Error::Io(source) => CliError::Io { path: path.to_path_buf(), source },
        other => CliError::Runtime(other),
    })?;
    w.flush().map_err(CliError::io(path))
}

fn write_simulate<W: Write>(out: &mut W, r: &SimulateReport) -> std::io::Result<()> {
    writeln!(out, "stage      {}", stage_name(r.stage))?;
    writeln!(
        out,
        "histories  {} (seed {}, {} emerging, {} copies each)",
        r.histories, r.seed, r.emerging_histories, r.copies
    )?;
    writeln!(out, "live time  {:.6e} s (stage 1: {:.6e} s)", r.live_time_s, r.stage1_time_s)?;
    write_rates(out, &r.summary)?;
    if let Some(m) = r.mode_kev {
        writeln!(out, "mode       {m:.1} keV")?;
    }
    for f in &r.files {
        writeln!(out, "wrote      {}", f.display())?;
    }
    Ok(())
}

fn write_rates<W: Write>(out: &mut W, s: &SpectrumRates) -> std::io::Result<()> {
    let sig = s.sigma.unwrap_or_default();
    writeln!(out, "R          {:.6e} +- {:.2e} 1/s", s.rates.r, sig.r)?;
    writeln!(out, "M          {:.6e} +- {:.2e} 1/s", s.rates.m, sig.m)?;
    write!(out, "P          {:.6e} +- {:.2e} keV/s (bin-centre bound {:.2e}", s.rates.p, sig.p, s.p_quantization)?;
    if let Some(p) = s.p_exact {
        write!(out, ", exact {p:.6e}")?;
    }
    writeln!(out, ")")
}

fn deposit<W: Write>(
    cfg: &Config,
    input: &Path,
    spectrum_path: Option<&Path>,
    threads: Option<usize>,
    json: bool,
    out: &mut W,
) -> Result<(), CliError> {
    let f = File::open(input).map_err(CliError::io(input))?;
    let ps = PhaseSpace::read_csv(BufReader::new(f))?;
    let s = cfg.substrate.to_spec()?;
    let mc = cfg.mc.to_mc(threads)?;
    let spec = run_deposition(&ps, &s, &mc)?;
    if let Some(path) = spectrum_path {
        write_with(path, |w| spec.write_csv(w))?;
    }
    let summary = summarize_spectrum(&spec, M_THRESHOLD_KEV)?;
    if json {
        json_line(out, &summary)
    } else {
        write_rates(out, &summary).map_err(CliError::io("<stdout>"))
    }
}

pub struct SweepOptions {
    pub mc: Option<Stage>,
    pub threads: Option<usize>,
    pub poisson: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: String,
    /// Numeric abscissa: τ for thickness, metres for elevation, cm for
    /// ceiling, mm² for size; absent for materials.
    pub x: Option<f64>,
    pub total: RateTriple,
    pub gamma: RateTriple,
    pub cosmic: RateTriple,
    pub mc: Option<SpectrumRates>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedFit {
    pub quantity: String,
    pub fit: FitRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
    pub fits: Vec<NamedFit>,
    /// Fits that could not be made, with the reason.
    pub notes: Vec<String>,
}

fn parse_size(v: &str) -> Result<(f64, f64), String> {
    let (w, l) = v.split_once(['x', 'X', '*']).ok_or_else(|| format!("size `{v}` should look like 10x1mm"))?;
    let l_mm = parse_quantity(l, Dim::Length, "mm")?;
    let w = w.trim();
    let w_mm = match split_number(w) {
        Some((_, "")) => {
            let (_, unit) = split_number(l.trim()).ok_or_else(|| format!("size `{v}` lacks a unit"))?;
            parse_quantity(&format!("{w} {unit}"), Dim::Length, "mm")?
        }
        _ => parse_quantity(w, Dim::Length, "mm")?,
    };
    Ok((w_mm, l_mm))
}

fn apply_sweep_value(cfg: &mut Config, param: SweepParam, v: &str) -> Result<Option<f64>, CliError> {
    let bad = |m: String| CliError::Usage(format!("sweep value `{v}`: {m}"));
    Ok(match param {
        SweepParam::Thickness => {
            cfg.substrate.thickness_um = parse_quantity(v, Dim::Length, "um").map_err(bad)?;
            Some(cfg.substrate.thickness_um / radbkg::deposition::NOMINAL_THICKNESS_UM)
        }
        SweepParam::Elevation => {
            cfg.environment.elevation_m = parse_quantity(v, Dim::Length, "m").map_err(bad)?;
            Some(cfg.environment.elevation_m)
        }
        SweepParam::Ceiling => {
            cfg.environment.ceiling_cm = parse_quantity(v, Dim::Length, "cm").map_err(bad)?;
            Some(cfg.environment.ceiling_cm)
        }
        SweepParam::Material => {
            cfg.substrate.material = v.trim().to_string();
            None
        }
        SweepParam::Size => {
            let (w, l) = parse_size(v).map_err(bad)?;
            cfg.substrate.width_mm = w;
            cfg.substrate.length_mm = l;
            Some(w * l)
        }
    })
}

fn param_name(p: SweepParam) -> &'static str {
    match p {
        SweepParam::Thickness => "thickness",
        SweepParam::Elevation => "elevation",
        SweepParam::Ceiling => "ceiling",
        SweepParam::Material => "material",
        SweepParam::Size => "size",
    }
}

pub fn sweep(cfg: &Config, param: SweepParam, values: &[String], opts: &SweepOptions) -> Result<SweepReport, CliError> {
    let mut rows = Vec::with_capacity(values.len());
    for (i, v) in values.iter().enumerate() {
        let mut c = cfg.clone();
        // independent streams per point keep the fit uncertainties honest
        c.mc.seed = cfg.mc.seed.wrapping_add(i as u64);
        let x = apply_sweep_value(&mut c, param, v)?;
        c.validate()?;
        let report = estimate(&c)?;
        let cosmic = report.source(SourceId::Cosmic).map(|s| s.rates).unwrap_or_default();
        let mc = match opts.mc {
            Some(stage) => {
                let mut c = c.clone();
                c.output.phase_space = false;
                Some(run_stage(&c, stage, opts.threads)?.summary)
            }
            None => None,
        };
        rows.push(SweepRow {
            value: v.trim().to_string(),
            x,
            total: report.total,
            gamma: report.gamma_total(),
            cosmic,
            mc,
        });
    }
    let (fits, notes) = sweep_fits(param, &rows, opts.poisson);
    Ok(SweepReport { parameter: param_name(param).into(), rows, fits, notes })
}

fn sweep_fits(param: SweepParam, rows: &[SweepRow], poisson: bool) -> (Vec<NamedFit>, Vec<String>) {
    let mut fits = Vec::new();
    let mut notes = Vec::new();
    let weighting = if poisson { Weighting::Poisson } else { Weighting::Uniform };
    let has_mc = rows.iter().any(|r| r.mc.is_some());
    let series = |f: &dyn Fn(&SweepRow) -> Option<f64>| -> Vec<(f64, f64)> {
        rows.iter().filter_map(|r| Some((r.x?, f(r)?))).collect()
    };
    let mut push = |name: &str, res: radbkg::error::Result<FitRecord>| match res {
        Ok(fit) => fits.push(NamedFit { quantity: name.into(), fit }),
        Err(e) => notes.push(format!("{name}: {e}")),
    };
    match param {
        SweepParam::Thickness => {
            push("P_gamma", fit_power_law(&series(&|r| Some(r.gamma.p)), &weighting).map(|f| (&f).into()));
            push("R_total", fit_linear(&series(&|r| Some(r.total.r)), None).map(|f| (&f).into()));
            if has_mc {
                let w = mc_weighting(rows, |s| s.p, &weighting);
                push("P_mc", fit_power_law(&series(&|r| r.mc.map(|m| m.rates.p)), &w).map(|f| (&f).into()));
                let sig = mc_sigmas(rows, |s| s.r);
                push("R_mc", fit_linear(&series(&|r| r.mc.map(|m| m.rates.r)), sig.as_deref()).map(|f| (&f).into()));
            }
        }
        SweepParam::Elevation => {
            push("R_cosmic", fit_exponential(&series(&|r| Some(r.cosmic.r)), &weighting).map(|f| (&f).into()));
            if has_mc {
                let w = mc_weighting(rows, |s| s.r, &weighting);
                push("R_mc", fit_exponential(&series(&|r| r.mc.map(|m| m.rates.r)), &w).map(|f| (&f).into()));
            }
        }
        SweepParam::Ceiling | SweepParam::Material | SweepParam::Size => {}
    }
    (fits, notes)
}

/// Per-point MC standard errors, when every point has a positive one.
fn mc_sigmas(rows: &[SweepRow], pick: impl Fn(&RateTriple) -> f64) -> Option<Vec<f64>> {
    let s: Option<Vec<f64>> = rows.iter().map(|r| r.mc.and_then(|m| m.sigma).map(|s| pick(&s))).collect();
    s.filter(|s| s.iter().all(|v| *v > 0.0))
}

/// MC fits are weighted by their standard errors unless Poisson weighting
/// was asked for.
fn mc_weighting(rows: &[SweepRow], pick: impl Fn(&RateTriple) -> f64, fallback: &Weighting) -> Weighting {
    match (fallback, mc_sigmas(rows, pick)) {
        (Weighting::Uniform, Some(s)) => Weighting::Sigma(s),
        _ => fallback.clone(),
    }
}

fn write_sweep_csv<W: Write>(out: &mut W, r: &SweepReport) -> std::io::Result<()> {
    let has_mc = r.rows.iter().any(|row| row.mc.is_some());
    write!(out, "{},x,R,P,M,R_gamma,P_gamma,M_gamma,R_cosmic,P_cosmic,M_cosmic", r.parameter)?;
    if has_mc {
        write!(out, ",R_mc,R_mc_sigma,P_mc,P_mc_sigma,M_mc,M_mc_sigma")?;
    }
    writeln!(out)?;
    for row in &r.rows {
        let x = row.x.map(|x| x.to_string()).unwrap_or_default();
        let (t, g, c) = (row.total, row.gamma, row.cosmic);
        write!(out, "{},{x},{},{},{},{},{},{},{},{},{}", row.value, t.r, t.p, t.m, g.r, g.p, g.m, c.r, c.p, c.m)?;
        if let Some(m) = row.mc {
            let s = m.sigma.unwrap_or_default();
            write!(out, ",{},{},{},{},{},{}", m.rates.r, s.r, m.rates.p, s.p, m.rates.m, s.m)?;
        } else if has_mc {
            write!(out, ",,,,,,")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn write_fits<W: Write>(out: &mut W, r: &SweepReport) -> std::io::Result<()> {
    for f in &r.fits {
        let params: Vec<String> = f.fit.parameters.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
        let flag = if f.fit.diverges { " (scale height diverges)" } else { "" };
        writeln!(
            out,
            "# fit {} {}: {} residual={:.3e} n={}{flag}",
            f.quantity,
            f.fit.model,
            params.join(" "),
            f.fit.residual,
            f.fit.n_points
        )?;
    }
    for n in &r.notes {
        writeln!(out, "# no fit: {n}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(parse_size("10x1mm").unwrap(), (10.0, 1.0));
        assert_eq!(parse_size("1cm x 5 mm").unwrap(), (10.0, 5.0));
        assert!(parse_size("10mm").is_err());
    }

    #[test]
    fn analytic_thickness_sweep_recovers_the_exponent() {
        let values: Vec<String> =
            ["1um", "3um", "10um", "30um", "100um", "300um", "500um", "1500um"].iter().map(|s| s.to_string()).collect();
        let opts = SweepOptions { mc: None, threads: None, poisson: false };
        let r = sweep(&Config::default(), SweepParam::Thickness, &values, &opts).unwrap();
        let p = r.fits.iter().find(|f| f.quantity == "P_gamma").unwrap();
        assert!((p.fit.parameters["exponent"] - 1.12).abs() < 1e-12);
    }

    #[test]
    fn analytic_elevation_sweep_recovers_lambda() {
        let values: Vec<String> =
            ["0m", "500m", "1000m", "1500m", "2000m", "3000m"].iter().map(|s| s.to_string()).collect();
        let opts = SweepOptions { mc: None, threads: None, poisson: false };
        let r = sweep(&Config::default(), SweepParam::Elevation, &values, &opts).unwrap();
        let f = &r.fits[0].fit;
        assert!((f.parameters["scale_height_m"] - 2000.0).abs() < 1e-6);
    }
}
