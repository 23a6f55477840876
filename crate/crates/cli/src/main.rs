//! Command-line front end: exact critical-point analysis, sliver
//! decomposition, and the numeric verification harness.
//!
//! Exit codes: 0 success (all verdicts PASS or none ran), 2 any FAIL
//! verdict, 3 INCONCLUSIVE verdicts only, 1 errors (parse, precondition,
//! search budgets). Exceptional classifications are findings, not errors.

mod report;

use clap::{Args, Parser, Subcommand};
use hsurf_core::adapt;
use hsurf_core::classify;
use hsurf_core::newton;
use hsurf_core::parser as poly_parser;
use hsurf_core::poly::Polynomial;
use hsurf_core::rat::{self, Rat};
use hsurf_core::slivers::{self, Decomposition, SearchConfig};
use hsurf_core::verify::{
    self, damping::damping_scan_at, damping::fstar_damping_form, DampedMeasureSpec, DecayTarget,
    Grid, Verdict, VerificationConfig,
};
use hsurf_core::Error as CoreError;
use serde_json::{json, Value};
use std::io::Write;
use std::process::ExitCode;

const GRAMMAR: &str = "Polynomial grammar:\n  \
    integers, rationals p/q, variables x y, operators + - * ^, parentheses.\n  \
    Exponents are nonnegative integers, or parenthesized positive rationals\n  \
    on x only (\"x^(3/2)\", denominator at most 64). Exponentiation is\n  \
    right-associative and binds tighter than unary minus: -x^2 = -(x^2).\n  \
    '/' is valid only between integer literals; no implicit multiplication.\n  \
    UTF-8 input is accepted but only ASCII tokens are recognized.";

#[derive(Parser)]
#[command(name = "hsurf", version, about = "Newton-polygon analyzer and verification harness for critical points of surfaces z = f(x,y)", after_help = GRAMMAR)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Polynomial in x and y, e.g. "(y - x^2)^2"
    polynomial: String,
    /// RNG seed for all sampled estimates
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Neighborhood radius (rational or decimal, e.g. 1/4 or 0.25)
    #[arg(long, default_value = "1/4")]
    radius: String,
    /// Write the JSON report to this path instead of stdout
    #[arg(long)]
    json: Option<String>,
    /// Write measurement curves as 2-column CSV to this path
    #[arg(long)]
    csv: Option<String>,
    /// Worker threads for the harness
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Evaluation precision in bits
    #[arg(long, default_value_t = 64)]
    precision: u32,
    /// Step budget for the adaptation iteration
    #[arg(long, default_value_t = 32)]
    max_steps: u32,
    /// Extra generic transforms sampled when exceptional condition b fires
    #[arg(long, default_value_t = 8)]
    transform_samples: usize,
}

#[derive(Args, Clone)]
struct SampleOpts {
    /// Sample count for quasi-random estimates
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// Sublevel threshold grid: minimum t
    #[arg(long, default_value_t = 1e-4)]
    t_min: f64,
    /// Sublevel threshold grid: maximum t
    #[arg(long, default_value_t = 1e-2)]
    t_max: f64,
    /// Sublevel threshold grid: point count
    #[arg(long, default_value_t = 7)]
    t_count: usize,
    /// Box half-width for sublevel sampling
    #[arg(long, default_value_t = 0.75)]
    box_radius: f64,
}

#[derive(Args, Clone)]
struct DecayOpts {
    /// Re(z) of the damping exponent (s > 1 for damped runs; 0 = undamped)
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    /// Exponent delta on |D(x,y)|
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Smooth cutoff radius of the measure
    #[arg(long, default_value_t = 0.5)]
    cutoff: f64,
    #[arg(long, default_value_t = 16.0)]
    lambda_min: f64,
    #[arg(long, default_value_t = 4096.0)]
    lambda_max: f64,
    #[arg(long, default_value_t = 9)]
    lambda_count: usize,
    /// Direction of lambda as "l1,l2,l3"; |l1| must be maximal
    #[arg(long, default_value = "1,0,0")]
    direction: String,
    /// Target slope for undamped runs (required when s <= 1)
    #[arg(long, allow_hyphen_values = true)]
    target_slope: Option<f64>,
    /// Tolerance around the target slope
    #[arg(long, default_value_t = 0.1)]
    slope_tol: f64,
}

#[derive(Args, Clone)]
struct DampingOpts {
    /// Explicit s-grid minimum (defaults to automatic probes at the threshold)
    #[arg(long, allow_hyphen_values = true)]
    s_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s_max: Option<f64>,
    #[arg(long, default_value_t = 4)]
    s_count: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Full exact analysis: polygon, height, exceptional conditions, slivers
    Analyze {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Adaptation only: the coordinate change into adapted coordinates
    Adapt {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Sliver decomposition with validated constants
    Slivers {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Numeric verification harness
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Everything: analysis plus all verification reports
    Report {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        sample: SampleOpts,
        #[command(flatten)]
        decay: DecayOpts,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Sublevel-set growth exponent vs the predicted 1/h
    Sublevel {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        sample: SampleOpts,
    },
    /// Oscillatory decay of the (damped) surface-measure transform
    Decay {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        decay: DecayOpts,
    },
    /// Re-validate the recorded comparability bounds on every sliver
    Comparability {
        #[command(flatten)]
        common: CommonOpts,
        /// Samples per bound check
        #[arg(long, default_value_t = 4096)]
        samples: usize,
    },
    /// Damping integrability scan over shrinking annuli
    Damping {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        opts: DampingOpts,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let payload = match e.downcast_ref::<CoreError>() {
                Some(ce) => json!({
                    "code": ce.code(),
                    "message": ce.to_string(),
                    "position": ce.position(),
                }),
                None => json!({"code": "error", "message": e.to_string()}),
            };
            eprintln!("{payload}");
            ExitCode::from(1)
        }
    }
}

/// Verdict accumulator driving the exit code.
#[derive(Default)]
struct Verdicts {
    fail: bool,
    inconclusive: bool,
    any: bool,
}

impl Verdicts {
    fn push(&mut self, v: Verdict) {
        self.any = true;
        match v {
            Verdict::Fail => self.fail = true,
            Verdict::Inconclusive => self.inconclusive = true,
            Verdict::Pass => {}
        }
    }

    fn push_pass(&mut self, pass: bool) {
        self.push(if pass { Verdict::Pass } else { Verdict::Fail });
    }

    fn exit(&self) -> ExitCode {
        if self.fail {
            ExitCode::from(2)
        } else if self.inconclusive {
            ExitCode::from(3)
        } else {
            ExitCode::from(0)
        }
    }
}

fn parse_radius(s: &str) -> anyhow::Result<Rat> {
    rat::parse_rat(s)
        .filter(num_traits::Signed::is_positive)
        .ok_or_else(|| anyhow::anyhow!("radius must be a positive rational, got {s}"))
}

fn parse_input(src: &str) -> anyhow::Result<Polynomial> {
    Ok(poly_parser::parse(src)?)
}

fn emit(common: &CommonOpts, body: Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&body)? + "\n";
    match &common.json {
        Some(path) => {
            std::fs::write(path, &text)?;
            println!("report written to {path}");
        }
        None => {
            print!("{text}");
            std::io::stdout().flush()?;
        }
    }
    Ok(())
}

fn report_frame(common: &CommonOpts, input: &Polynomial, body: Value) -> Value {
    let mut frame = json!({
        "schema_version": "1",
        "tool_version": env!("CARGO_PKG_VERSION"),
        "timestamp": report::timestamp(),
        "seed": common.seed,
        "input": {
            "source": common.polynomial,
            "polynomial": report::polynomial(input),
        },
    });
    if let (Value::Object(f), Value::Object(b)) = (&mut frame, body) {
        for (k, v) in b {
            f.insert(k, v);
        }
    }
    frame
}

/// Exact analysis shared by `analyze` and `report`.
struct Analysis {
    input: Polynomial,
    classification: classify::ClassificationReport,
    decomposition: Option<Decomposition>,
    slivers_skipped: Option<String>,
}

fn run_analysis(common: &CommonOpts, radius: &Rat) -> anyhow::Result<Analysis> {
    let input = parse_input(&common.polynomial)?;
    if !input.has_critical_point_at_origin() {
        return Err(CoreError::CriticalPointViolation.into());
    }
    let classification = classify::classify(&input, common.transform_samples)?;
    let search = SearchConfig {
        seed: common.seed,
        ..Default::default()
    };
    let (decomposition, slivers_skipped) =
        match slivers::decompose(&classification.adaptation, radius, &search) {
            Ok(dec) => (Some(dec), None),
            Err(e @ CoreError::ExceptionalInput { .. }) => (None, Some(e.to_string())),
            Err(e) => return Err(e.into()),
        };
    Ok(Analysis {
        input,
        classification,
        decomposition,
        slivers_skipped,
    })
}

fn analysis_json(a: &Analysis) -> anyhow::Result<Value> {
    let np = newton::newton_polygon(&a.input)?;
    let d = newton::newton_distance(&np);
    let locus = newton::bisectrix_locus(&np);
    let slivers_value = match (&a.decomposition, &a.slivers_skipped) {
        (Some(dec), _) => report::decomposition(dec),
        (None, Some(reason)) => json!({"skipped": reason}),
        (None, None) => Value::Null,
    };
    Ok(json!({
        "origin_checks": {
            "value_at_origin": "0",
            "gradient_vanishes": true,
        },
        "newton_polygon": report::polygon(&np),
        "newton_distance": report::rq(&d),
        "bisectrix_locus": report::locus(&locus),
        "classification": report::classification(&a.classification),
        "p_critical": report::rq(&a.classification.p_critical),
        "slivers": slivers_value,
    }))
}

fn base_config(common: &CommonOpts, sample: &SampleOpts) -> VerificationConfig {
    VerificationConfig {
        seed: common.seed,
        samples: sample.samples,
        radius: sample.box_radius,
        t_grid: Grid {
            min: sample.t_min,
            max: sample.t_max,
            count: sample.t_count,
        },
        precision_bits: common.precision,
        workers: common.workers,
        ..Default::default()
    }
}

fn parse_direction(s: &str) -> anyhow::Result<[f64; 3]> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| anyhow::anyhow!("bad direction {s}: {e}"))?;
    if parts.len() != 3 {
        anyhow::bail!("direction needs three components, got {s}");
    }
    Ok([parts[0], parts[1], parts[2]])
}

fn run_decay(
    common: &CommonOpts,
    opts: &DecayOpts,
    verdicts: &mut Verdicts,
) -> anyhow::Result<(Value, Option<String>)> {
    let input = parse_input(&common.polynomial)?;
    let radius = parse_radius(&common.radius)?;
    let cfg = VerificationConfig {
        seed: common.seed,
        workers: common.workers,
        lambda_grid: Grid::new(opts.lambda_min, opts.lambda_max, opts.lambda_count)?,
        precision_bits: common.precision,
        ..Default::default()
    };
    let direction = parse_direction(&opts.direction)?;
    let (spec, target) = if opts.s > 1.0 {
        // Damped run: decompose for the sliver damping. Prefer the identity
        // pre-transform when the input itself adapts into generic adapted
        // coordinates; a shear would only inflate the phase gradient.
        let ar = {
            let plain = adapt::adapt(&input, common.max_steps)?;
            if plain.generic_adapted {
                plain
            } else {
                adapt::generic_adapt(&input, classify::DEFAULT_TRIAL_BUDGET, common.max_steps)?
            }
        };
        let search = SearchConfig {
            seed: common.seed,
            ..Default::default()
        };
        let dec = slivers::decompose(&ar, &radius, &search)?;
        let psi = ar.psi.clone();
        (
            DampedMeasureSpec {
                f: input.substitute_linear(&ar.t)?,
                psi,
                decomposition: Some(dec),
                s: opts.s,
                delta: opts.delta,
                cutoff_radius: opts.cutoff,
            },
            DecayTarget::DampedThreshold,
        )
    } else {
        let target = match opts.target_slope {
            Some(t) => DecayTarget::SlopeWithin {
                target: t,
                tol: opts.slope_tol,
            },
            None => anyhow::bail!("undamped decay runs need --target-slope"),
        };
        (
            DampedMeasureSpec {
                f: input,
                psi: hsurf_core::poly::PsiSeries::empty(),
                decomposition: None,
                s: opts.s,
                delta: opts.delta,
                cutoff_radius: opts.cutoff,
            },
            target,
        )
    };
    let fit = verify::estimate_decay(&spec, direction, target, &cfg)?;
    verdicts.push(fit.verdict);
    let csv = csv_from_points(&fit.points, "lambda,modulus");
    println!(
        "decay: slope {:.4} r2 {:.4} -> {}",
        fit.slope,
        fit.r_squared,
        report::verdict(fit.verdict)
    );
    Ok((report::fit(&fit), Some(csv)))
}

fn csv_from_points(points: &[(f64, f64)], header: &str) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for (lx, ly) in points {
        out.push_str(&format!("{},{}\n", lx.exp(), ly.exp()));
    }
    out
}

fn write_csv(common: &CommonOpts, csv: Option<String>) -> anyhow::Result<()> {
    if let (Some(path), Some(csv)) = (&common.csv, csv) {
        std::fs::write(path, csv)?;
        println!("curve written to {path}");
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Analyze { common } => {
            let radius = parse_radius(&common.radius)?;
            let analysis = run_analysis(&common, &radius)?;
            let body = analysis_json(&analysis)?;
            let np = newton::newton_polygon(&analysis.input)?;
            write_csv(&common, Some(report::polygon_csv(&np)))?;
            let frame = report_frame(&common, &analysis.input, body);
            emit(&common, frame)?;
            Ok(ExitCode::from(0))
        }
        Command::Adapt { common } => {
            let input = parse_input(&common.polynomial)?;
            let ar = adapt::adapt(&input, common.max_steps)?;
            let frame = report_frame(&common, &input, json!({"adaptation": report::adaptation(&ar)}));
            emit(&common, frame)?;
            Ok(ExitCode::from(0))
        }
        Command::Slivers { common } => {
            let input = parse_input(&common.polynomial)?;
            let radius = parse_radius(&common.radius)?;
            let ar = adapt::generic_adapt(&input, classify::DEFAULT_TRIAL_BUDGET, common.max_steps)?;
            let search = SearchConfig {
                seed: common.seed,
                ..Default::default()
            };
            let dec = slivers::decompose(&ar, &radius, &search)?;
            let frame = report_frame(
                &common,
                &input,
                json!({
                    "adaptation": report::adaptation(&ar),
                    "slivers": report::decomposition(&dec),
                }),
            );
            emit(&common, frame)?;
            Ok(ExitCode::from(0))
        }
        Command::Verify { what } => run_verify(what),
        Command::Report {
            common,
            sample,
            decay,
        } => {
            let radius = parse_radius(&common.radius)?;
            let mut verdicts = Verdicts::default();
            let analysis = run_analysis(&common, &radius)?;
            let mut body = analysis_json(&analysis)?;
            let mut verifications = serde_json::Map::new();

            // sublevel vs 1/h
            let cfg = base_config(&common, &sample);
            let target = 1.0 / rat::to_f64(&analysis.classification.height.h);
            let fit = verify::estimate_sublevel_exponent(&analysis.input, target, &cfg)?;
            verdicts.push(fit.verdict);
            println!(
                "sublevel: slope {:.4} target {:.4} -> {}",
                fit.slope,
                target,
                report::verdict(fit.verdict)
            );
            verifications.insert("sublevel".into(), report::fit(&fit));

            if let Some(dec) = &analysis.decomposition {
                let reports = verify::check_all_bounds(dec, &cfg)?;
                for r in &reports {
                    verdicts.push_pass(r.pass);
                }
                println!(
                    "comparability: {}/{} bounds pass",
                    reports.iter().filter(|r| r.pass).count(),
                    reports.len()
                );
                let domination = verify::check_damping_domination(dec, &cfg)?;
                for r in &domination {
                    verdicts.push_pass(r.pass);
                }
                verifications.insert("comparability".into(), report::comparability(&reports));
                verifications.insert("damping_domination".into(), report::comparability(&domination));

                // damping integrability with the F*-power form
                let form = fstar_damping_form(&dec.d_star);
                let scan = verify::damping_integrability_scan(&dec.f, &form, &cfg)?;
                for line in &scan.lines {
                    verdicts.push(line.verdict);
                }
                println!(
                    "damping: {} scan lines, threshold {:?}",
                    scan.lines.len(),
                    scan.threshold
                );
                verifications.insert("damping_integrability".into(), report::integrability(&scan));

                // damped decay at the configured s (default 1.2 for reports)
                let mut dopts = decay.clone();
                if dopts.s <= 1.0 {
                    dopts.s = 1.2;
                    if dopts.delta == 0.0 {
                        dopts.delta = 0.01;
                    }
                }
                if !analysis.classification.exceptional_a {
                    let (decay_json, _) = run_decay(&common, &dopts, &mut verdicts)?;
                    verifications.insert("decay".into(), decay_json);
                }
            }

            if let Value::Object(b) = &mut body {
                b.insert("verifications".into(), Value::Object(verifications));
            }
            let frame = report_frame(&common, &analysis.input, body);
            emit(&common, frame)?;
            Ok(verdicts.exit())
        }
    }
}

fn run_verify(what: VerifyCommand) -> anyhow::Result<ExitCode> {
    let mut verdicts = Verdicts::default();
    match what {
        VerifyCommand::Sublevel { common, sample } => {
            let input = parse_input(&common.polynomial)?;
            let h = adapt::height(&input)?;
            let target = 1.0 / rat::to_f64(&h.h);
            let cfg = base_config(&common, &sample);
            let fit = verify::estimate_sublevel_exponent(&input, target, &cfg)?;
            verdicts.push(fit.verdict);
            println!(
                "sublevel: slope {:.4} target {:.4} (h = {}) -> {}",
                fit.slope,
                target,
                rat::rat_str(&h.h),
                report::verdict(fit.verdict)
            );
            let csv = csv_from_points(&fit.points, "t,measure");
            write_csv(&common, Some(csv))?;
            let frame = report_frame(
                &common,
                &input,
                json!({"verifications": {"sublevel": report::fit(&fit)}, "height": report::height(&h)}),
            );
            emit(&common, frame)?;
            Ok(verdicts.exit())
        }
        VerifyCommand::Decay { common, decay } => {
            let input = parse_input(&common.polynomial)?;
            let (decay_json, csv) = run_decay(&common, &decay, &mut verdicts)?;
            write_csv(&common, csv)?;
            let frame = report_frame(
                &common,
                &input,
                json!({"verifications": {"decay": decay_json}}),
            );
            emit(&common, frame)?;
            Ok(verdicts.exit())
        }
        VerifyCommand::Comparability { common, samples } => {
            let input = parse_input(&common.polynomial)?;
            let radius = parse_radius(&common.radius)?;
            let ar = adapt::generic_adapt(&input, classify::DEFAULT_TRIAL_BUDGET, common.max_steps)?;
            let search = SearchConfig {
                seed: common.seed,
                ..Default::default()
            };
            let dec = slivers::decompose(&ar, &radius, &search)?;
            let cfg = VerificationConfig {
                seed: common.seed,
                samples: samples.max(1000),
                workers: common.workers,
                ..Default::default()
            };
            let reports = verify::check_all_bounds(&dec, &cfg)?;
            let domination = verify::check_damping_domination(&dec, &cfg)?;
            for r in reports.iter().chain(domination.iter()) {
                verdicts.push_pass(r.pass);
                println!(
                    "sliver {:>3} {:<18} margin {:>8.3} -> {}",
                    r.sliver_index,
                    r.quantity,
                    r.margin,
                    if r.pass { "PASS" } else { "FAIL" }
                );
            }
            let frame = report_frame(
                &common,
                &input,
                json!({"verifications": {
                    "comparability": report::comparability(&reports),
                    "damping_domination": report::comparability(&domination),
                }}),
            );
            emit(&common, frame)?;
            Ok(verdicts.exit())
        }
        VerifyCommand::Damping { common, opts } => {
            let input = parse_input(&common.polynomial)?;
            let ar = adapt::adapt(&input, common.max_steps)?;
            let np = newton::newton_polygon(&ar.f)?;
            let d = newton::newton_distance(&np);
            let d_star = adapt::d_star(&d);
            let form = fstar_damping_form(&d_star);
            let cfg = VerificationConfig {
                seed: common.seed,
                workers: common.workers,
                ..Default::default()
            };
            let scan = match (opts.s_min, opts.s_max) {
                (Some(lo), Some(hi)) => {
                    let n = opts.s_count.max(2);
                    let values: Vec<f64> = (0..n)
                        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                        .collect();
                    damping_scan_at(&ar.f, &form, &values, &cfg)?
                }
                _ => verify::damping_integrability_scan(&ar.f, &form, &cfg)?,
            };
            for line in &scan.lines {
                verdicts.push(line.verdict);
                println!(
                    "s = {:>8.3}: rate {:>8.3} {:?} (expected {:?}) -> {}",
                    line.s,
                    line.log2_rate,
                    line.trend,
                    line.expected,
                    report::verdict(line.verdict)
                );
            }
            let frame = report_frame(
                &common,
                &input,
                json!({"verifications": {"damping_integrability": report::integrability(&scan)}}),
            );
            emit(&common, frame)?;
            Ok(verdicts.exit())
        }
    }
}
