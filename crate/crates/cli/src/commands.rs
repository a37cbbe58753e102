use crate::input::{
    parse_complex, parse_poly, parse_polygon, parse_reals, parse_window, UsageError,
};
use crate::portrait::{self, Levels, PortraitRequest, PortraitSystem};
use crate::{
    Cli, Command, CyclesArgs, FamilyArg, FlowForm, FlowstatsCommand, OutArgs, PortraitArgs,
    SystemArgs,
};
use anyhow::Context;
use holoflow::classify::{bernoulli_portrait, classify_cubic, infinity_equilibria};
use holoflow::flowstats::{
    closed_form_flow, complex_time_invariants, contour_integral_spec, ClosedFormFlow, Curve,
};
use holoflow::odeint::IntegratorConfig;
use holoflow::potential::{build_potential, eval_potential};
use holoflow::pwcycles::{CycleOptions, MixedConstants};
use holoflow::report::{
    cycle_report, verify_report, BernoulliReport, ClassifyReport, CycleFamily, CycleReport,
    CycleSystem, PotentialReport, VerifyOutcome,
};
use holoflow::system::{PiecewiseSpec, SystemSpec};
use num_complex::Complex64;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn system(args: &SystemArgs) -> anyhow::Result<SystemSpec> {
    match (&args.holo, &args.antiholo) {
        (Some(p), None) => Ok(SystemSpec::holomorphic(parse_poly(p)?)),
        (None, Some(p)) => Ok(SystemSpec::anti_holomorphic(parse_poly(p)?)),
        _ => Err(usage("give exactly one of --holo and --antiholo")),
    }
}

/// Prints to stdout; a closed pipe on the reading side is not an error.
fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let json = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{json}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn emit<T: Serialize>(out: &OutArgs, value: &T) -> anyhow::Result<()> {
    match &out.out {
        Some(path) => {
            let json = serde_json::to_string_pretty(value)?;
            std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))
        }
        None => print_json(value),
    }
}

fn grid_size(nx: usize, ny: usize) -> anyhow::Result<(usize, usize)> {
    if nx < 2 || ny < 2 {
        return Err(usage(format!(
            "grid needs at least 2 x 2 points, got {nx} x {ny}"
        )));
    }
    Ok((nx, ny))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

/// Runs a command; `Ok(false)` means it completed but a check failed.
pub fn run(cli: Cli) -> anyhow::Result<bool> {
    let tol = cli.tol;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(usage(format!("tolerance must be positive, got {tol}")));
    }
    match cli.command {
        Command::Potential {
            system: sys,
            grid,
            window,
            nx,
            ny,
            out,
        } => {
            let spec = system(&sys)?;
            let rep = build_potential(&spec)?;
            if let Some(path) = grid {
                let [x0, x1, y0, y1] = parse_window(&window)?;
                let (nx, ny) = grid_size(nx, ny)?;
                let mut w = csv::Writer::from_writer(create(&path)?);
                w.write_record(["x", "y", "phi", "psi"])?;
                for j in 0..ny {
                    let y = y0 + (y1 - y0) * j as f64 / (ny - 1) as f64;
                    for i in 0..nx {
                        let x = x0 + (x1 - x0) * i as f64 / (nx - 1) as f64;
                        // poles are left blank
                        let (phi, psi) = match eval_potential(&rep, Complex64::new(x, y)) {
                            Ok(v) => (v.re.to_string(), v.im.to_string()),
                            Err(_) => (String::new(), String::new()),
                        };
                        w.write_record([x.to_string(), y.to_string(), phi, psi])?;
                    }
                }
                w.flush()?;
            }
            emit(&out, &PotentialReport::new(&spec, &rep))?;
        }
        Command::ClassifyCubic { a1, a0, eps, out } => {
            let class = classify_cubic(parse_complex(&a1)?, parse_complex(&a0)?, eps)?;
            emit(
                &out,
                &ClassifyReport::new(&class, eps, &infinity_equilibria(3)?),
            )?;
        }
        Command::Bernoulli { n, alpha, eps, out } => {
            let b = bernoulli_portrait(n, parse_complex(&alpha)?, eps)?;
            emit(&out, &BernoulliReport::from(&b))?;
        }
        Command::Cycles(args) => cycles(args, tol)?,
        Command::Flowstats { what } => flowstats(what, tol)?,
        Command::Portrait(args) => portrait_cmd(args)?,
        Command::Verify { report, out } => {
            let text = std::fs::read_to_string(&report)
                .with_context(|| format!("reading {}", report.display()))?;
            let parsed: CycleReport = serde_json::from_str(&text)
                .map_err(|e| usage(format!("{} is not a cycle report: {e}", report.display())))?;
            let outcomes = verify_report(&parsed, &CycleOptions::default())?;
            let pass = outcomes.iter().all(|o| o.pass);
            #[derive(Serialize)]
            struct Verdict {
                pass: bool,
                outcomes: Vec<VerifyOutcome>,
            }
            emit(&out, &Verdict { pass, outcomes })?;
            return Ok(pass);
        }
    }
    Ok(true)
}

fn cycles(args: CyclesArgs, tol: f64) -> anyhow::Result<()> {
    let family = match args.family {
        FamilyArg::Antiholo => CycleFamily::Antiholo,
        FamilyArg::MixedLinear => CycleFamily::MixedLinear,
        FamilyArg::MixedGeneral => CycleFamily::MixedGeneral,
    };
    let system = match family {
        CycleFamily::Antiholo => {
            let (Some(upper), Some(lower)) = (&args.upper, &args.lower) else {
                return Err(usage("--family antiholo needs --upper and --lower"));
            };
            CycleSystem::Antiholo {
                upper: SystemSpec::anti_holomorphic(parse_poly(upper)?),
                lower: SystemSpec::anti_holomorphic(parse_poly(lower)?),
            }
        }
        _ => {
            let need = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| usage(format!("mixed families need --{name}")))
            };
            CycleSystem::Mixed(MixedConstants {
                a1: need(args.a1, "a1")?,
                a2: need(args.a2, "a2")?,
                b1: need(args.b1, "b1")?,
                b2: need(args.b2, "b2")?,
                a: need(args.a, "a")?,
                b: need(args.b, "b")?,
                x0: need(args.x0, "x0")?,
                y0: args.y0,
            })
        }
    };
    let opts = CycleOptions {
        validate: !args.no_validate,
        ..CycleOptions::default()
    };
    emit(&args.out, &cycle_report(family, system, tol, &opts)?)
}

fn flowstats(what: FlowstatsCommand, tol: f64) -> anyhow::Result<()> {
    match what {
        FlowstatsCommand::Contour {
            system: sys,
            circle,
            polygon,
            clockwise,
            nodes,
            out,
        } => {
            let spec = system(&sys)?;
            let curve = match (circle, polygon) {
                (Some(c), _) => {
                    let v = parse_reals(&c, "circle")?;
                    let [cx, cy, r] = v[..] else {
                        return Err(usage(format!("circle '{c}' needs cx,cy,r")));
                    };
                    if r <= 0.0 {
                        return Err(usage(format!("circle radius must be positive, got {r}")));
                    }
                    Curve::Circle {
                        center: Complex64::new(cx, cy),
                        radius: r,
                        counterclockwise: !clockwise,
                    }
                }
                (None, Some(p)) => Curve::Polygon(parse_polygon(&p)?),
                (None, None) => Curve::Circle {
                    center: Complex64::new(0.0, 0.0),
                    radius: 1.0,
                    counterclockwise: !clockwise,
                },
            };
            emit(&out, &contour_integral_spec(&spec, &curve, nodes)?)
        }
        FlowstatsCommand::Flow {
            form,
            z0,
            time,
            n,
            alpha,
            beta,
            out,
        } => {
            let flow = match form {
                FlowForm::Constant => ClosedFormFlow::Constant,
                FlowForm::Linear => ClosedFormFlow::Linear,
                FlowForm::Quadratic => ClosedFormFlow::Quadratic,
                FlowForm::Reciprocal => ClosedFormFlow::Reciprocal,
                FlowForm::Bernoulli => ClosedFormFlow::Bernoulli {
                    n: n.ok_or_else(|| usage("bernoulli flow needs --n"))?,
                    alpha: parse_complex(
                        &alpha.ok_or_else(|| usage("bernoulli flow needs --alpha"))?,
                    )?,
                    beta: parse_complex(&beta)?,
                },
            };
            let (z0, t) = (parse_complex(&z0)?, parse_complex(&time)?);
            let z = closed_form_flow(&flow, z0, t)?;
            #[derive(Serialize)]
            struct FlowValue {
                flow: ClosedFormFlow,
                z0: Complex64,
                time: Complex64,
                z: Complex64,
            }
            emit(
                &out,
                &FlowValue {
                    flow,
                    z0,
                    time: t,
                    z,
                },
            )
        }
        FlowstatsCommand::Invariants {
            holo,
            z0,
            duration,
            out,
        } => {
            let spec = SystemSpec::holomorphic(parse_poly(&holo)?);
            let rep = build_potential(&spec)?;
            let z0 = parse_complex(&z0)?;
            let cfg = IntegratorConfig::with_tolerance(tol);
            let (psi_drift, phi_drift) = complex_time_invariants(&spec, &rep, z0, duration, &cfg)?;
            #[derive(Serialize)]
            struct Drifts {
                z0: Complex64,
                duration: f64,
                psi_drift_real_time: f64,
                phi_drift_imaginary_time: f64,
            }
            emit(
                &out,
                &Drifts {
                    z0,
                    duration,
                    psi_drift_real_time: psi_drift,
                    phi_drift_imaginary_time: phi_drift,
                },
            )
        }
    }
}

fn portrait_cmd(args: PortraitArgs) -> anyhow::Result<()> {
    let kind = |p: &str, holo: bool| -> anyhow::Result<SystemSpec> {
        let p = parse_poly(p)?;
        Ok(if holo {
            SystemSpec::holomorphic(p)
        } else {
            SystemSpec::anti_holomorphic(p)
        })
    };
    let system = match (&args.holo, &args.antiholo, &args.upper, &args.lower) {
        (Some(p), None, None, None) => {
            PortraitSystem::Single(SystemSpec::holomorphic(parse_poly(p)?))
        }
        (None, Some(p), None, None) => {
            PortraitSystem::Single(SystemSpec::anti_holomorphic(parse_poly(p)?))
        }
        (None, None, Some(u), Some(l)) => PortraitSystem::Piecewise(PiecewiseSpec {
            upper: kind(u, args.upper_holo)?,
            lower: kind(l, args.lower_holo)?,
        }),
        _ => {
            return Err(usage(
                "give one of --holo, --antiholo, or --upper with --lower",
            ))
        }
    };
    let levels = match &args.level {
        Some(v) => Levels::Explicit(parse_reals(v, "level")?),
        None => Levels::Count(args.levels),
    };
    let req = PortraitRequest {
        system,
        window: parse_window(&args.window)?,
        grid: grid_size(args.nx, args.ny)?,
        levels,
        include_phi: args.phi,
    };
    let (portrait, summary) = portrait::compute(&req)?;
    std::fs::write(&args.svg, portrait.to_svg())
        .with_context(|| format!("writing {}", args.svg.display()))?;
    if let Some(path) = &args.csv {
        let mut w = create(path)?;
        portrait.write_csv(&mut w)?;
        w.flush()?;
    }
    print_json(&summary)
}
