use std::f64::consts::PI;

use clap::Args;
use gpscat::gauss_core::{build_sigma, solve_reflectance, BeamSplitter};
use gpscat::herald::{herald, norm_squared, HeraldOutcome, OSCILLATION_THRESHOLD};
use gpscat::targets::{best_cat_fit, cat_wavefunction_x, fidelity, CatTarget};
use gpscat::wavefunction::{Envelope, FnWavefunction, Wavefunction};
use serde_json::Value;

use crate::args::{check_reflectance, Grid, OutputArgs, SqueezingArgs};
use crate::error::CliResult;
use crate::output::{jnum, jopt, Cell, Table};

#[derive(Debug, Args)]
#[command(
    after_help = "Columns: x, psi_n, target_cat, abs_err, plus p, abs_psi_tilde with --momentum."
)]
pub struct WavefunctionArgs {
    #[command(flatten)]
    pub squeezing: SqueezingArgs,

    /// Number of detected photons
    #[arg(long, default_value_t = 10)]
    pub n: usize,

    /// Beam-splitter reflectance; the sigma11 = 1 value is solved for when
    /// absent
    #[arg(long)]
    pub reflectance: Option<f64>,

    /// Sample points, lo:hi:step, used for both x and p
    #[arg(long, default_value = "-6:6:0.01", allow_hyphen_values = true)]
    pub grid: Grid,

    /// Also tabulate the modulus of the momentum wavefunction
    #[arg(long)]
    pub momentum: bool,

    #[command(flatten)]
    pub output: OutputArgs,
}

/// The reference state a heralded wavefunction is compared against.
enum Target {
    Cat {
        cat: CatTarget,
        source: &'static str,
    },
    Vacuum {
        r: f64,
    },
}

impl Target {
    fn choose(outcome: &HeraldOutcome) -> CliResult<Target> {
        let n = outcome.n();
        if n == 0 {
            return Ok(Target::Vacuum {
                r: 0.5 * outcome.density_exponent().ln(),
            });
        }
        Ok(match outcome.r_c() {
            Some(r_c) => Target::Cat {
                cat: CatTarget::for_photons(n, r_c)?,
                source: "output squeezing",
            },
            None => {
                let fit = best_cat_fit(outcome, n)?;
                Target::Cat {
                    cat: CatTarget::new(fit.alpha, n as i64, fit.r)?,
                    source: "best fit",
                }
            }
        })
    }

    fn amplitude(&self, x: f64) -> CliResult<f64> {
        Ok(match self {
            Target::Cat { cat, .. } => cat_wavefunction_x(cat, x)?,
            Target::Vacuum { r } => vacuum(*r, x),
        })
    }

    fn fidelity(&self, outcome: &HeraldOutcome) -> CliResult<f64> {
        Ok(match self {
            Target::Cat { cat, .. } => fidelity(outcome, cat)?,
            Target::Vacuum { r } => {
                let r = *r;
                let envelope = Envelope::GaussPoly {
                    exponent: 0.5 * (2.0 * r).exp(),
                    degree: 0,
                };
                fidelity(
                    outcome,
                    &FnWavefunction::new(move |x| vacuum(r, x), envelope),
                )?
            }
        })
    }

    fn describe(&self) -> Value {
        let mut m = serde_json::Map::new();
        match self {
            Target::Cat { cat, source } => {
                m.insert("kind".into(), Value::from("squeezed cat"));
                m.insert("alpha".into(), jnum(cat.alpha()));
                m.insert("k".into(), Value::from(cat.k()));
                m.insert("r".into(), jnum(cat.r()));
                m.insert("source".into(), Value::from(*source));
            }
            Target::Vacuum { r } => {
                m.insert("kind".into(), Value::from("squeezed vacuum"));
                m.insert("r".into(), jnum(*r));
            }
        }
        Value::Object(m)
    }
}

fn vacuum(r: f64, x: f64) -> f64 {
    let s = r.exp();
    s.sqrt() * PI.powf(-0.25) * (-0.5 * s * s * x * x).exp()
}

pub fn run(args: &WavefunctionArgs) -> CliResult<()> {
    let sq = args.squeezing.pair(5.0)?;
    let (bs, source) = match args.reflectance {
        Some(r) => (BeamSplitter::new(check_reflectance(r)?)?, "override"),
        None => (solve_reflectance(sq)?, "solved"),
    };
    let sigma = build_sigma(sq, bs);
    let outcome = herald(&sigma, args.n)?;
    if !outcome.is_closed_form() {
        log::warn!(
            "sigma11 = {} is not 1; the heralded state is computed by quadrature",
            sigma.s11()
        );
    }
    let target = Target::choose(&outcome)?;
    let xs = args.grid.values();
    let psi = xs
        .iter()
        .map(|&x| outcome.psi(x))
        .collect::<Result<Vec<f64>, _>>()?;
    let mut tgt = xs
        .iter()
        .map(|&x| target.amplitude(x))
        .collect::<CliResult<Vec<f64>>>()?;
    // fix the target's global sign where the heralded state is largest
    if let Some(i) = (0..psi.len()).max_by(|&a, &b| psi[a].abs().total_cmp(&psi[b].abs())) {
        if psi[i] * tgt[i] < 0.0 {
            tgt.iter_mut().for_each(|t| *t = -*t);
        }
    }

    let mut columns = vec!["x", "psi_n", "target_cat", "abs_err"];
    if args.momentum {
        columns.extend(["p", "abs_psi_tilde"]);
    }
    let mut table = Table::new(columns);
    for (i, &x) in xs.iter().enumerate() {
        let mut row = vec![
            Cell::Num(x),
            Cell::Num(psi[i]),
            Cell::Num(tgt[i]),
            Cell::Num((psi[i] - tgt[i]).abs()),
        ];
        if args.momentum {
            row.push(Cell::Num(x));
            row.push(Cell::Num(outcome.psi_tilde(x)?.norm()));
        }
        table.push(row);
    }

    let envelope = outcome.envelope();
    let shape = outcome.waveform_shape(envelope.half_width(), 4001)?;
    let meta = &mut table.meta;
    meta.insert("command".into(), Value::from("wavefunction"));
    meta.insert("n".into(), Value::from(args.n));
    meta.insert("r1".into(), jnum(sq.r1()));
    meta.insert("r2".into(), jnum(sq.r2()));
    meta.insert("reflectance".into(), jnum(bs.reflectance()));
    meta.insert("reflectance_source".into(), Value::from(source));
    meta.insert("sigma11".into(), jnum(sigma.s11()));
    meta.insert("closed_form".into(), Value::from(outcome.is_closed_form()));
    meta.insert("probability".into(), jnum(outcome.prob()));
    meta.insert("r_c".into(), jopt(outcome.r_c()));
    meta.insert("norm".into(), jnum(norm_squared(&outcome)?));
    meta.insert("target".into(), target.describe());
    meta.insert("fidelity".into(), jnum(target.fidelity(&outcome)?));
    meta.insert("oscillation".into(), jnum(shape.oscillation));
    meta.insert("oscillation_threshold".into(), jnum(OSCILLATION_THRESHOLD));
    meta.insert("oscillates".into(), Value::from(shape.oscillates()));
    meta.insert(
        "peak_positions".into(),
        Value::from(
            shape
                .peak_positions
                .iter()
                .map(|&p| jnum(p))
                .collect::<Vec<_>>(),
        ),
    );
    table.emit(&args.output)
}
