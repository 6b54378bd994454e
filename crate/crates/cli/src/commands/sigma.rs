use clap::Args;
use gpscat::gauss_core::{
    build_sigma, output_squeezing, p_domain_sigma, r_to_db, solve_reflectance, BeamSplitter,
    SigmaMatrix,
};
use gpscat::herald::GPS_TOLERANCE;
use serde_json::Value;

use crate::args::{check_reflectance, OutputArgs, SqueezingArgs};
use crate::error::CliResult;
use crate::output::{jnum, jopt, Cell, Table};

#[derive(Debug, Args)]
#[command(after_help = "Columns: quantity, value.")]
pub struct SigmaArgs {
    #[command(flatten)]
    pub squeezing: SqueezingArgs,

    /// Beam-splitter reflectance; the sigma11 = 1 value is solved for when
    /// absent
    #[arg(long, conflicts_with = "solve_r")]
    pub reflectance: Option<f64>,

    /// Solve for the reflectance giving sigma11 = 1 (the default)
    #[arg(long)]
    pub solve_r: bool,

    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn run(args: &SigmaArgs) -> CliResult<()> {
    let sq = args.squeezing.pair(5.0)?;
    let (bs, solved) = match args.reflectance {
        Some(r) => (BeamSplitter::new(check_reflectance(r)?)?, false),
        None => (solve_reflectance(sq)?, true),
    };
    let sigma = build_sigma(sq, bs);
    if !solved && sigma.gps_residual().abs() >= GPS_TOLERANCE {
        log::warn!(
            "reflectance {} gives sigma11 = {}; closed forms do not apply",
            bs.reflectance(),
            sigma.s11()
        );
    }
    let inverse = sigma.inverse();
    let tilde = p_domain_sigma(&sigma);
    let r_c = (sigma.gps_residual().abs() < GPS_TOLERANCE).then(|| output_squeezing(&sigma));

    let mut entries: Vec<(String, Cell)> = vec![
        ("r1".into(), sq.r1().into()),
        ("r2".into(), sq.r2().into()),
        ("db1".into(), r_to_db(sq.r1().abs()).into()),
        ("db2".into(), r_to_db(sq.r2().abs()).into()),
        ("reflectance".into(), bs.reflectance().into()),
        ("transmittance".into(), bs.transmittance().into()),
        ("solved".into(), Cell::Bool(solved)),
    ];
    push_matrix(&mut entries, "sigma", &sigma);
    push_matrix(&mut entries, "sigma_inv", &inverse);
    push_matrix(&mut entries, "sigma_tilde", &tilde);
    entries.extend([
        ("det".to_string(), sigma.det().into()),
        ("trace".to_string(), sigma.trace().into()),
        ("gps_residual".to_string(), sigma.gps_residual().into()),
        ("r_c".to_string(), r_c.into()),
    ]);

    let mut table = Table::new(["quantity", "value"]);
    table.meta.insert("command".into(), Value::from("sigma"));
    for (name, value) in &entries {
        table.push(vec![Cell::Text(name.clone()), value.clone()]);
        let json = match value {
            Cell::Num(x) => jnum(*x),
            Cell::Bool(b) => Value::from(*b),
            _ => jopt(None),
        };
        table.meta.insert(name.clone(), json);
    }
    table.emit(&args.output)
}

fn push_matrix(entries: &mut Vec<(String, Cell)>, name: &str, m: &SigmaMatrix) {
    entries.push((format!("{name}_11"), m.s11().into()));
    entries.push((format!("{name}_12"), m.s12().into()));
    entries.push((format!("{name}_22"), m.s22().into()));
}
