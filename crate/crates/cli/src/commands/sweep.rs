use clap::{Args, ValueEnum};
use gpscat::compare::{
    curve, interior_maxima, sweep, Axis, Method, SweepPoint, SweepSpec, CONVENTIONAL_REFLECTANCE,
};
use gpscat::gauss_core::{db_to_r, r_to_db};
use serde_json::{Map, Value};

use crate::args::{Grid, OutputArgs};
use crate::error::{CliError, CliResult};
use crate::output::{jnum, Cell, Table};

#[derive(Debug, Args)]
#[command(
    after_help = "Columns: db, r, then p_<method>_<n> and rate_<method>_<n> for every method and photon number, ratio_gps_conv_<n> when both methods run, and errors (failed cells as method:n:kind, separated by ';')."
)]
pub struct SweepArgs {
    /// Squeezing grid, lo:hi:step, in units of --axis
    #[arg(long, default_value = "0:22:0.1")]
    pub grid: Grid,

    /// Unit of the grid
    #[arg(long, value_enum, default_value_t = AxisArg::Db)]
    pub axis: AxisArg,

    /// Photon numbers, comma separated
    #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
    pub n: Vec<usize>,

    /// Methods, comma separated: gps, homodyne, conventional
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "gps,homodyne,conventional"
    )]
    pub methods: Vec<Method>,

    /// Clock rate in Hz for the rate columns
    #[arg(long, default_value_t = 1e8)]
    pub frep: f64,

    /// Fock cutoff for conventional subtraction (60 up to 10 dB and 100
    /// beyond when absent)
    #[arg(long)]
    pub nmax: Option<usize>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    /// Squeezing level in dB
    Db,
    /// Squeezing parameter r
    R,
}

pub fn run(args: &SweepArgs) -> CliResult<()> {
    let axis = match args.axis {
        AxisArg::Db => Axis::Decibel,
        AxisArg::R => Axis::Squeezing,
    };
    if args.grid.lo < 0.0 {
        return Err(CliError::Usage(format!(
            "sweep grid {} must start at a non-negative squeezing",
            args.grid
        )));
    }
    if has_duplicates(&args.methods) || has_duplicates(&args.n) {
        return Err(CliError::Usage(
            "--methods and --n must not repeat entries".into(),
        ));
    }
    let methods = args.methods.clone();
    let mut spec = SweepSpec::new(
        methods.clone(),
        axis,
        (args.grid.lo, args.grid.hi, args.grid.step),
        args.n.clone(),
        args.frep,
    )?;
    if let Some(cutoff) = args.nmax {
        spec = spec.with_cutoff(cutoff);
    }
    let points = sweep(&spec);
    let ratio = methods.contains(&Method::Gps) && methods.contains(&Method::Conventional);

    let mut columns = vec!["db".to_string(), "r".to_string()];
    for prefix in ["p", "rate"] {
        for m in &methods {
            for n in &args.n {
                columns.push(format!("{prefix}_{}_{n}", m.name()));
            }
        }
    }
    if ratio {
        columns.extend(args.n.iter().map(|n| format!("ratio_gps_conv_{n}")));
    }
    columns.push("errors".into());
    let mut table = Table::new(columns);

    let per_row = methods.len() * args.n.len();
    let mut failed = 0;
    for chunk in points.chunks(per_row) {
        let value = chunk[0].axis_value;
        let (db, r) = match axis {
            Axis::Decibel => (value, db_to_r(value)),
            Axis::Squeezing => (r_to_db(value), value),
        };
        let mut row = vec![Cell::Num(db), Cell::Num(r)];
        row.extend(chunk.iter().map(|p| Cell::from(probability(p))));
        row.extend(
            chunk
                .iter()
                .map(|p| Cell::from(p.outcome.as_ref().ok().map(|res| res.rate))),
        );
        if ratio {
            for &n in &args.n {
                let gps = find(chunk, Method::Gps, n).and_then(probability);
                let conv = find(chunk, Method::Conventional, n).and_then(probability);
                let cell = match (gps, conv) {
                    (Some(g), Some(c)) if c > 0.0 => Cell::Num(g / c),
                    _ => Cell::Empty,
                };
                row.push(cell);
            }
        }
        let errors: Vec<String> = chunk
            .iter()
            .filter_map(|p| {
                p.outcome
                    .as_ref()
                    .err()
                    .map(|e| format!("{}:{}:{}", p.method, p.n, e.kind()))
            })
            .collect();
        failed += errors.len();
        row.push(Cell::Text(errors.join(";")));
        table.push(row);
    }

    let meta = &mut table.meta;
    meta.insert("command".into(), Value::from("sweep"));
    meta.insert(
        "axis".into(),
        Value::from(match axis {
            Axis::Decibel => "db",
            Axis::Squeezing => "r",
        }),
    );
    meta.insert("grid".into(), Value::from(args.grid.to_string()));
    meta.insert("points".into(), Value::from(points.len() / per_row.max(1)));
    meta.insert(
        "methods".into(),
        Value::from(methods.iter().map(|m| m.name()).collect::<Vec<_>>()),
    );
    meta.insert("photon_numbers".into(), Value::from(args.n.clone()));
    meta.insert("rep_rate".into(), jnum(args.frep));
    meta.insert(
        "conventional_reflectance".into(),
        jnum(CONVENTIONAL_REFLECTANCE),
    );
    meta.insert(
        "nmax".into(),
        args.nmax.map_or(Value::from("default"), Value::from),
    );
    meta.insert("failed_cells".into(), Value::from(failed));
    if methods.contains(&Method::Gps) {
        let mut peaks = Map::new();
        for &n in &args.n {
            let c = curve(&points, Method::Gps, n);
            let values: Vec<f64> = c.iter().map(|&(_, p)| p).collect();
            let at: Vec<Value> = interior_maxima(&values)
                .into_iter()
                .map(|i| jnum(c[i].0))
                .collect();
            peaks.insert(n.to_string(), Value::from(at));
        }
        meta.insert("gps_peaks".into(), Value::Object(peaks));
    }
    table.emit(&args.output)
}

fn probability(p: &SweepPoint) -> Option<f64> {
    p.outcome.as_ref().ok().map(|res| res.probability)
}

fn find(chunk: &[SweepPoint], method: Method, n: usize) -> Option<&SweepPoint> {
    chunk.iter().find(|p| p.method == method && p.n == n)
}

fn has_duplicates<T: PartialEq>(items: &[T]) -> bool {
    items
        .iter()
        .enumerate()
        .any(|(i, a)| items[..i].contains(a))
}
