mod output;

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use lsys_primes::conjectures::{baseline_ensemble, run, ConjectureParams, Policy};
use lsys_primes::discrepancy::{
    default_every, level_crossing_census, order_table, shift_scan, trajectory, ShiftPolicy,
};
use lsys_primes::io::{
    parse_count, parse_int_range, parse_order_range, read_input, validate_artifact, write_metadata,
    write_order_table_csv, write_report_json, write_rows_csv, write_trajectory_csv, Metadata,
};
use lsys_primes::morphism::DEFAULT_WORD_BUDGET;
use lsys_primes::{Error, Labeling, LetterStream, Morphism, PrimeSet, Result, TOOL_VERSION};

use output::{emit, meta_json, render_table, to_json_bytes, Format};

#[derive(Parser)]
#[command(
    name = "lsys-primes",
    version,
    about = "Morphic words, primes and their letter discrepancies"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Preset name (phi, z3) or path to a morphism config file
    #[arg(long, global = true, default_value = "phi")]
    morphism: String,
    /// Output format; each command has its own default
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sieve limit; must cover the largest label of the run
    #[arg(long, global = true, value_parser = count)]
    sieve_limit: Option<u64>,
    /// Worker threads; affects speed only
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest explicit word in letters
    #[arg(long, global = true, value_parser = count)]
    budget: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the iterate of order k
    Word {
        #[arg(long)]
        order: u32,
    },
    /// D at n = 2^k for a range of orders
    Table {
        #[arg(long, value_parser = orders, default_value = "10..24")]
        orders: RangeInclusive<u32>,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        shift: i64,
        #[arg(long, default_value_t = 1)]
        stride: u64,
    },
    /// Prime-by-prime counts over ranks 1..=n
    Trajectory {
        #[arg(long, value_parser = count)]
        n: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        shift: i64,
        #[arg(long, default_value_t = 1)]
        stride: u64,
        /// Keep every k-th prime step (default 1 up to 2^16 ranks, 64 above)
        #[arg(long, value_parser = count)]
        every: Option<u64>,
        /// Also write the summary JSON here
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Ranks spent at each level of D
    Census {
        #[arg(long, value_parser = count)]
        n: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        shift: i64,
        #[arg(long, default_value_t = 1)]
        stride: u64,
        /// Levels to report (default: observed minimum to maximum)
        #[arg(long, value_parser = int_range, allow_hyphen_values = true)]
        band: Option<RangeInclusive<i64>>,
    },
    /// D at order k for a range of shifts
    ShiftScan {
        #[arg(long)]
        order: u32,
        #[arg(long, value_parser = int_range, default_value = "0..5", allow_hyphen_values = true)]
        shifts: RangeInclusive<i64>,
        #[arg(long, default_value_t = 1)]
        stride: u64,
        /// Override the bound max(2^(k/2), 64) on |shift|
        #[arg(long)]
        shift_bound: Option<i64>,
    },
    /// Evidence report for one conjecture
    Conjecture(ConjectureArgs),
    /// Seeded ±1 random walks
    Baseline {
        #[arg(long, value_parser = count)]
        steps: u64,
        /// First seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of consecutive seeds
        #[arg(long, value_parser = count)]
        seeds: Option<u64>,
    },
    /// List the primes up to a limit
    Primes {
        #[arg(long, value_parser = count)]
        limit: u64,
        /// Print only the count and digest
        #[arg(long)]
        summary: bool,
    },
    /// Check a file written by this tool
    Validate {
        /// File path, or - for stdin
        path: String,
    },
}

#[derive(Args)]
struct ConjectureArgs {
    /// Conjecture number 1..7
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=7))]
    id: u8,
    /// C1: largest order
    #[arg(long, default_value_t = 24)]
    k_max: u32,
    /// C2: prefix length
    #[arg(long, value_parser = count, default_value = "2^24")]
    n: u64,
    /// C3: base order is 2·k0
    #[arg(long, default_value_t = 5)]
    k0: u32,
    /// C3: number of two-order steps
    #[arg(long, default_value_t = 7)]
    jmax: u32,
    /// C4, C6, C7: order
    #[arg(long, default_value_t = 20)]
    k: u32,
    /// C4: shifts
    #[arg(long, value_parser = int_range, default_value = "0..5", allow_hyphen_values = true)]
    shifts: RangeInclusive<i64>,
    /// C5: k values (orders 2k-1 and 2k)
    #[arg(long, value_parser = orders, default_value = "4..8")]
    ks: RangeInclusive<u32>,
    /// C5: z values (shifts 6z+4 and 6z+5)
    #[arg(long, value_parser = int_range, default_value = "-2..2", allow_hyphen_values = true)]
    zs: RangeInclusive<i64>,
    /// Also write each evidence table as CSV into this directory
    #[arg(long)]
    evidence_dir: Option<PathBuf>,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args)]
struct PolicyArgs {
    /// C1: trailing even orders over which D must grow [default: 5]
    #[arg(long)]
    monotone_window: Option<usize>,
    /// C1: allowed |count_A/count_B - 1| at the largest order [default: 0.05]
    #[arg(long)]
    ratio_band: Option<f64>,
    /// C3: allowed distance of the j-th root from e [default: 0.25]
    #[arg(long)]
    e_band: Option<f64>,
    /// C4: fraction of shifts per class with the expected sign [default: 0.9]
    #[arg(long)]
    sign_agreement: Option<f64>,
    /// C7: allowed |D| in dispersion units [default: 3.0]
    #[arg(long)]
    coin_band: Option<f64>,
    /// C2: last hit below this fraction of n counts as final [default: 0.25]
    #[arg(long)]
    staleness_fraction: Option<f64>,
    /// C4, C6, C7: fewer prime steps make a row inconclusive [default: 32]
    #[arg(long)]
    min_steps: Option<u64>,
    /// C4: floor of the shift bound max(2^(k/2), floor) [default: 64]
    #[arg(long)]
    shift_bound_floor: Option<i64>,
}

impl PolicyArgs {
    fn apply(&self) -> Result<Policy> {
        let mut p = Policy::default();
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { p.$f = v; })* };
        }
        set!(
            monotone_window,
            ratio_band,
            e_band,
            sign_agreement,
            coin_band,
            staleness_fraction,
            min_steps,
            shift_bound_floor
        );
        let unit = |x: f64| x.is_finite() && (0.0..=1.0).contains(&x);
        if !unit(p.sign_agreement) || !unit(p.staleness_fraction) {
            return Err(Error::InvalidArgument("fractions must lie in [0, 1]".into()));
        }
        if [p.ratio_band, p.e_band, p.coin_band]
            .iter()
            .any(|x| !x.is_finite() || *x < 0.0)
        {
            return Err(Error::InvalidArgument("bands must be finite and non-negative".into()));
        }
        if p.shift_bound_floor < 0 {
            return Err(Error::InvalidArgument("shift bound floor must be non-negative".into()));
        }
        Ok(p)
    }
}

fn count(s: &str) -> std::result::Result<u64, String> {
    parse_count(s).map_err(|e| e.to_string())
}

fn orders(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    parse_order_range(s).map_err(|e| e.to_string())
}

fn int_range(s: &str) -> std::result::Result<RangeInclusive<i64>, String> {
    parse_int_range(s).map_err(|e| e.to_string())
}

fn range_text<T: std::fmt::Display>(r: &RangeInclusive<T>) -> String {
    format!("{}..{}", r.start(), r.end())
}

struct Ctx {
    global: Global,
}

impl Ctx {
    fn morphism(&self) -> Result<Arc<Morphism>> {
        let spec = &self.global.morphism;
        let m = match spec.as_str() {
            "phi" | "z3" => Morphism::preset(spec)?,
            path => {
                let p = Path::new(path);
                if !p.is_file() {
                    return Err(Error::InvalidArgument(format!(
                        "{path:?} is neither a preset nor a config file"
                    )));
                }
                let name = p.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
                Morphism::from_json(name, &std::fs::read_to_string(p)?)?
            }
        };
        Ok(Arc::new(m))
    }

    /// Sieve covering `needed`, or the explicit limit if it does.
    fn sieve(&self, needed: i64) -> Result<PrimeSet> {
        let needed = needed.max(2);
        let limit = match self.global.sieve_limit {
            Some(l) if (l as i128) < needed as i128 => {
                return Err(Error::SieveTooSmall { needed, limit: l });
            }
            Some(l) => l,
            None => needed as u64,
        };
        PrimeSet::new(limit)
    }

    fn format(&self, default: Format) -> Format {
        self.global.format.unwrap_or(default)
    }

    fn out(&self) -> Option<&Path> {
        self.global.out.as_deref()
    }

    fn base_meta(&self, command: &str, m: &Morphism) -> Metadata {
        vec![
            ("tool_version".into(), TOOL_VERSION.into()),
            ("command".into(), command.into()),
            ("morphism".into(), m.name().into()),
            ("morphism_digest".into(), m.digest()),
        ]
    }
}

fn push(meta: &mut Metadata, k: &str, v: impl ToString) {
    meta.push((k.to_string(), v.to_string()));
}

fn rows_output(ctx: &Ctx, format: Format, title: &str, meta: &Metadata, rows: &[Value]) -> Result<()> {
    let bytes = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_rows_csv(&mut buf, meta, rows)?;
            buf
        }
        Format::Json => to_json_bytes(&json!({ "meta": meta_json(meta), "rows": rows }))?,
        Format::Table => render_table(title, meta, rows).into_bytes(),
    };
    emit(ctx.out(), &bytes)
}

fn to_rows<T: serde::Serialize>(items: &[T]) -> Result<Vec<Value>> {
    items
        .iter()
        .map(|x| serde_json::to_value(x).map_err(Error::from))
        .collect()
}

fn cmd_word(ctx: &Ctx, order: u32) -> Result<()> {
    let m = ctx.morphism()?;
    let budget = ctx.global.budget.unwrap_or(DEFAULT_WORD_BUDGET);
    let word = m.render(&m.iterate_with_budget(order, budget)?);
    let bytes = match ctx.format(Format::Table) {
        Format::Json => {
            let mut meta = ctx.base_meta("word", &m);
            push(&mut meta, "order", order);
            to_json_bytes(&json!({ "meta": meta_json(&meta), "order": order, "length": word.len(), "word": word }))?
        }
        _ => format!("{word}\n").into_bytes(),
    };
    emit(ctx.out(), &bytes)
}

fn cmd_table(ctx: &Ctx, orders: RangeInclusive<u32>, shift: i64, stride: u64) -> Result<()> {
    let m = ctx.morphism()?;
    let top = *orders.end();
    let n = m
        .iterate_len(top)
        .filter(|_| top < 63)
        .map(|_| 1u64 << top)
        .ok_or(Error::Budget {
            what: "prefix order",
            requested: top as u64,
            limit: 62,
        })?;
    let lab = Labeling::new(shift, stride)?;
    let ps = ctx.sieve(lab.last_label(n)?)?;
    let stream = LetterStream::new(m.clone(), n);
    let rows = order_table(&stream, &lab, &ps, orders.clone())?;
    let mut meta = ctx.base_meta("table", &m);
    push(&mut meta, "orders", range_text(&orders));
    push(&mut meta, "shift", shift);
    push(&mut meta, "stride", stride);
    push(&mut meta, "sieve_limit", ps.limit());
    let bytes = match ctx.format(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_order_table_csv(&mut buf, &meta, &rows)?;
            buf
        }
        Format::Json => to_json_bytes(&json!({ "meta": meta_json(&meta), "rows": rows }))?,
        Format::Table => render_table("D at n = 2^k", &meta, &to_rows(&rows)?).into_bytes(),
    };
    emit(ctx.out(), &bytes)
}

fn cmd_trajectory(
    ctx: &Ctx,
    n: u64,
    shift: i64,
    stride: u64,
    every: Option<u64>,
    summary_path: Option<&Path>,
) -> Result<()> {
    let m = ctx.morphism()?;
    let lab = Labeling::new(shift, stride)?;
    let ps = ctx.sieve(lab.last_label(n.max(1))?)?;
    let every = every.unwrap_or_else(|| default_every(n));
    let stream = LetterStream::new(m.clone(), n);
    let traj = trajectory(&stream, &lab, &ps, n, every)?;
    let bound = ShiftPolicy::for_length(n).shift_bound;

    let mut summary = match serde_json::to_value(&traj.summary)? {
        Value::Object(map) => map,
        _ => Map::new(),
    };
    summary.insert("sieve_limit".into(), json!(ps.limit()));
    summary.insert("policy".into(), json!({ "shift_bound": bound, "every": every }));
    summary.insert("morphism".into(), json!(m.name()));
    summary.insert("morphism_digest".into(), json!(m.digest()));
    summary.insert("tool_version".into(), json!(TOOL_VERSION));
    let summary = Value::Object(summary);
    if let Some(p) = summary_path {
        std::fs::write(p, to_json_bytes(&summary)?)?;
    }

    let mut meta = ctx.base_meta("trajectory", &m);
    push(&mut meta, "n", n);
    push(&mut meta, "shift", shift);
    push(&mut meta, "stride", stride);
    push(&mut meta, "every", every);
    push(&mut meta, "sieve_limit", ps.limit());
    push(&mut meta, "shift_bound", bound);
    let bytes = match ctx.format(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_trajectory_csv(&mut buf, &meta, &traj)?;
            buf
        }
        Format::Json => to_json_bytes(&json!({
            "meta": meta_json(&meta),
            "summary": summary,
            "checkpoints": traj.checkpoints,
        }))?,
        Format::Table => {
            let mut text = render_table("trajectory", &meta, &to_rows(&traj.checkpoints)?);
            text.push_str(&format!("summary: {summary}\n"));
            text.into_bytes()
        }
    };
    emit(ctx.out(), &bytes)
}

fn cmd_census(ctx: &Ctx, n: u64, shift: i64, stride: u64, band: Option<RangeInclusive<i64>>) -> Result<()> {
    let m = ctx.morphism()?;
    let lab = Labeling::new(shift, stride)?;
    let ps = ctx.sieve(lab.last_label(n.max(1))?)?;
    let stream = LetterStream::new(m.clone(), n);
    let band = match band {
        Some(b) => b,
        None => {
            let t = trajectory(&stream, &lab, &ps, n, u64::MAX)?;
            let lo = t
                .summary
                .min_d
                .ok_or_else(|| Error::InvalidArgument("census needs a binary alphabet".into()))?;
            lo..=t.summary.max_d.unwrap_or(lo)
        }
    };
    let census = level_crossing_census(&stream, &lab, &ps, n, band.clone())?;
    let mut meta = ctx.base_meta("census", &m);
    push(&mut meta, "n", n);
    push(&mut meta, "shift", shift);
    push(&mut meta, "stride", stride);
    push(&mut meta, "band", range_text(&band));
    push(&mut meta, "staleness_horizon", census.staleness_horizon);
    push(&mut meta, "sieve_limit", ps.limit());
    rows_output(
        ctx,
        ctx.format(Format::Csv),
        "level census",
        &meta,
        &to_rows(&census.levels)?,
    )
}

fn cmd_shift_scan(ctx: &Ctx, order: u32, shifts: RangeInclusive<i64>, stride: u64, bound: Option<i64>) -> Result<()> {
    let m = ctx.morphism()?;
    if order >= 40 {
        return Err(Error::Budget {
            what: "prefix order",
            requested: order as u64,
            limit: 39,
        });
    }
    let n = 1u64 << order;
    let policy = match bound {
        Some(b) if b >= 0 => ShiftPolicy { shift_bound: b },
        Some(_) => return Err(Error::InvalidArgument("shift bound must be non-negative".into())),
        None => ShiftPolicy::for_length(n),
    };
    let needed = Labeling::new(*shifts.end(), stride)?.last_label(n)?;
    let ps = ctx.sieve(needed)?;
    let stream = LetterStream::new(m.clone(), n);
    let scan = shift_scan(&stream, &ps, n, shifts.clone(), stride, policy)?;
    let rows: Vec<Value> = scan
        .rows
        .iter()
        .map(|r| {
            json!({
                "shift": r.shift,
                "class": r.class,
                "count_A": r.counts[0],
                "count_B": r.counts[1],
                "steps": r.steps,
                "D": r.d,
                "normalized_D": r.normalized_d,
                "ratio": r.ratio,
            })
        })
        .collect();
    let mut meta = ctx.base_meta("shift-scan", &m);
    push(&mut meta, "order", order);
    push(&mut meta, "shifts", range_text(&shifts));
    push(&mut meta, "stride", stride);
    push(&mut meta, "shift_bound", policy.shift_bound);
    push(&mut meta, "sieve_limit", ps.limit());
    rows_output(ctx, ctx.format(Format::Csv), "shift scan", &meta, &rows)
}

fn cmd_conjecture(ctx: &Ctx, a: &ConjectureArgs) -> Result<()> {
    if ctx.global.morphism != "phi" {
        return Err(Error::InvalidArgument(
            "conjecture checks run on the phi morphism only".into(),
        ));
    }
    let params = match a.id {
        1 => ConjectureParams::C1 { k_max: a.k_max },
        2 => ConjectureParams::C2 { n: a.n },
        3 => ConjectureParams::C3 {
            k0: a.k0,
            j_max: a.jmax,
        },
        4 => ConjectureParams::C4 {
            k: a.k,
            shift_min: *a.shifts.start(),
            shift_max: *a.shifts.end(),
        },
        5 => ConjectureParams::C5 {
            k_min: *a.ks.start(),
            k_max: *a.ks.end(),
            z_min: *a.zs.start(),
            z_max: *a.zs.end(),
        },
        6 => ConjectureParams::C6 { k: a.k },
        _ => ConjectureParams::C7 { k: a.k },
    };
    let policy = a.policy.apply()?;
    let ps = ctx.sieve(params.required_sieve_limit()? as i64)?;
    let report = run(&params, &ps, &policy)?;

    if let Some(dir) = &a.evidence_dir {
        std::fs::create_dir_all(dir)?;
        for table in &report.evidence {
            let mut meta: Metadata = vec![
                ("tool_version".into(), TOOL_VERSION.into()),
                ("report".into(), report.id.clone()),
                ("table".into(), table.name.clone()),
                ("params".into(), serde_json::to_string(&report.params)?),
                ("policy".into(), serde_json::to_string(&report.policy)?),
                ("sieve_limit".into(), report.sieve_limit.to_string()),
                (
                    "verdict".into(),
                    serde_json::to_value(report.verdict)?.as_str().unwrap_or("").into(),
                ),
            ];
            meta.retain(|(_, v)| !v.contains('\n'));
            let mut buf = Vec::new();
            write_rows_csv(&mut buf, &meta, &table.rows)?;
            std::fs::write(dir.join(format!("{}_{}.csv", report.id, table.name)), buf)?;
        }
    }

    let bytes = match ctx.format(Format::Json) {
        Format::Json => {
            let mut buf = Vec::new();
            write_report_json(&mut buf, &report)?;
            buf
        }
        Format::Table => {
            let verdict = serde_json::to_value(report.verdict)?;
            let mut text = format!(
                "{}: {}\ncriterion: {}\nparams: {}\nsieve_limit: {}\n\n",
                report.id,
                verdict.as_str().unwrap_or(""),
                report.criterion,
                serde_json::to_string(&report.params)?,
                report.sieve_limit
            );
            for t in &report.evidence {
                text.push_str(&render_table(&t.name, &Vec::new(), &t.rows));
                text.push('\n');
            }
            text.into_bytes()
        }
        Format::Csv => {
            return Err(Error::InvalidArgument(
                "reports are JSON; use --evidence-dir for CSV evidence tables".into(),
            ))
        }
    };
    emit(ctx.out(), &bytes)
}

fn cmd_baseline(ctx: &Ctx, steps: u64, seed: u64, seeds: Option<u64>) -> Result<()> {
    let count = seeds.unwrap_or(1);
    let e = baseline_ensemble(steps, seed, count)?;
    let meta: Metadata = vec![
        ("tool_version".into(), TOOL_VERSION.into()),
        ("command".into(), "baseline".into()),
        ("generator".into(), "ChaCha8, 64 steps per draw, low bit first".into()),
        ("steps".into(), steps.to_string()),
        ("first_seed".into(), seed.to_string()),
        ("seeds".into(), count.to_string()),
        ("mean_final".into(), e.mean_final.to_string()),
        ("std_final".into(), e.std_final.to_string()),
        ("std_ratio".into(), e.std_ratio.to_string()),
        ("repeated_deep".into(), e.repeated_deep.to_string()),
    ];
    match ctx.format(Format::Csv) {
        Format::Json => emit(
            ctx.out(),
            &to_json_bytes(&json!({ "meta": meta_json(&meta), "ensemble": e }))?,
        ),
        f => rows_output(ctx, f, "baseline walks", &meta, &to_rows(&e.walks)?),
    }
}

fn cmd_primes(ctx: &Ctx, limit: u64, summary: bool) -> Result<()> {
    let ps = PrimeSet::new(limit)?;
    let count = ps.prime_count(ps.limit());
    let format = ctx.format(if summary { Format::Json } else { Format::Csv });
    let bytes = match format {
        Format::Json => to_json_bytes(&json!({
            "tool_version": TOOL_VERSION,
            "limit": ps.limit(),
            "count": count,
            "digest": ps.digest(),
        }))?,
        _ if summary => format!("limit {}\ncount {count}\ndigest {}\n", ps.limit(), ps.digest()).into_bytes(),
        _ => {
            let mut buf = Vec::new();
            let meta: Metadata = vec![
                ("tool_version".into(), TOOL_VERSION.into()),
                ("sieve_limit".into(), ps.limit().to_string()),
                ("count".into(), count.to_string()),
            ];
            write_metadata(&mut buf, &meta)?;
            buf.extend_from_slice(b"prime\n");
            ps.dump(&mut buf)?;
            buf
        }
    };
    emit(ctx.out(), &bytes)
}

fn cmd_validate(ctx: &Ctx, path: &str) -> Result<()> {
    let text = read_input(path)?;
    let kind = validate_artifact(&text)?;
    emit(ctx.out(), format!("ok: {kind:?}\n").to_lowercase().as_bytes())
}

fn dispatch(cli: Cli) -> Result<()> {
    if let Some(t) = cli.global.threads {
        if t == 0 {
            return Err(Error::InvalidArgument("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let ctx = Ctx { global: cli.global };
    match cli.command {
        Command::Word { order } => cmd_word(&ctx, order),
        Command::Table { orders, shift, stride } => cmd_table(&ctx, orders, shift, stride),
        Command::Trajectory {
            n,
            shift,
            stride,
            every,
            summary,
        } => cmd_trajectory(&ctx, n, shift, stride, every, summary.as_deref()),
        Command::Census { n, shift, stride, band } => cmd_census(&ctx, n, shift, stride, band),
        Command::ShiftScan {
            order,
            shifts,
            stride,
            shift_bound,
        } => cmd_shift_scan(&ctx, order, shifts, stride, shift_bound),
        Command::Conjecture(a) => cmd_conjecture(&ctx, &a),
        Command::Baseline { steps, seed, seeds } => cmd_baseline(&ctx, steps, seed, seeds),
        Command::Primes { limit, summary } => cmd_primes(&ctx, limit, summary),
        Command::Validate { path } => cmd_validate(&ctx, &path),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
