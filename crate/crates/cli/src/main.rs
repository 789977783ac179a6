//! Command-line front end: exact analytics, code-size bounds, codec round
//! trips, and seeded Monte Carlo simulations, emitted as CSV or JSON with a
//! reproducible meta header.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use flatcode_core::analysis::{
    self, average_delay, matroid_rate, moments_decode, p_decode, p_independent, p_total,
    ratio_to_f64,
};
use flatcode_core::bounds::{code_bounds, exact_max_code};
use flatcode_core::channel::corrupt_packets;
use flatcode_core::codes::{CodeError, RancCodec};
use flatcode_core::gf::Field;
use flatcode_core::matroid::{Matroid, Protocol};
use flatcode::output::{Cell, Format, Table};
use flatcode::sim::{
    sim_butterfly, sim_codec, sim_decodable_curve, sim_delay, sim_independent_curve, ExactValue,
    SimConfig, SimResult,
};
use rand_chacha::ChaCha12Rng;
use rand_core::SeedableRng;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProtoArg {
    Saf,
    Rlnc,
    Ranc,
}

impl From<ProtoArg> for Protocol {
    fn from(p: ProtoArg) -> Protocol {
        match p {
            ProtoArg::Saf => Protocol::Saf,
            ProtoArg::Rlnc => Protocol::Rlnc,
            ProtoArg::Ranc => Protocol::Ranc,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Metric {
    Rate,
    Delay,
    Throughput,
    Pind,
    Pdecode,
    Ptotal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SimKind {
    Delay,
    Independent,
    Decodable,
    Codec,
    Butterfly,
}

#[derive(Parser)]
#[command(name = "flatcode", version, about = "flat-based network protocol toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact closed-form analytics.
    Analyze {
        #[arg(value_enum)]
        metric: Metric,
        #[arg(long)]
        protocol: ProtoArg,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Receptions (pind, ptotal).
        #[arg(long)]
        r: Option<usize>,
        /// Independent receptions (pdecode); distribution index (pind).
        #[arg(long)]
        l: Option<usize>,
        /// Decodable-count index (pdecode, ptotal).
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Seeded Monte Carlo simulations.
    Simulate {
        #[arg(value_enum)]
        what: SimKind,
        #[arg(long)]
        protocol: ProtoArg,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Curve length (independent, decodable).
        #[arg(long, default_value_t = 30)]
        rmax: usize,
        /// Injected error packets per trial (codec).
        #[arg(long = "t", default_value_t = 0)]
        injections: usize,
        /// Dropped packets per trial (codec).
        #[arg(long, default_value_t = 0)]
        loss: usize,
        /// Designed rank distance of the payload code (codec).
        #[arg(long)]
        dist: Option<usize>,
        #[arg(long)]
        trials: u64,
        #[arg(long, env = "FLATCODE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Cardinality bounds for codes on affine flats.
    Bounds {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        /// Also compute the exact optimum (enumerable instances only).
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Single encode→corrupt→decode round trip.
    Codec {
        #[command(subcommand)]
        action: CodecAction,
    },
    /// The per-protocol parameter table at one (q, n, k) point.
    Table1 {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum CodecAction {
    Roundtrip {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long = "t", default_value_t = 0)]
        injections: usize,
        #[arg(long, env = "FLATCODE_SEED", default_value_t = 0)]
        seed: u64,
    },
}

/// Errors that map to the usage exit code.
struct UsageError(String);

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, UsageError> {
    match cli.cmd {
        Cmd::Analyze {
            metric,
            protocol,
            q,
            n,
            k,
            r,
            l,
            d,
            format,
        } => {
            let table = analyze(metric, protocol.into(), q, n, k, r, l, d)?;
            print!("{}", table.render(format.into()));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Simulate {
            what,
            protocol,
            q,
            n,
            k,
            rmax,
            injections,
            loss,
            dist,
            trials,
            seed,
        } => {
            if trials == 0 {
                return Err(usage("--trials must be at least 1"));
            }
            let table = simulate(
                what,
                protocol.into(),
                q,
                n,
                k,
                rmax,
                injections,
                loss,
                dist,
                trials,
                seed,
            )?;
            print!("{}", table.render(Format::Csv));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bounds {
            q,
            n,
            k,
            d,
            exact,
            format,
        } => {
            let table = bounds_table(q, n, k, d, exact)?;
            print!("{}", table.render(format.into()));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Codec {
            action:
                CodecAction::Roundtrip {
                    q,
                    n,
                    k,
                    d,
                    injections,
                    seed,
                },
        } => codec_roundtrip(q, n, k, d, injections, seed),
        Cmd::Table1 { q, n, k } => {
            let table = table1(q, n, k)?;
            print!("{}", table.render(Format::Csv));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn check_params(kind: Protocol, q: u64, n: usize, k: usize) -> Result<(), UsageError> {
    Field::of_order(q).map_err(|e| usage(format!("unsupported field order {q}: {e}")))?;
    if n == 0 || k == 0 {
        return Err(usage("--n and --k must be positive"));
    }
    let max_k = match kind {
        Protocol::Saf => usize::MAX,
        Protocol::Rlnc => n,
        Protocol::Ranc => n + 1,
    };
    if k > max_k {
        return Err(usage(format!("k={k} exceeds the matroid rank")));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn analyze(
    metric: Metric,
    kind: Protocol,
    q: u64,
    n: usize,
    k: usize,
    r: Option<usize>,
    l: Option<usize>,
    d: Option<usize>,
) -> Result<Table, UsageError> {
    check_params(kind, q, n, k)?;
    let base = |t: &mut Table| {
        t.meta("protocol", kind.name())
            .meta("q", q)
            .meta("n", n)
            .meta("k", k);
    };
    match metric {
        Metric::Rate => {
            let rep = matroid_rate(kind, q, n, k);
            let mut t = Table::new(
                "analyze.rate",
                vec!["protocol", "q", "n", "k", "num_flats", "log_q_flats", "rate"],
            );
            base(&mut t);
            t.row(vec![
                Cell::Text(kind.name().into()),
                Cell::UInt(q),
                Cell::UInt(n as u64),
                Cell::UInt(k as u64),
                Cell::Big(rep.num_flats),
                Cell::Float(rep.log_q_flats),
                Cell::Float(rep.rate),
            ]);
            Ok(t)
        }
        Metric::Delay => {
            let exact = average_delay(kind, q, k);
            let mut t = Table::new(
                "analyze.delay",
                vec!["protocol", "q", "n", "k", "delay_exact", "delay"],
            );
            base(&mut t);
            t.row(vec![
                Cell::Text(kind.name().into()),
                Cell::UInt(q),
                Cell::UInt(n as u64),
                Cell::UInt(k as u64),
                Cell::Rational(exact.clone()),
                Cell::Float(ratio_to_f64(&exact)),
            ]);
            Ok(t)
        }
        Metric::Throughput => {
            let rate = matroid_rate(kind, q, n, k).rate;
            let delay = ratio_to_f64(&average_delay(kind, q, k));
            let mut t = Table::new(
                "analyze.throughput",
                vec!["protocol", "q", "n", "k", "rate", "delay", "throughput"],
            );
            base(&mut t);
            t.row(vec![
                Cell::Text(kind.name().into()),
                Cell::UInt(q),
                Cell::UInt(n as u64),
                Cell::UInt(k as u64),
                Cell::Float(rate),
                Cell::Float(delay),
                Cell::Float(k as f64 * rate / delay),
            ]);
            Ok(t)
        }
        Metric::Pind => {
            let r = r.ok_or_else(|| usage("pind requires --r"))?;
            let mut t = Table::new(
                "analyze.pind",
                vec!["protocol", "q", "n", "k", "r", "l", "p_exact", "p"],
            );
            base(&mut t);
            t.meta("r", r);
            let ls: Vec<usize> = match l {
                Some(l) => vec![l],
                None => (0..=k.min(r)).collect(),
            };
            for l in ls {
                if l > k {
                    return Err(usage(format!("l={l} exceeds k={k}")));
                }
                let p = p_independent(kind, q, k, r, l);
                t.row(vec![
                    Cell::Text(kind.name().into()),
                    Cell::UInt(q),
                    Cell::UInt(n as u64),
                    Cell::UInt(k as u64),
                    Cell::UInt(r as u64),
                    Cell::UInt(l as u64),
                    Cell::Rational(p.clone()),
                    Cell::Float(ratio_to_f64(&p)),
                ]);
            }
            Ok(t)
        }
        Metric::Pdecode => {
            let l = l.ok_or_else(|| usage("pdecode requires --l"))?;
            if l > k {
                return Err(usage(format!("l={l} exceeds k={k}")));
            }
            let mut t = Table::new(
                "analyze.pdecode",
                vec!["protocol", "q", "n", "k", "l", "d", "p_exact", "p"],
            );
            base(&mut t);
            t.meta("l", l);
            let ds: Vec<usize> = match d {
                Some(d) => vec![d],
                None => (0..=l).collect(),
            };
            for d in ds {
                let p = p_decode(kind, q, k, l, d)
                    .map_err(|e| usage(format!("pdecode parameters: {e}")))?;
                t.row(vec![
                    Cell::Text(kind.name().into()),
                    Cell::UInt(q),
                    Cell::UInt(n as u64),
                    Cell::UInt(k as u64),
                    Cell::UInt(l as u64),
                    Cell::UInt(d as u64),
                    Cell::Rational(p.clone()),
                    Cell::Float(ratio_to_f64(&p)),
                ]);
            }
            // Expectation row is often what plots want; expose via meta.
            let (e, _) = moments_decode(kind, q, k, l)
                .map_err(|e| usage(format!("pdecode parameters: {e}")))?;
            t.meta("expected", ratio_to_f64(&e));
            Ok(t)
        }
        Metric::Ptotal => {
            let r = r.ok_or_else(|| usage("ptotal requires --r"))?;
            let mut t = Table::new(
                "analyze.ptotal",
                vec!["protocol", "q", "n", "k", "r", "d", "p_exact", "p"],
            );
            base(&mut t);
            t.meta("r", r);
            let ds: Vec<usize> = match d {
                Some(d) => vec![d],
                None => (0..=k.min(r)).collect(),
            };
            for d in ds {
                let p = p_total(kind, q, k, r, d);
                t.row(vec![
                    Cell::Text(kind.name().into()),
                    Cell::UInt(q),
                    Cell::UInt(n as u64),
                    Cell::UInt(k as u64),
                    Cell::UInt(r as u64),
                    Cell::UInt(d as u64),
                    Cell::Rational(p.clone()),
                    Cell::Float(ratio_to_f64(&p)),
                ]);
            }
            Ok(t)
        }
    }
}

fn sim_table(
    command: &str,
    kind: Protocol,
    config: &SimConfig,
    res: &SimResult,
    exact_as_rational: bool,
    with_r: bool,
) -> Table {
    let mut cols = vec!["protocol", "q", "n", "k", "trials", "seed"];
    if with_r {
        cols.push("r");
    }
    cols.extend(["mean", "var", "stderr", "exact"]);
    let mut t = Table::new(command, cols);
    t.meta("protocol", kind.name())
        .meta("q", config.q)
        .meta("n", config.n)
        .meta("k", config.k)
        .meta("trials", config.trials)
        .meta("seed", config.seed);
    for row in &res.rows {
        let mut cells = vec![
            Cell::Text(kind.name().into()),
            Cell::UInt(config.q),
            Cell::UInt(config.n as u64),
            Cell::UInt(config.k as u64),
            Cell::UInt(config.trials),
            Cell::UInt(config.seed),
        ];
        if with_r {
            cells.push(Cell::UInt(row.r.unwrap_or(0) as u64));
        }
        cells.push(Cell::Float(row.mean));
        cells.push(Cell::Float(row.var));
        cells.push(Cell::Float(row.stderr));
        cells.push(match &row.exact {
            Some(ExactValue::Rational(r)) if exact_as_rational => Cell::Rational(r.clone()),
            Some(e) => Cell::Float(e.as_f64()),
            None => Cell::Empty,
        });
        t.row(cells);
    }
    eprintln!("# wall_time_ms={}", res.wall.as_millis());
    t
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    what: SimKind,
    kind: Protocol,
    q: u64,
    n: Option<usize>,
    k: Option<usize>,
    rmax: usize,
    injections: usize,
    loss: usize,
    dist: Option<usize>,
    trials: u64,
    seed: u64,
) -> Result<Table, UsageError> {
    let need = |name: &str, v: Option<usize>| v.ok_or_else(|| usage(format!("{name} required")));
    match what {
        SimKind::Delay => {
            let (n, k) = (need("--n", n)?, need("--k", k)?);
            check_params(kind, q, n, k)?;
            let config = SimConfig::new(kind, q, n, k, trials, seed);
            let res = sim_delay(&config);
            Ok(sim_table("simulate.delay", kind, &config, &res, true, false))
        }
        SimKind::Independent => {
            let (n, k) = (need("--n", n)?, need("--k", k)?);
            check_params(kind, q, n, k)?;
            let mut config = SimConfig::new(kind, q, n, k, trials, seed);
            config.r_max = rmax;
            let res = sim_independent_curve(&config);
            Ok(sim_table(
                "simulate.independent",
                kind,
                &config,
                &res,
                false,
                true,
            ))
        }
        SimKind::Decodable => {
            let (n, k) = (need("--n", n)?, need("--k", k)?);
            check_params(kind, q, n, k)?;
            let mut config = SimConfig::new(kind, q, n, k, trials, seed);
            config.r_max = rmax;
            let res = sim_decodable_curve(&config);
            Ok(sim_table(
                "simulate.decodable",
                kind,
                &config,
                &res,
                false,
                true,
            ))
        }
        SimKind::Codec => {
            let (n, k) = (need("--n", n)?, need("--k", k)?);
            check_params(kind, q, n, k)?;
            let dist = need("--dist", dist)?;
            let mut config = SimConfig::new(kind, q, n, k, trials, seed);
            config.injections = injections;
            config.loss = loss;
            config.dist = dist;
            let res = sim_codec(&config).map_err(|e| usage(format!("codec setup: {e}")))?;
            let mut t = Table::new(
                "simulate.codec",
                vec![
                    "protocol",
                    "q",
                    "n",
                    "k",
                    "dist",
                    "t",
                    "loss",
                    "trials",
                    "seed",
                    "successes",
                    "rank_deficient",
                    "decode_failures",
                    "wrong_message",
                    "success_rate",
                ],
            );
            t.meta("protocol", kind.name())
                .meta("q", q)
                .meta("n", n)
                .meta("k", k)
                .meta("dist", dist)
                .meta("t", injections)
                .meta("loss", loss)
                .meta("trials", trials)
                .meta("seed", seed);
            t.row(vec![
                Cell::Text(kind.name().into()),
                Cell::UInt(q),
                Cell::UInt(n as u64),
                Cell::UInt(k as u64),
                Cell::UInt(dist as u64),
                Cell::UInt(injections as u64),
                Cell::UInt(loss as u64),
                Cell::UInt(trials),
                Cell::UInt(seed),
                Cell::UInt(res.successes),
                Cell::UInt(res.rank_deficient),
                Cell::UInt(res.decode_failures),
                Cell::UInt(res.wrong_message),
                Cell::Float(res.success_rate()),
            ]);
            for t_idx in &res.failed_trials {
                eprintln!("# unsuccessful trial index={t_idx} (seed={seed}, stream={})", t_idx + 1);
            }
            eprintln!("# wall_time_ms={}", res.wall.as_millis());
            Ok(t)
        }
        SimKind::Butterfly => {
            if kind == Protocol::Saf {
                return Err(usage("butterfly applies to rlnc or ranc"));
            }
            let res = sim_butterfly(kind, q, trials, seed);
            let row = &res.rows[0];
            let mut t = Table::new(
                "simulate.butterfly",
                vec![
                    "protocol",
                    "q",
                    "trials",
                    "seed",
                    "successes",
                    "success_rate",
                    "exact",
                ],
            );
            t.meta("protocol", kind.name())
                .meta("q", q)
                .meta("trials", trials)
                .meta("seed", seed);
            t.row(vec![
                Cell::Text(kind.name().into()),
                Cell::UInt(q),
                Cell::UInt(trials),
                Cell::UInt(seed),
                Cell::UInt((row.mean * trials as f64).round() as u64),
                Cell::Float(row.mean),
                Cell::Float(row.exact.as_ref().expect("closed form").as_f64()),
            ]);
            eprintln!("# wall_time_ms={}", res.wall.as_millis());
            Ok(t)
        }
    }
}

fn bounds_table(q: u64, n: usize, k: usize, d: usize, exact: bool) -> Result<Table, UsageError> {
    let mut report = code_bounds(q, n, k, d).map_err(|e| usage(format!("bounds: {e}")))?;
    if exact {
        let field = Field::of_order(q).map_err(|e| usage(format!("field: {e}")))?;
        let m = Matroid::new(Protocol::Ranc, field, n);
        let v = exact_max_code(&m, k, d).map_err(|e| usage(format!("exact bound: {e}")))?;
        report.exact = Some(v);
    }
    let mut t = Table::new(
        "bounds",
        vec![
            "q",
            "n",
            "k",
            "d",
            "lower_lifted",
            "upper_projective",
            "johnson_contraction",
            "johnson_restriction",
            "singleton",
            "exact",
        ],
    );
    t.meta("q", q).meta("n", n).meta("k", k).meta("d", d);
    t.row(vec![
        Cell::UInt(q),
        Cell::UInt(n as u64),
        Cell::UInt(k as u64),
        Cell::UInt(d as u64),
        Cell::Big(report.lower_lifted),
        Cell::Big(report.upper_projective),
        Cell::Big(report.johnson_contraction),
        Cell::Big(report.johnson_restriction),
        Cell::Big(report.singleton),
        report.exact.map_or(Cell::Empty, Cell::Big),
    ]);
    Ok(t)
}

fn codec_roundtrip(
    q: u64,
    n: usize,
    k: usize,
    d: usize,
    injections: usize,
    seed: u64,
) -> Result<ExitCode, UsageError> {
    let field = Field::of_order(q).map_err(|e| usage(format!("field: {e}")))?;
    let codec =
        RancCodec::new(field, n, k, d).map_err(|e| usage(format!("codec parameters: {e}")))?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let msg = codec.random_message(&mut rng);
    let sent = codec.encode(&msg).expect("valid message");
    let flat = codec.matroid().closure(&sent).expect("valid packets");
    let mut received = Vec::new();
    while codec.matroid().rank_of(&received).expect("valid") < k {
        received.push(codec.matroid().sample_element(&flat, &mut rng).expect("nonempty"));
    }
    let received = corrupt_packets(codec.matroid(), &received, injections, 0, &mut rng);
    let (status, matched) = match codec.decode(&received) {
        Ok(got) => ("ok", got == msg),
        Err(CodeError::RankDeficient) => ("rank_deficient", false),
        Err(_) => ("decode_failure", false),
    };
    let mut t = Table::new(
        "codec.roundtrip",
        vec!["q", "n", "k", "d", "t", "seed", "status", "message_match"],
    );
    t.meta("q", q)
        .meta("n", n)
        .meta("k", k)
        .meta("d", d)
        .meta("t", injections)
        .meta("seed", seed);
    t.row(vec![
        Cell::UInt(q),
        Cell::UInt(n as u64),
        Cell::UInt(k as u64),
        Cell::UInt(d as u64),
        Cell::UInt(injections as u64),
        Cell::UInt(seed),
        Cell::Text(status.into()),
        Cell::Text(matched.to_string()),
    ]);
    print!("{}", t.render(Format::Csv));
    if status == "ok" && matched {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}

fn table1(q: u64, n: usize, k: usize) -> Result<Table, UsageError> {
    for kind in [Protocol::Saf, Protocol::Rlnc, Protocol::Ranc] {
        check_params(kind, q, n, k)?;
    }
    let field = Field::of_order(q).map_err(|e| usage(format!("field: {e}")))?;
    let mut t = Table::new("table1", vec!["parameter", "saf", "rlnc", "ranc"]);
    t.meta("q", q).meta("n", n).meta("k", k);
    let kinds = [Protocol::Saf, Protocol::Rlnc, Protocol::Ranc];
    let per = |f: &dyn Fn(Protocol) -> Cell| -> Vec<Cell> { kinds.iter().map(|&p| f(p)).collect() };

    let rank_cells = per(&|p| Cell::Big(Matroid::new(p, field.clone(), n).rank()));
    let nk_cells = per(&|p| Cell::Big(analysis::flat_count(p, q, n, k)));
    let ck_cells = per(&|p| Cell::Big(analysis::flat_cardinality(p, q, k)));
    let rate_cells = per(&|p| Cell::Float(matroid_rate(p, q, n, k).rate));
    let delay_cells = per(&|p| Cell::Float(ratio_to_f64(&average_delay(p, q, k))));
    let tput_cells = per(&|p| Cell::Float(analysis::throughput(p, q, n, k)));

    let mut push = |name: &str, cells: Vec<Cell>| {
        let mut row = vec![Cell::Text(name.into())];
        row.extend(cells);
        t.row(row);
    };
    push("matroid_rank", rank_cells);
    push("num_flats", nk_cells);
    push("flat_cardinality", ck_cells);
    push("rate", rate_cells);
    push("avg_delay", delay_cells);
    push("throughput", tput_cells);
    Ok(t)
}
