//! `ldu`: compress, inspect and edit locally decodable containers, and run
//! the exact bounds analysis on small scheme descriptions.
//!
//! Tables go to standard output as tab-separated values; diagnostics go to
//! standard error.

use std::fs::{self, OpenOptions};
use std::io::{Seek, SeekFrom, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ldu::baseline::{self, BaselineParams};
use ldu::bitstore::{ProbeCounter, ProbeLedger};
use ldu::bounds::{big_rational, SchemeDescription};
use ldu::rational::to_f64;
use ldu::scheme::{self, format::payload_byte, meets_rate_target, Transition};
use ldu::{derive_params, parse_decimal, Container, Rational};

/// Seed of the synthetic messages used by `bench`.
const BENCH_SEED: u64 = 0x1d0;

#[derive(Parser)]
#[command(name = "ldu", version, about = "Locally decodable, locally updatable compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress the first `n` bits of a raw file.
    Compress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: String,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        output: PathBuf,
    },
    /// Restore the raw bits of a container.
    Decompress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Read one message bit.
    Get {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        index: u64,
    },
    /// Overwrite one message bit in place.
    Set {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        index: u64,
        #[arg(long)]
        value: u8,
    },
    /// Measure decode and update probes on random messages.
    Audit {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: String,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Exact error analysis of a scheme description file.
    Bounds {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        p: String,
    },
    /// Throughput and locality, optionally against naive blocking.
    Bench {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: String,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        baseline: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<ldu::Error>() {
        return e.exit_code() as u8;
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return 8;
    }
    1
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Compress {
            input,
            n,
            p,
            epsilon,
            output,
        } => compress(&input, n, &p, &epsilon, &output),
        Command::Decompress { input, output } => decompress(&input, &output),
        Command::Get { file, index } => get(&file, index),
        Command::Set { file, index, value } => set(&file, index, value),
        Command::Audit {
            n,
            p,
            epsilon,
            trials,
            seed,
        } => audit(n, &p, &epsilon, trials, seed),
        Command::Bounds { scheme, p } => bounds(&scheme, &p),
        Command::Bench { n, p, epsilon, baseline } => bench(n, &p, &epsilon, baseline),
    }
}

fn rationals(p: &str, epsilon: &str) -> anyhow::Result<(Rational, Rational)> {
    Ok((parse_decimal(p)?, parse_decimal(epsilon)?))
}

/// The first `n` bits of `bytes`, most significant bit first.
fn unpack(bytes: &[u8], n: u64) -> anyhow::Result<Vec<bool>> {
    if n > bytes.len() as u64 * 8 {
        return Err(ldu::Error::Length {
            expected: n as usize,
            actual: bytes.len() * 8,
        }
        .into());
    }
    Ok((0..n as usize).map(|i| bytes[i / 8] >> (7 - i % 8) & 1 == 1).collect())
}

fn pack(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
        out[i / 8] |= 0x80 >> (i % 8);
    }
    out
}

fn load(path: &PathBuf) -> anyhow::Result<Container> {
    let bytes = fs::read(path).map_err(ldu::Error::from).with_context(|| format!("reading {}", path.display()))?;
    Ok(Container::from_bytes(&bytes)?)
}

fn compress(input: &PathBuf, n: u64, p: &str, epsilon: &str, output: &PathBuf) -> anyhow::Result<()> {
    let (p, epsilon) = rationals(p, epsilon)?;
    let raw = fs::read(input).map_err(ldu::Error::from).with_context(|| format!("reading {}", input.display()))?;
    let bits = unpack(&raw, n)?;
    let params = derive_params(n, p, epsilon)?;
    if !meets_rate_target(&params) {
        eprintln!("warning: no parameters reach rate H(p) + 2 epsilon at this length");
    }
    let container = Container::encode(&bits, &params)?;
    let bytes = container.to_bytes();
    fs::write(output, &bytes).map_err(ldu::Error::from).with_context(|| format!("writing {}", output.display()))?;
    println!("n\tfile_bits\trate\tfailed_blocks\tb0\tw0\tL\tb1\tbeta");
    println!(
        "{n}\t{}\t{:.6}\t{}\t{}\t{}\t{}\t{}\t{}",
        bytes.len() * 8,
        to_f64(&params.rate()),
        container.failed_blocks().len(),
        params.b0,
        params.w0,
        params.codeword_bits(),
        params.b1,
        params.beta
    );
    Ok(())
}

fn decompress(input: &PathBuf, output: &PathBuf) -> anyhow::Result<()> {
    let container = load(input)?;
    let decoded = container.decode()?;
    fs::write(output, pack(&decoded.bits))
        .map_err(ldu::Error::from)
        .with_context(|| format!("writing {}", output.display()))?;
    let failed: Vec<String> = decoded.failed_blocks.iter().map(u64::to_string).collect();
    println!("n\tfailed_blocks\tfailed_list");
    println!(
        "{}\t{}\t{}",
        container.params().n,
        failed.len(),
        if failed.is_empty() { "-".to_string() } else { failed.join(",") }
    );
    if !failed.is_empty() {
        eprintln!("warning: {} block(s) could not be recovered exactly", failed.len());
    }
    Ok(())
}

fn get(file: &PathBuf, index: u64) -> anyhow::Result<()> {
    let container = load(file)?;
    let mut probe = ProbeCounter::default();
    let v = container.local_decode(index, &mut probe)?;
    println!("index\tvalue\tprobes");
    println!("{index}\t{}\t{}", v as u8, probe.probe_count());
    Ok(())
}

fn set(file: &PathBuf, index: u64, value: u8) -> anyhow::Result<()> {
    if value > 1 {
        return Err(ldu::Error::Parse(format!("value must be 0 or 1, got {value}")).into());
    }
    let mut container = load(file)?;
    let mut ledger = ProbeLedger::new();
    let outcome = container.local_update(index, value == 1, &mut ledger);
    // Persist whatever was written, including a failure flag.
    let mut touched: Vec<u64> = ledger.writes().iter().map(|&(a, _)| payload_byte(a)).collect();
    touched.sort_unstable();
    touched.dedup();
    if !touched.is_empty() {
        let bytes = container.to_bytes();
        let mut f = OpenOptions::new()
            .write(true)
            .open(file)
            .map_err(ldu::Error::from)
            .with_context(|| format!("opening {}", file.display()))?;
        for b in touched {
            f.seek(SeekFrom::Start(b)).map_err(ldu::Error::from)?;
            f.write_all(&bytes[b as usize..b as usize + 1]).map_err(ldu::Error::from)?;
        }
    }
    let transition = outcome?;
    println!("index\tvalue\tprobes\ttransition");
    println!(
        "{index}\t{value}\t{}\t{}",
        ledger.probe_count(),
        transition_name(transition)
    );
    Ok(())
}

fn transition_name(t: Transition) -> &'static str {
    match t {
        Transition::Unchanged => "unchanged",
        Transition::TypicalToTypical => "typical->typical",
        Transition::TypicalToAtypical => "typical->atypical",
        Transition::AtypicalToAtypical => "atypical->atypical",
        Transition::AtypicalToTypical => "atypical->typical",
    }
}

fn audit(n: u64, p: &str, epsilon: &str, trials: u64, seed: u64) -> anyhow::Result<()> {
    let (p, epsilon) = rationals(p, epsilon)?;
    let params = derive_params(n, p, epsilon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let updates = n.min(10_000);
    let report = scheme::audit(&params, trials, updates, &mut rng)?;
    let sp = params.sparse();
    eprintln!(
        "n={n} b0={} w0={} L={} b1={} beta={} trials={trials} updates/trial={updates}",
        params.b0,
        params.w0,
        params.codeword_bits(),
        params.b1,
        params.beta
    );
    println!("operation\tmax\tmean\tcount\tbound");
    let row = |name: &str, s: &scheme::ProbeStats, bound: String| {
        println!("{name}\t{}\t{:.3}\t{}\t{bound}", s.max, s.mean(), s.count);
    };
    row("decode", &report.decode, params.decode_bound().to_string());
    row("update", &report.update, params.update_bound().to_string());
    for (t, s) in &report.by_transition {
        row(&format!("update:{}", transition_name(*t)), s, "-".into());
    }
    println!(
        "update:constructed\t{}\t-\t-\t{}",
        report.constructed_update,
        params.update_bound()
    );
    println!("sparse:decode_bound\t{}\t-\t-\t-", sp.decode_bound());
    println!("sparse:update_bound\t{}\t-\t-\t-", sp.update_bound());
    println!("sparse:short_itemized\t{}\t-\t-\t-", sp.short_update_itemized());
    println!("sparse:short_simplified\t{}\t-\t-\t-", sp.short_update_simplified());
    println!("failed_blocks\t{}\t-\t-\t-", report.failed_blocks);
    println!("capacity_failures\t{}\t-\t-\t-", report.capacity_failures);
    Ok(())
}

fn bounds(path: &PathBuf, p: &str) -> anyhow::Result<()> {
    let p = parse_decimal(p)?;
    if p > Rational::from_integer(1) {
        bail!(ldu::Error::InvalidParams(format!("probability {p} exceeds 1")));
    }
    let text = fs::read_to_string(path)
        .map_err(ldu::Error::from)
        .with_context(|| format!("reading {}", path.display()))?;
    let desc = SchemeDescription::parse(&text)?;
    let p = big_rational(&p);
    println!("i\tn_eff\tp_e\tcorrected_floor\tholds\tnaive_floor\tnaive_holds");
    for f in desc.check_error_floor(&p) {
        println!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            f.i + 1,
            f.n_eff,
            f.p_e,
            f.corrected_floor,
            f.holds,
            f.naive_floor,
            f.naive_holds
        );
    }
    let set: Vec<String> = desc.greedy_disjoint_set(&p).iter().map(|i| (i + 1).to_string()).collect();
    println!();
    println!("quantity\tvalue");
    println!("greedy_set\t{}", if set.is_empty() { "-".into() } else { set.join(",") });
    match desc.block_error_bound(&p) {
        Ok(b) => {
            println!("block_error_exact\t{}", b.exact);
            println!("block_error_bound\t{}", b.bound);
            println!("bound_holds\t{}", b.exact >= b.bound);
        }
        Err(e) => eprintln!("skipping block error: {e}"),
    }
    let d = desc.degree_report();
    println!("d_wc\t{}", d.d_wc);
    println!("e_wc\t{}", d.e_wc);
    println!("u_wc_proxy\t{}", d.u_wc_proxy);
    println!("d_avg_over_max\t{}", d.d_ratio);
    println!("e_avg_over_max\t{}", d.e_ratio);
    println!("delta_l_avg_over_max\t{}", d.delta_l_ratio);
    println!("d_wc*e_wc\t{}", d.de_product);
    println!("d_wc*u_wc\t{}", d.du_product);
    println!("log2_n\t{:.4}", d.log2_n);
    println!("adaptive_d\t{}", d.adaptive_d);
    println!("adaptive_e\t{}", d.adaptive_e);
    println!("adaptive_u\t{}", d.adaptive_u);
    println!("encoder_degree_identity\t{}", d.encoder_identity);
    println!("decoder_degree_identity\t{}", d.decoder_identity);
    match d.greedy_size_bound {
        Some(b) => println!("greedy_size_bound\t{b}"),
        None => println!("greedy_size_bound\t-"),
    }
    Ok(())
}

fn bench(n: u64, p: &str, epsilon: &str, with_baseline: bool) -> anyhow::Result<()> {
    let (p, epsilon) = rationals(p, epsilon)?;
    let params = derive_params(n, p, epsilon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(BENCH_SEED);
    let loglog = (n as f64).log2().log2();
    let eps = to_f64(&epsilon);
    let updates = n.min(10_000);

    let start = Instant::now();
    let report = scheme::audit(&params, 1, updates, &mut rng)?;
    let elapsed = start.elapsed().as_secs_f64();
    println!("scheme\tn\trate\tr_wc\tt_wc\tr_wc/loglog_n\tt_wc*eps/loglog_n\tr_wc/log_n\tseconds");
    let r = report.decode.max;
    let t = report.update_max();
    println!(
        "ldu\t{n}\t{:.5}\t{r}\t{t}\t{:.3}\t{:.3}\t{:.3}\t{elapsed:.3}",
        to_f64(&params.rate()),
        r as f64 / loglog,
        t as f64 * eps / loglog,
        r as f64 / (n as f64).log2()
    );
    if with_baseline {
        let bp = BaselineParams::derive(n, p, epsilon)?;
        let start = Instant::now();
        let (dec, upd) = baseline::audit(&bp, p, updates, &mut rng)?;
        let elapsed = start.elapsed().as_secs_f64();
        println!(
            "blocking\t{n}\t{:.5}\t{}\t{}\t{:.3}\t{:.3}\t{:.3}\t{elapsed:.3}",
            to_f64(&bp.rate()),
            dec.max,
            upd.max,
            dec.max as f64 / loglog,
            upd.max as f64 * eps / loglog,
            dec.max as f64 / (n as f64).log2()
        );
    }
    Ok(())
}
