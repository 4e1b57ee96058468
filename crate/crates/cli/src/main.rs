mod spec;
mod store;

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qspicb_core::pipeline::{self, corrupt_bar};
use qspicb_core::{
    build_module, compute, kl_oracle, levi_to_shape, Computation, CoxeterGroup, CoxeterType, Error,
    HeckeAlgebra, Result, TransitionMatrix,
};
use spec::{format_bits, Output, RunSpec, SpecArgs};
use store::{write_atomic, Cache};

#[derive(Parser)]
#[command(
    name = "qspicb",
    version,
    about = "i-canonical bases of tensor modules for quantum symmetric pairs of type AIII"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    A,
    B,
}

impl From<Kind> for CoxeterType {
    fn from(k: Kind) -> Self {
        match k {
            Kind::A => CoxeterType::A,
            Kind::B => CoxeterType::B,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the canonical basis and write the requested outputs.
    Compute(SpecArgs),
    /// Check involutivity, the based-module axioms, positivity and triangularity.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Perturb one entry of the involution before checking.
        #[arg(long, hide = true)]
        corrupt_bar: bool,
    },
    /// Compare with the parabolic Kazhdan-Lusztig basis (b must be all zeros).
    Oracle {
        #[command(flatten)]
        spec: SpecArgs,
        /// Use the U-module involution and type A Hecke algebra instead.
        #[arg(long, value_enum, default_value = "b")]
        kind: Kind,
    },
    /// Write the (parabolic) Kazhdan-Lusztig matrix of W(A_{s-1}) or W(B_s).
    Kl {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(short, long)]
        s: usize,
        /// Generators of the parabolic subgroup.
        #[arg(short, long, value_delimiter = ',')]
        levi: Vec<usize>,
        #[arg(short, long, default_value = ".")]
        out: std::path::PathBuf,
    },
    /// Print the shape, dimension and standard labels of a module.
    Module(SpecArgs),
    /// Run a small end-to-end check.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidShape(_) | Error::Json(_) => 2,
        _ => 1,
    }
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Compute(args) => cmd_compute(&args.resolve()?),
        Command::Verify { spec, corrupt_bar } => cmd_verify(&spec.resolve()?, corrupt_bar),
        Command::Oracle { spec, kind } => cmd_oracle(&spec.resolve()?, kind.into()),
        Command::Kl { kind, s, levi, out } => cmd_kl(kind.into(), s, &levi, &out),
        Command::Module(args) => cmd_module(&args.resolve()?),
        Command::Selftest => cmd_selftest(),
    }
}

fn stem(spec: &RunSpec) -> String {
    let levi: Vec<String> = spec.levi.iter().map(|x| x.to_string()).collect();
    format!(
        "b{}_l{}_N{}_{:?}",
        format_bits(&spec.b).replace(',', ""),
        levi.join(""),
        spec.config.rank,
        spec.config.convention
    )
    .to_lowercase()
}

fn cache_key(spec: &RunSpec, what: &str) -> String {
    json!({
        "what": what,
        "version": env!("CARGO_PKG_VERSION"),
        "config": spec.config,
        "b": spec.b,
        "levi": spec.levi,
    })
    .to_string()
}

/// The computation, built at most once.
struct Lazy<'a> {
    spec: &'a RunSpec,
    comp: Option<Computation>,
}

impl Lazy<'_> {
    fn get(&mut self) -> Result<&Computation> {
        if self.comp.is_none() {
            self.comp = Some(compute(&self.spec.b, &self.spec.levi, &self.spec.config)?);
        }
        Ok(self.comp.as_ref().unwrap())
    }
}

fn cached_matrix(
    cache: &Cache,
    spec: &RunSpec,
    what: &str,
    make: impl FnOnce() -> Result<TransitionMatrix>,
) -> Result<TransitionMatrix> {
    cache.get_or(
        &cache_key(spec, what),
        TransitionMatrix::from_json,
        TransitionMatrix::to_json,
        make,
    )
}

fn write_matrix(dir: &Path, name: &str, t: &TransitionMatrix) -> Result<()> {
    write_atomic(&dir.join(format!("{name}.json")), &t.to_json())?;
    write_atomic(&dir.join(format!("{name}.csv")), &t.to_csv())
}

fn cmd_compute(spec: &RunSpec) -> Result<bool> {
    let cache = Cache::from_env();
    let stem = stem(spec);
    let mut lazy = Lazy { spec, comp: None };
    let canonical = cached_matrix(&cache, spec, "canonical", || {
        Ok(lazy.get()?.canonical.clone())
    })?;
    let mut files = Vec::new();
    if spec.outputs.contains(&Output::Matrix) {
        write_matrix(&spec.out, &stem, &canonical)?;
        files.push(format!("{stem}.json"));
    }
    if spec.outputs.contains(&Output::Q1) {
        write_atomic(
            &spec.out.join(format!("{stem}_q1.csv")),
            &canonical.at_one_csv(),
        )?;
        files.push(format!("{stem}_q1.csv"));
    }
    if spec.outputs.contains(&Output::Dual) {
        let dual = cached_matrix(&cache, spec, "dual", || lazy.get()?.dual())?;
        write_matrix(&spec.out, &format!("{stem}_dual"), &dual)?;
        files.push(format!("{stem}_dual.json"));
    }
    let mut ok = true;
    if spec.outputs.contains(&Output::Verify) {
        ok &= verify_and_write(lazy.get()?, spec, &stem)?;
        files.push(format!("{stem}_verify.json"));
    }
    if spec.outputs.contains(&Output::Oracle) {
        ok &= oracle_and_write(spec, CoxeterType::B, &stem)?;
        files.push(format!("{stem}_oracle.json"));
    }
    for f in files {
        println!("{}", spec.out.join(f).display());
    }
    Ok(ok)
}

fn verify_and_write(comp: &Computation, spec: &RunSpec, stem: &str) -> Result<bool> {
    let v = pipeline::verify(comp)?;
    let conv = spec.config.convention;
    let failure = v.first_failure(conv);
    let report =
        json!({ "spec": spec, "passed": failure.is_none(), "first_failure": failure, "checks": v });
    write_atomic(
        &spec.out.join(format!("{stem}_verify.json")),
        &serde_json::to_string_pretty(&report)?,
    )?;
    match failure {
        None => println!("verify: all checks passed"),
        Some(name) => println!("verify: {name} failed"),
    }
    Ok(failure.is_none())
}

fn cmd_verify(spec: &RunSpec, corrupt: bool) -> Result<bool> {
    let stem = stem(spec);
    let mut comp = compute(&spec.b, &spec.levi, &spec.config)?;
    if corrupt {
        corrupt_bar(&mut comp.bar);
    }
    let ok = verify_and_write(&comp, spec, &stem)?;
    println!("{}", spec.out.join(format!("{stem}_verify.json")).display());
    Ok(ok)
}

fn oracle_and_write(spec: &RunSpec, kind: CoxeterType, stem: &str) -> Result<bool> {
    if spec.b.iter().any(|&x| x != 0) {
        return Err(Error::Config(
            "the oracle needs a b-sequence of zeros".into(),
        ));
    }
    let c = kl_oracle(kind, spec.b.len(), &spec.levi, spec.config.rank)?;
    let report = json!({ "equal": c.equal(), "comparison": c });
    write_atomic(
        &spec.out.join(format!("{stem}_oracle.json")),
        &serde_json::to_string_pretty(&report)?,
    )?;
    println!(
        "oracle: {} labels, {}",
        c.labels.len(),
        if c.equal() { "equal" } else { "different" }
    );
    Ok(c.equal())
}

fn cmd_oracle(spec: &RunSpec, kind: CoxeterType) -> Result<bool> {
    let stem = stem(spec);
    let ok = oracle_and_write(spec, kind, &stem)?;
    println!("{}", spec.out.join(format!("{stem}_oracle.json")).display());
    Ok(ok)
}

fn cmd_kl(kind: CoxeterType, s: usize, levi: &[usize], out: &Path) -> Result<bool> {
    let cache = Cache::from_env();
    let key = json!({ "what": "parabolic-kl", "kind": kind, "s": s, "levi": levi }).to_string();
    let t = cache.get_or(
        &key,
        TransitionMatrix::from_json,
        TransitionMatrix::to_json,
        || {
            HeckeAlgebra::new(std::sync::Arc::new(CoxeterGroup::new(kind, s)?))
                .parabolic_kl_matrix(levi)
        },
    )?;
    let levi_str: Vec<String> = levi.iter().map(|x| x.to_string()).collect();
    let name = format!("kl_{kind:?}{s}_l{}", levi_str.join("")).to_lowercase();
    write_matrix(out, &name, &t)?;
    println!("{}", out.join(format!("{name}.json")).display());
    Ok(true)
}

fn label_string(label: &[i32]) -> String {
    let parts: Vec<String> = label
        .iter()
        .map(|&x| {
            if x % 2 == 0 {
                (x / 2).to_string()
            } else {
                format!("{x}/2")
            }
        })
        .collect();
    format!("({})", parts.join(","))
}

fn cmd_module(spec: &RunSpec) -> Result<bool> {
    let shape = levi_to_shape(&spec.b, &spec.levi)?;
    let m = build_module(&shape, &spec.config)?;
    let summary = json!({
        "a0": shape.a0,
        "blocks": shape.blocks,
        "dim": m.dim(),
        "labels": m.labels.iter().map(|l| label_string(l)).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(true)
}

fn cmd_selftest() -> Result<bool> {
    let mut ok = true;
    for p in pipeline::grid(2, &[2, 4]) {
        for conv in [
            qspicb_core::Convention::Part2,
            qspicb_core::Convention::Part3,
        ] {
            let mut cfg = qspicb_core::QSPConfig::new(p.rank, conv);
            cfg.height_cap = 6;
            let comp = compute(&p.b_seq, &p.levi, &cfg)?;
            let v = pipeline::verify(&comp)?;
            let failure = v.first_failure(conv);
            ok &= failure.is_none();
            println!(
                "{} b={} levi={:?} N={} {conv:?}: {}",
                if failure.is_none() { "ok  " } else { "FAIL" },
                format_bits(&p.b_seq),
                p.levi,
                p.rank,
                failure.unwrap_or("all checks")
            );
        }
    }
    for (s, levi) in [(1, vec![]), (2, vec![0]), (2, vec![1])] {
        let c = kl_oracle(CoxeterType::B, s, &levi, 2 * s)?;
        ok &= c.equal();
        println!(
            "{} oracle s={s} levi={levi:?}",
            if c.equal() { "ok  " } else { "FAIL" }
        );
    }
    Ok(ok)
}
