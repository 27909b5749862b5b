use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dyncool::certify::{all_pass, run_suite, summarize, CertificationRecord, SuiteConfig};
use dyncool::experiment::{emit, run_experiment, write_atomic, ExperimentConfig, OutputFormat};
use dyncool::format::{read_polynomial, write_certification_csv, write_polynomial};
use dyncool::gqsp::{assemble_and_extract, complete, compute_angles, polynomial_of_unitary, DEFAULT_MARGIN};
use dyncool::operator::{spectral_norm, UnitaryOperator};
use dyncool::random::{haar_unitary, rng_for};
use dyncool::signfun::{build_sign_fourier, build_sign_poly, certify_fourier, certify_poly, degree_bound, CERT_GRID};

#[derive(Parser)]
#[command(name = "dyncool", version, about = "Dynamical cooling simulator and certification suite")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Structured,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Structured => OutputFormat::Structured,
        }
    }
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "structured")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run a cooling experiment from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Also run the certification suite and attach it to the record.
        #[arg(long)]
        certify: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run the certification sweeps. `--trials` sets the trajectory count for
    /// the cooling claims (default: skipped).
    Certify {
        #[command(flatten)]
        common: Common,
    },
    /// Complete a polynomial file and synthesize its angle sequence.
    Gqsp {
        /// Polynomial document.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
        /// Dimension of the random unitary used to check the circuit.
        #[arg(long, default_value_t = 4)]
        check_dim: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Build and certify the sign approximation.
    Signpoly {
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        common: Common,
    },
}

fn print_records(records: &[CertificationRecord]) {
    for r in summarize(records) {
        println!(
            "{} {:<28} measured {:.6e}  bound {:.6e}  slack {:.1e}  [{}]",
            if r.pass { "PASS" } else { "FAIL" },
            r.claim,
            r.measured,
            r.bound,
            r.slack,
            r.instance
        );
    }
}

fn write_records(records: &[CertificationRecord], format: Format, dir: &Path, stem: &str) -> dyncool::Result<PathBuf> {
    let (path, text) = match format {
        Format::Csv => (dir.join(format!("{stem}.csv")), write_certification_csv(records)),
        Format::Structured => (
            dir.join(format!("{stem}.json")),
            serde_json::to_string_pretty(records).expect("records serialize") + "\n",
        ),
    };
    write_atomic(&path, &text)?;
    Ok(path)
}

fn run(command: Command) -> dyncool::Result<bool> {
    match command {
        Command::Run { config, certify, common } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            if let Some(trials) = common.trials {
                cfg.trials = trials;
            }
            if common.out.is_some() {
                cfg.output = common.out.clone();
            }
            let mut record = run_experiment(&cfg)?;
            println!(
                "run {}: {} trials, success fraction {:.4}",
                record.config_hash,
                record.trials.len(),
                record.success_fraction()
            );
            let mut ok = true;
            if certify {
                let suite = run_suite(&SuiteConfig {
                    seed: cfg.seed,
                    ..SuiteConfig::default()
                })?;
                print_records(&suite);
                ok = all_pass(&suite);
                record.certification = Some(suite);
            }
            let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("."));
            let path = emit(&record, common.format.into(), &dir)?;
            println!("wrote {}", path.display());
            Ok(ok)
        }
        Command::Certify { common } => {
            let suite = SuiteConfig {
                seed: common.seed.unwrap_or(SuiteConfig::default().seed),
                trajectory_trials: common.trials.unwrap_or(0),
                ..SuiteConfig::default()
            };
            let records = run_suite(&suite)?;
            print_records(&records);
            if let Some(dir) = &common.out {
                let path = write_records(&records, common.format, dir, &format!("certify-seed{}", suite.seed))?;
                println!("wrote {}", path.display());
            }
            Ok(all_pass(&records))
        }
        Command::Gqsp {
            config,
            margin,
            check_dim,
            common,
        } => {
            let p = read_polynomial(&config)?;
            let pair = complete(&p.scaled(1.0 - margin), margin)?;
            let angles = compute_angles(&pair)?;
            let mut rng = rng_for(common.seed.unwrap_or(0), 0);
            let u = UnitaryOperator::new(haar_unitary(check_dim.max(1), &mut rng))?;
            let target = polynomial_of_unitary(&p.scaled(1.0 - margin), &u);
            let err = spectral_norm(&(assemble_and_extract(&angles, &u)? - target));
            let records = vec![
                CertificationRecord::at_most("gqsp.completion", config.display().to_string(), pair.identity_defect(10_000), 0.0, 1e-8),
                CertificationRecord::at_most("gqsp.reconstruction", format!("dim={check_dim}"), err, 1e-7, 0.0),
            ];
            print_records(&records);
            let json = serde_json::to_string_pretty(&angles).expect("angles serialize") + "\n";
            match &common.out {
                Some(dir) => {
                    let path = dir.join("angles.json");
                    write_atomic(&path, &json)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{json}"),
            }
            Ok(all_pass(&records))
        }
        Command::Signpoly { epsilon, delta, common } => {
            let id = format!("eps={epsilon} delta={delta}");
            let p = build_sign_poly(epsilon, delta)?;
            let s = build_sign_fourier(epsilon, delta)?;
            let mut records = vec![CertificationRecord::at_most(
                "sign.poly.degree",
                id.clone(),
                p.degree() as f64,
                degree_bound(epsilon, delta),
                0.0,
            )];
            let pc = certify_poly(&p, CERT_GRID);
            let fc = certify_fourier(&s, CERT_GRID);
            for (name, cert) in [("sign.poly", pc), ("sign.fourier", fc)] {
                match cert {
                    Ok(c) => {
                        records.push(CertificationRecord::at_most(&format!("{name}.bounded"), id.clone(), c.max_modulus, 1.0, 1e-9));
                        records.push(CertificationRecord::at_most(&format!("{name}.band"), id.clone(), c.max_sign_error, delta, 1e-9));
                    }
                    Err(e) => {
                        eprintln!("{name}: {e}");
                        records.push(CertificationRecord::at_most(&format!("{name}.certificate"), id.clone(), 1.0, 0.0, 0.0));
                    }
                }
            }
            print_records(&records);
            println!("degree {}", p.degree());
            match &common.out {
                Some(dir) => {
                    let path = dir.join(format!("sign-eps{epsilon}-delta{delta}.json"));
                    write_atomic(&path, &write_polynomial(&s))?;
                    println!("wrote {}", path.display());
                    write_records(&records, common.format, dir, &format!("sign-eps{epsilon}-delta{delta}-cert"))?;
                }
                None => {
                    if matches!(common.format, Format::Structured) {
                        print!("{}", write_polynomial(&s));
                    }
                }
            }
            Ok(all_pass(&records))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
