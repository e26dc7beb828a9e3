//! Command-line front end. All indices in files, flags, and output are
//! one-based; the library is zero-based internally.

use clap::{Parser, Subcommand};
use icpriv::analysis::{
    asymptotic_gaps, run_verification, tradeoff_sweep, AsymptoticSpec, SweepSpec,
};
use icpriv::scheme::SingleRequestParams;
use icpriv::{
    enumerate_decodable, universal_bounds, ClientPair, FieldConfig, FieldMatrix, SchemeParams,
};
use std::error::Error;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "icpriv",
    version,
    about = "Exact privacy analysis for index-coded broadcast transmissions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the decodable sets of an encoding matrix.
    Decodable {
        /// Matrix file (`T m L` header, then T rows of m entries).
        #[arg(long)]
        matrix: PathBuf,
        /// Side-information size.
        #[arg(long)]
        s: usize,
        /// Also print every decodable pair, one `q:S` per line.
        #[arg(long)]
        list: bool,
    },
    /// Print the universal bounds and the closed-form block-matrix
    /// counts as a CSV row.
    Bounds {
        #[arg(long)]
        m: usize,
        #[arg(long = "T")]
        t: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        s: usize,
        /// Field modulus.
        #[arg(long, default_value_t = 257)]
        field: u64,
    },
    /// Closed-form privacy levels of the single-request scheme.
    Scheme {
        #[arg(long)]
        m: usize,
        #[arg(long = "T")]
        t: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        s: usize,
        /// Also run the brute-force entropy oracle and report agreement.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 257)]
        field: u64,
    },
    /// Draw a uniformly random pattern serving one pair and emit the
    /// pattern file.
    Sample {
        #[arg(long)]
        m: usize,
        #[arg(long = "T")]
        t: usize,
        #[arg(long)]
        l: usize,
        /// Request index (one-based).
        #[arg(long)]
        q: usize,
        /// Side-information indices, comma-separated, one-based.
        #[arg(long = "S")]
        side: String,
        #[arg(long)]
        seed: u64,
        /// Write the pattern here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 257)]
        field: u64,
    },
    /// Sweep the closed-form gap ratios over (T, ell) and write a CSV.
    Figure2 {
        #[arg(long, default_value_t = 30)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        s: usize,
        /// Transmission counts, comma-separated.
        #[arg(long = "T", default_value = "1,2,3,5")]
        t: String,
        #[arg(long)]
        out: PathBuf,
        /// Also write a gnuplot script referencing the CSV.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
    /// Exact privacy gaps along a scaling regime, written as CSV.
    Asymptotics {
        /// Side-information fraction (s = floor(c*m)).
        #[arg(long)]
        c: f64,
        /// Segment-width fraction (ell = floor(b*m) + 1).
        #[arg(long)]
        b: f64,
        #[arg(long = "T")]
        t: usize,
        /// Message counts, comma-separated.
        #[arg(long = "m-values")]
        m_values: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every grid-based equivalence check; nonzero exit on any
    /// failure.
    VerifyAll {
        #[arg(long = "max-m", default_value_t = 8)]
        max_m: usize,
        /// Write one JSON record per check to this file.
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>, Box<dyn Error>>
where
    T::Err: Error + 'static,
{
    text.split(',')
        .map(|part| part.trim().parse::<T>().map_err(Into::into))
        .collect()
}

fn run() -> Result<ExitCode, Box<dyn Error>> {
    match Cli::parse().command {
        Command::Decodable { matrix, s, list } => {
            let text = fs::read_to_string(&matrix)?;
            let a = FieldMatrix::from_text(&text)?;
            let sets = enumerate_decodable(&a, s)?;
            println!(
                "{} {} {}",
                sets.len(),
                sets.requests().len(),
                sets.side_infos().len()
            );
            if list {
                for pair in sets.pairs() {
                    println!("{pair}");
                }
            }
        }
        Command::Bounds {
            m,
            t,
            k,
            l,
            s,
            field,
        } => {
            let fc = FieldConfig::new(field)?;
            let params = SchemeParams::new(m, t, k, l, s, fc)?;
            let ub = universal_bounds(m, t, s)?;
            println!("m,T,k,ell,s,ub_joint,ub_q,ub_s,thm1_joint,thm1_q");
            println!(
                "{m},{t},{k},{l},{s},{},{},{},{},{}",
                ub.joint,
                ub.request,
                ub.side_info,
                icpriv::base_matrix_pair_count(&params, s)?,
                icpriv::base_matrix_request_count(&params)
            );
        }
        Command::Scheme {
            m,
            t,
            l,
            s,
            verify,
            field,
        } => {
            let fc = FieldConfig::new(field)?;
            let p = SingleRequestParams::new(m, t, l, s, fc)?;
            let ub = universal_bounds(m, t, s)?;
            let (ub_joint, ub_q, ub_s) = ub.bits();
            let (lb_q, lb_joint) = (p.request_entropy(), p.joint_entropy());
            let (k_corr, lb_s) = (p.side_info_entropy_deficit(), p.side_info_entropy());
            let header = "m,T,l,s,lb_q,lb_joint,k_corr,lb_s,ub_q,ub_joint,ub_s,r_q,r_joint,r_s";
            let row = format!(
                "{m},{t},{l},{s},{lb_q},{lb_joint},{k_corr},{lb_s},{ub_q},{ub_joint},{ub_s},{},{},{}",
                (lb_q - ub_q).exp2(),
                (lb_joint - ub_joint).exp2(),
                (lb_s - ub_s).exp2()
            );
            if verify {
                let pattern = icpriv::canonical_pattern(&p.scheme_params());
                let oracle = p.entropy_oracle(&pattern)?;
                let matches = (oracle.h_q - lb_q).abs() <= icpriv::BITS_TOL
                    && (oracle.h_joint - lb_joint).abs() <= icpriv::BITS_TOL
                    && (oracle.h_s - lb_s).abs() <= icpriv::BITS_TOL;
                println!("{header},oracle_h_q,oracle_h_joint,oracle_h_s,match");
                println!(
                    "{row},{},{},{},{}",
                    oracle.h_q, oracle.h_joint, oracle.h_s, matches
                );
                if !matches {
                    return Ok(ExitCode::FAILURE);
                }
            } else {
                println!("{header}");
                println!("{row}");
            }
        }
        Command::Sample {
            m,
            t,
            l,
            q,
            side,
            seed,
            out,
            field,
        } => {
            let fc = FieldConfig::new(field)?;
            let side_ixs: Vec<usize> = parse_list(&side)?;
            if q == 0 || side_ixs.contains(&0) {
                return Err("indices are one-based".into());
            }
            let pair = ClientPair::new(q - 1, side_ixs.iter().map(|i| i - 1).collect::<Vec<_>>())?;
            let p = SingleRequestParams::new(m, t, l, pair.s(), fc)?;
            let pattern = p.sample_satisfying_pattern(&pair, seed)?;
            match out {
                Some(path) => fs::write(path, pattern.to_text())?,
                None => print!("{}", pattern.to_text()),
            }
        }
        Command::Figure2 {
            m,
            s,
            t,
            out,
            gnuplot,
        } => {
            let spec = SweepSpec {
                m,
                s,
                t_values: parse_list(&t)?,
                field: FieldConfig::default(),
            };
            let table = tradeoff_sweep(&spec)?;
            for skip in &table.skipped {
                eprintln!("warning: skipped {skip}");
            }
            let mut csv = String::from("T,ell,r_q,r_s,r_joint\n");
            for p in &table.points {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    p.t, p.ell, p.r_q, p.r_s, p.r_joint
                ));
            }
            fs::write(&out, csv)?;
            if let Some(script) = gnuplot {
                fs::write(&script, gnuplot_script(&out))?;
            }
        }
        Command::Asymptotics {
            c,
            b,
            t,
            m_values,
            out,
        } => {
            let spec = AsymptoticSpec::new(c, b, t, parse_list(&m_values)?)?;
            let table = asymptotic_gaps(&spec)?;
            for skip in &table.skipped {
                eprintln!("warning: skipped {skip}");
            }
            let mut csv = String::from("m,s,ell,G_q,G_joint,G_s_upper\n");
            for p in &table.points {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    p.m, p.s, p.ell, p.g_q, p.g_joint, p.g_s_upper
                ));
            }
            fs::write(&out, csv)?;
        }
        Command::VerifyAll { max_m, log } => {
            let report = run_verification(max_m)?;
            if let Some(path) = log {
                fs::write(path, report.to_json_lines() + "\n")?;
            }
            print!("{}", report.summary());
            if !report.all_pass() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn gnuplot_script(csv: &std::path::Path) -> String {
    format!(
        "set datafile separator ','\n\
         set key outside\n\
         set xlabel 'ell'\n\
         set yrange [0:1.05]\n\
         set style data linespoints\n\
         plot for [t in system(\"awk -F, 'NR>1 {{print $1}}' {csv} | sort -nu\")] \\\n\
         \t'{csv}' using ($1==t ? $2 : 1/0):3 title 'r_q T='.t, \\\n\
         \tfor [t in system(\"awk -F, 'NR>1 {{print $1}}' {csv} | sort -nu\")] \\\n\
         \t'{csv}' using ($1==t ? $2 : 1/0):4 title 'r_s T='.t\n",
        csv = csv.display()
    )
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
