use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prymdeg::curve::parse_curve;
use prymdeg::report::{render_figures, run_analysis, AnalysisOptions};

#[derive(Parser)]
#[command(name = "prymdeg", version, about = "Degenerations of Jacobians and Pryms of nodal curves with involution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one curve and print (or write) the JSON report.
    Analyze {
        file: PathBuf,
        /// Node weights in input order, comma separated.
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<i128>>,
        /// Largest weight tried when searching for weight dependence.
        #[arg(long, default_value_t = 3)]
        max_weight: i128,
        /// Degrees checked in the cell comparison with the Jacobian.
        #[arg(long, default_value_t = 2)]
        degree_bound: u32,
        /// Seed for the Eulerian circuit behind the half-shift.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write SVG pictures of the two-dimensional decompositions here.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let Command::Analyze { file, alpha, max_weight, degree_bound, seed, svg, json } = Cli::parse().command;
    let options = AnalysisOptions { alpha, max_weight, degree_bound, shift_seed: seed };
    let report = match run_analysis(&file, &options) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = report.to_json();
    match &json {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if let Some(dir) = svg {
        // the input parsed once already, so this cannot fail on the curve
        let curve = parse_curve(&std::fs::read_to_string(&file).unwrap_or_default()).expect("input was parsed");
        let figures = render_figures(curve, &options).expect("input was analyzed");
        if let Err(e) = std::fs::create_dir_all(&dir) {
            eprintln!("error: cannot create {}: {e}", dir.display());
            return ExitCode::from(1);
        }
        for f in figures {
            let p = dir.join(format!("{}.svg", f.name));
            if let Err(e) = std::fs::write(&p, f.svg) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
    }
    if report.rank_cap_exceeded {
        eprintln!("warning: a rank cap was exceeded; the report is partial");
    }
    ExitCode::from(report.exit_code() as u8)
}
