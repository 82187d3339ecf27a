use std::process::ExitCode;

use clap::Parser;
use torfan::report::render_error;
use torfan::{render, run, CliError, Command, Format, Options};

#[derive(Parser, Debug)]
#[command(name = "torfan", version, about = "Toric quantum cohomology workbench")]
struct Args {
    command: Command,
    /// Fan document, or a matrix-family document for `kato`.
    #[arg(long)]
    input: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Seed for the randomised steps of `critical` and `separate`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also print the Gröbner basis with t kept symbolic.
    #[arg(long)]
    t_symbolic: bool,
    /// Build the bundle O(k Σ λᵢ Dᵢ) over the document's fan.
    #[arg(long)]
    k: Option<u64>,
    /// Chop depth p/q for the blow-up section.
    #[arg(long)]
    epsilon: Option<String>,
    /// Perturbation radius for `separate`.
    #[arg(long, default_value_t = 1e-2)]
    radius: f64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = Options {
        seed: args.seed,
        t_symbolic: args.t_symbolic,
        k: args.k,
        epsilon: args.epsilon.clone(),
        radius: args.radius,
    };
    let outcome = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.input)))
        .and_then(|text| run(args.command, &args.input, &text, &opts));
    match outcome {
        Ok(report) => {
            print!("{}", render(&report, args.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let shown = render_error(args.command.name(), &args.input, &e, args.format);
            match args.format {
                Format::Json => print!("{shown}"),
                Format::Text => eprint!("{shown}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
