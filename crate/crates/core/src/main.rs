use clap::Parser;
use qcap::cli;

fn main() {
    let args = cli::Cli::parse();
    match cli::execute(&args) {
        Ok(outcome) => {
            println!("{}", cli::render_report(&outcome.report));
            eprint!("{}", outcome.summary);
            std::process::exit(outcome.exit_code);
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
