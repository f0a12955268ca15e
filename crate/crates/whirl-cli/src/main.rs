mod args;
mod bundle;
mod commands;
mod error;
mod io;
mod svg;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(a) => commands::cmd_simulate(a),
        Command::Decompose(a) => commands::cmd_decompose(a),
        Command::Features(a) => commands::cmd_features(a),
        Command::Timefs(a) => commands::cmd_timefs(a),
        Command::Iom(a) => commands::cmd_iom(a),
        Command::Plot(a) => commands::cmd_plot(a),
    };
    if let Err(err) = outcome {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}
