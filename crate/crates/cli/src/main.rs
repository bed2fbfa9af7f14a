use clap::Parser;

fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(pllab::main_with(pllab::Args::parse()))
}
