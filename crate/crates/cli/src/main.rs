use clap::Parser;

fn main() -> anyhow::Result<()> {
    qband_cli::run(qband_cli::Cli::parse())
}
