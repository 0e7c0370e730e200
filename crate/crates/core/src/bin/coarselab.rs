use clap::Parser;
use coarselab::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let out = run(&cli);
    print!("{}", out.render(cli.json));
    std::process::exit(out.exit);
}
