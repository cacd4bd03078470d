use clap::Parser;

use pseudolap_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match cli.command.to_config() {
        Ok(cfg) => run(&cfg, &mut std::io::stdout(), &mut std::io::stderr()),
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    std::process::exit(code);
}
