use clap::Parser;

fn main() {
    let cli = biunitary_cli::Cli::parse();
    let code = biunitary_cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
