use clap::Parser;

fn main() {
    let cli = match optomech_cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            eprintln!("{}", optomech_cli::BANNER);
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = optomech_cli::execute(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
