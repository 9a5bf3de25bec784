use clap::Parser;

fn main() {
    let cli = match wavefocus_cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(wavefocus_cli::exit_code(&cli));
}
