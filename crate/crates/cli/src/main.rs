use clap::Parser;

fn main() {
    let cli = heraldsim_cli::Cli::parse();
    match heraldsim_cli::run(cli) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
