use clap::Parser;

use escapes::cli::{self, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = cli::run(cli) {
        let code = e.exit_code();
        let payload = serde_json::json!({
            "error": e.to_string(),
            "exit_code": code,
        });
        eprintln!("{payload}");
        std::process::exit(code);
    }
}
