use std::io;
use std::process;

fn main() {
    let code = dfs_photonics::cli::run(std::env::args_os(), &mut io::stdout());
    process::exit(code);
}
