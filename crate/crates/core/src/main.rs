use std::io;

use clap::Parser;
use lfhh::cli::{run, Cli, EXIT_INTERNAL};

fn main() {
    let cli = Cli::parse();
    // Decoding and unification recurse on term depth; long lists need room.
    let code = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || run(&cli, &mut io::stdout().lock(), &mut io::stderr().lock()))
        .expect("spawn worker thread")
        .join()
        .unwrap_or(EXIT_INTERNAL);
    std::process::exit(code);
}
