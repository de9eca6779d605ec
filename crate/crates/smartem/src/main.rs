fn main() {
    if let Err(err) = smartem::cli::run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
