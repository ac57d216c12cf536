fn main() {
    let threads = std::env::var(fracvar_cli::THREADS_ENV).ok();
    std::process::exit(fracvar_cli::main_with(
        std::env::args_os(),
        threads.as_deref(),
    ));
}
