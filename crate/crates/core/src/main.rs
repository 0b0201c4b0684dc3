fn main() {
    let code = scalable_bell::cli::run(std::env::args_os(), &mut std::io::stdout());
    std::process::exit(code);
}
