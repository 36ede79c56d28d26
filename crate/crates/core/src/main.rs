fn main() {
    let code = ultracold_scatter::scan::cli::cli_main(std::env::args_os());
    std::process::exit(code);
}
