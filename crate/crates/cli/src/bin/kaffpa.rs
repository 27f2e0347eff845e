fn main() {
    gpart_cli::init_logging();
    let code = gpart_cli::kaffpa_main(std::env::args_os(), &mut std::io::stdout());
    std::process::exit(code);
}
