fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("STARSTAR_LOG", "warn")).init();
    std::process::exit(starstar_cli::run(std::env::args_os()));
}
