fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("UNITOPO_LOG", "warn")).init();
    std::process::exit(unitopo::cli::run(std::env::args_os()));
}
