use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CSRK_LOG", "warn")).init();
    csrk::cli::run(std::env::args_os())
}
