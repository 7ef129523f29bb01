fn main() {
    std::process::exit(snowflake_cli::run(std::env::args_os()));
}
