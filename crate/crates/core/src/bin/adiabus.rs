fn main() -> std::process::ExitCode {
    adiabus::cli::main()
}
