fn main() -> std::process::ExitCode {
    analogy_cli::cli::main()
}
