fn main() -> std::process::ExitCode {
    relevance_kit::cli::main()
}
