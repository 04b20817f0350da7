fn main() -> std::process::ExitCode {
    inr_tools::cli::main()
}
