fn main() -> std::process::ExitCode {
    qlc::cli::main()
}
