fn main() -> std::process::ExitCode {
    gearbox_opt::cli::main()
}
