fn main() -> std::process::ExitCode {
    clusterbody::cli::main_entry()
}
