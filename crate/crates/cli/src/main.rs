fn main() {
    std::process::exit(seatalloc_cli::main_with(std::env::args_os()));
}
