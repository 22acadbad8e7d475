fn main() {
    std::process::exit(cube_rigidity_cli::run(std::env::args_os()));
}
