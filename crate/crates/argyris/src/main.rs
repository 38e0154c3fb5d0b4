fn main() {
    std::process::exit(argyris::driver::run_cli(std::env::args().skip(1)));
}
