fn main() {
    let (code, out) = jetcalc::io::run_cli(std::env::args_os());
    print!("{out}");
    std::process::exit(code);
}
