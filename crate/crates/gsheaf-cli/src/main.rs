use std::process::exit;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (code, output) = gsheaf_cli::cli::execute_args(&args);
    print!("{output}");
    exit(code);
}
