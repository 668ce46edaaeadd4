use std::io::Write;

fn main() {
    let out = tccs::cli::main_with(std::env::args(), &mut std::io::stdin());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
