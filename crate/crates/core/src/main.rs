use std::io;

fn main() {
    let env = |k: &str| std::env::var(k).ok();
    let code = spancca::cli::main_with(
        std::env::args_os(),
        &env,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
