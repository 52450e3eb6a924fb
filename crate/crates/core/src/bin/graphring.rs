use std::io;

fn main() {
    let seed = std::env::var(graphring::cli::SEED_VAR).ok();
    let code = graphring::cli::run(
        std::env::args_os(),
        seed,
        &mut io::stdin().lock(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
