use std::io;

fn main() {
    let root = sace_kit::cli::project_root();
    let code = sace_kit::cli::run(
        std::env::args_os(),
        &root,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
