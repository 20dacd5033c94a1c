use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let (code, out) = diffmodal::cli::run(&args);
    if !out.is_empty() {
        let mut stdout = std::io::stdout().lock();
        let _ = writeln!(stdout, "{}", out.trim_end());
    }
    std::process::exit(code);
}
