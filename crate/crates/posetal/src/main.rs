use std::io::Write;

fn main() {
    let (text, code) = posetal::cli::main_with(std::env::args_os());
    let mut out = std::io::stdout().lock();
    // A closed pipe is not worth a panic.
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
    std::process::exit(code);
}
