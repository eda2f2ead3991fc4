use std::io;
use std::process::ExitCode;

use sperner_cli::app::{run, Io};

fn main() -> ExitCode {
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    ExitCode::from(run(std::env::args_os(), &mut Io { out: &mut out, err: &mut err }))
}
