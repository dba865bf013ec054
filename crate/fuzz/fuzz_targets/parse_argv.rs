#![no_main]

use libfuzzer_sys::fuzz_target;

// NUL-separated argv; parsing only, nothing is executed
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let argv = std::iter::once("momlab").chain(s.split('\0'));
    let _ = momlab_cli::parse_argv(argv);
});
