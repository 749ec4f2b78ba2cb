#![no_main]
use libfuzzer_sys::fuzz_target;
use string_pendulum_cli::parse_config;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = parse_config(text) {
            // Anything accepted must describe a runnable discretization.
            assert!(cfg.steps() >= 1);
            let _ = cfg.discretization();
        }
    }
});
