#![no_main]
use libfuzzer_sys::fuzz_target;
use string_pendulum_cli::parse_snapshot;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(snap) = parse_snapshot(text) {
            let again = parse_snapshot(&snap.to_json().unwrap()).unwrap();
            assert_eq!(snap.nodes.len(), again.nodes.len());
        }
    }
});
