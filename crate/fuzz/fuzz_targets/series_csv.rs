#![no_main]
use libfuzzer_sys::fuzz_target;
use string_pendulum_cli::output::SeriesWriter;
use string_pendulum_cli::read_series;

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = read_series(data) else { return };
    // Whatever parses must survive a write/read cycle unchanged.
    let mut w = SeriesWriter::new(Vec::new()).unwrap();
    for r in &rows {
        w.write(r).unwrap();
    }
    let again = read_series(w.finish().unwrap().as_slice()).unwrap();
    assert_eq!(rows.len(), again.len());
    for (a, b) in rows.iter().zip(&again) {
        assert!(a == b || format!("{a:?}") == format!("{b:?}"), "{a:?} != {b:?}");
    }
});
