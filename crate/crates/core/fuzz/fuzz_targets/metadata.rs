#![no_main]

use g2_coherence::output::Metadata;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = Metadata::from_json(text) {
        for d in &m.datasets {
            assert!(d.file.ends_with(".csv") && !d.file.contains('/') && !d.file.starts_with('.'));
        }
        Metadata::from_json(&m.to_json()).expect("accepted metadata must round trip");
    }
});
