#![no_main]

use g2_coherence::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = RunConfig::from_json(text) {
        let again = RunConfig::from_json(&c.to_json()).expect("accepted config must round trip");
        assert_eq!(again, c);
    }
});
