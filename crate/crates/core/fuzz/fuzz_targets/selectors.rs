#![no_main]

use g2_coherence::figures::Figure;
use g2_coherence::{Axis, Method, Model};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = text.parse::<Figure>() {
        assert_eq!(f.id().parse::<Figure>().unwrap(), f);
    }
    if let Ok(a) = text.parse::<Axis>() {
        assert_eq!(a.name().parse::<Axis>().unwrap(), a);
    }
    if let Ok(m) = text.parse::<Model>() {
        assert_eq!(m.to_string().parse::<Model>().unwrap(), m);
    }
    if let Ok(m) = text.parse::<Method>() {
        assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
    }
});
