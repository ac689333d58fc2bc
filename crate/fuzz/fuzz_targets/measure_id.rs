#![no_main]

use libfuzzer_sys::fuzz_target;
use riskbench_core::MeasureId;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(id) = text.parse::<MeasureId>() {
        assert_eq!(id.as_str(), text);
        assert_eq!(id.as_str().parse::<MeasureId>().unwrap(), id);
    }
});
