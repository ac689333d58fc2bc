#![no_main]

use libfuzzer_sys::fuzz_target;
use riskbench_core::{read_csv, write_csv, CsvSchema};

fuzz_target!(|data: &[u8]| {
    let schema = CsvSchema::new("probability", "outcome")
        .with_group("group")
        .with_id("id");
    let Ok(sample) = read_csv(data, &schema) else {
        return;
    };
    // anything accepted must survive a write/read round trip unchanged
    let mut buf = Vec::new();
    write_csv(&sample, &mut buf, &schema).expect("accepted samples can be written");
    let again = read_csv(buf.as_slice(), &schema).expect("written samples can be read");
    assert_eq!(sample, again);
});
