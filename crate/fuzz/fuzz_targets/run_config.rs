#![no_main]

use libfuzzer_sys::fuzz_target;
use riskbench_core::report::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(config) = RunConfig::from_json(text) else {
        return;
    };
    let _ = config.validate();
    let _ = config.clamp_policy();
    let _ = config.bootstrap_spec();
    let again = RunConfig::from_json(&config.to_json()).expect("serialized configs parse");
    assert_eq!(config.to_json(), again.to_json());
});
