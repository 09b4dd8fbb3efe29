#![no_main]

use libfuzzer_sys::fuzz_target;
use rbfn::dataset::{available_features, encode_features, parse_csv, protocol_warnings, write_csv, CsvSchema};

fuzz_target!(|data: &[u8]| {
    let Ok(records) = parse_csv(data, &CsvSchema::default()) else {
        return;
    };
    let _ = protocol_warnings(&records);
    let _ = write_csv(&records);
    let features = available_features(&records);
    if !records.is_empty() {
        let _ = encode_features(&records, &features);
    }
});
