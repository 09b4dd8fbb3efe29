#![no_main]

use libfuzzer_sys::fuzz_target;
use rbfn::persist;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(model) = persist::load(text) else {
        return;
    };
    let saved = persist::save(&model).expect("loaded model saves");
    let again = persist::load(&saved).expect("saved model reloads");
    assert_eq!(persist::save(&again).expect("reloaded model saves"), saved);
    let row = vec![0.0; model.feature_names().len()];
    let _ = model.predict_proba(&row);
});
