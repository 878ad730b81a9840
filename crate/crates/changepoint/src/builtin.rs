use std::collections::HashMap;
use std::sync::OnceLock;

use crate::config::ThresholdTable;
use crate::CpmError;

static TABLES: OnceLock<HashMap<u32, Result<ThresholdTable, String>>> = OnceLock::new();

/// The precomputed threshold table for an `arl0` on the supported grid.
///
/// Tables are calibrated offline by the `gen_thresholds` binary with a
/// startup window of 20 observations and a horizon of 10 000; seed, stream
/// count, and measured average run length travel with each table.
pub fn builtin_table(arl0: u32) -> Result<&'static ThresholdTable, CpmError> {
    let tables = TABLES.get_or_init(|| {
        let mut m = HashMap::new();
        m.insert(
            100,
            ThresholdTable::from_json(include_str!("../tables/arl0_100.json"))
                .map_err(|e| e.to_string()),
        );
        m.insert(
            500,
            ThresholdTable::from_json(include_str!("../tables/arl0_500.json"))
                .map_err(|e| e.to_string()),
        );
        m.insert(
            1000,
            ThresholdTable::from_json(include_str!("../tables/arl0_1000.json"))
                .map_err(|e| e.to_string()),
        );
        m.insert(
            5000,
            ThresholdTable::from_json(include_str!("../tables/arl0_5000.json"))
                .map_err(|e| e.to_string()),
        );
        m
    });
    match tables.get(&arl0) {
        None => Err(CpmError::UnsupportedArl0(arl0)),
        Some(Ok(t)) => Ok(t),
        Some(Err(e)) => Err(CpmError::InvalidTable(e.clone())),
    }
}
