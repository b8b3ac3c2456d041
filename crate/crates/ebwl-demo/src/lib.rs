//! Browser demo bindings. The page talks JSON strings to three exports:
//! a graph scene with triangle statistics, a round-by-round refinement
//! explorer, and a pair comparison. All real work happens in [`scene`],
//! which is plain Rust and tested natively; build the wasm artifact with
//! `wasm-pack build --target web crates/ebwl-demo`.

pub mod scene;

use wasm_bindgen::prelude::*;

use ebwl_core::TestKind;
use scene::GraphSpec;

fn respond<T: serde::Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(value) => serde_json::to_string(&value)
            .unwrap_or_else(|e| format!(r#"{{"error":"serialization: {e}"}}"#)),
        Err(e) => serde_json::to_string(&serde_json::json!({ "error": e }))
            .expect("error payload serializes"),
    }
}

fn parse_spec(json: &str) -> Result<GraphSpec, String> {
    serde_json::from_str(json).map_err(|e| format!("bad graph spec: {e}"))
}

fn parse_test(token: &str) -> Result<TestKind, String> {
    TestKind::parse(token).ok_or_else(|| format!("unknown test `{token}`"))
}

/// Scene JSON for one graph spec: layout, edges with triangle counts, stats.
#[wasm_bindgen]
pub fn demo_graph(spec_json: &str) -> String {
    respond(parse_spec(spec_json).and_then(|spec| scene::scene(&spec)))
}

/// Refinement explorer payload: scene plus per-round node/edge classes.
/// `max_rounds` of 0 means the theoretical bound.
#[wasm_bindgen]
pub fn demo_refine(spec_json: &str, test: &str, max_rounds: usize) -> String {
    let cap = if max_rounds == 0 {
        None
    } else {
        Some(max_rounds)
    };
    respond(
        parse_spec(spec_json)
            .and_then(|spec| Ok((spec, parse_test(test)?)))
            .and_then(|(spec, test)| scene::refine_view(&spec, test, cap)),
    )
}

/// Shared-palette comparison of two specs under one test.
#[wasm_bindgen]
pub fn demo_distinguish(left_json: &str, right_json: &str, test: &str) -> String {
    let inputs = || -> Result<(GraphSpec, GraphSpec, TestKind), String> {
        Ok((
            parse_spec(left_json)?,
            parse_spec(right_json)?,
            parse_test(test)?,
        ))
    };
    respond(inputs().and_then(|(l, r, t)| scene::distinguish_view(&l, &r, t)))
}
