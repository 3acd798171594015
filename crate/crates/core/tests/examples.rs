//! Every runnable example must also succeed when driven from the test suite.

#[path = "../examples/analogy.rs"]
mod analogy;
#[path = "../examples/bundle_roundtrip.rs"]
mod bundle_roundtrip;
#[path = "../examples/plot_layers.rs"]
mod plot_layers;
#[path = "../examples/semantic_map.rs"]
mod semantic_map;
#[path = "../examples/token_roles.rs"]
mod token_roles;
#[path = "../examples/word_network.rs"]
mod word_network;

#[test]
fn analogy_example_runs() {
    analogy::run_example().unwrap();
}

#[test]
fn bundle_roundtrip_example_runs() {
    bundle_roundtrip::run_example().unwrap();
}

#[test]
fn plot_layers_example_renders_svg() {
    let svg = plot_layers::run_example().unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn semantic_map_example_runs() {
    semantic_map::run_example().unwrap();
}

#[test]
fn token_roles_example_runs() {
    token_roles::run_example().unwrap();
}

#[test]
fn wic_probe_example_runs() {
    wic_probe::run_example().unwrap();
}

#[test]
fn word_network_example_runs() {
    word_network::run_example().unwrap();
}
