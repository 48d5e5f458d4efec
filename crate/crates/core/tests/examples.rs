macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(experiment1, "experiment1.rs");
example!(experiment2, "experiment2.rs");
example!(pe_check, "pe_check.rs");
example!(bounds, "bounds.rs");
example!(gain_sweep, "gain_sweep.rs");
example!(from_data, "from_data.rs");
example!(find_topology, "find_topology.rs");
example!(filter_response, "filter_response.rs");

#[test]
fn experiments_run() {
    experiment1::run_example(2.0).expect("experiment1");
    experiment2::run_example(2.0).expect("experiment2");
}

#[test]
fn analysis_examples_run() {
    pe_check::run_example(1.0).expect("pe_check");
    bounds::run_example().expect("bounds");
    find_topology::run_example().expect("find_topology");
    filter_response::run_example().expect("filter_response");
}

#[test]
fn identification_examples_run() {
    gain_sweep::run_example(2.0).expect("gain_sweep");
    from_data::run_example(2.0).expect("from_data");
}
