fn main() {
    let quick = std::env::args().any(|a| a == "--quick");
    let outcomes = hzeta::selftest::run_selftest(quick, 2);
    for c in &outcomes {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    std::process::exit(if hzeta::selftest::all_passed(&outcomes) { 0 } else { 1 });
}
