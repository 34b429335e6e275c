use dutiful_core::agent::{run_to_quiescence, Engine, LoopState};
use dutiful_core::compliance::compile_policy_dynamics;
use dutiful_core::dsl::{parse_domain, parse_policy, parse_scenario};

fn fixture(name: &str) -> String {
    let path = format!("{}/../../scenarios/{}", env!("CARGO_MANIFEST_DIR"), name);
    std::fs::read_to_string(path).unwrap()
}

fn run(example: &str, auth: &str, obl: &str) {
    let base = parse_domain(&fixture(&format!("office_{example}.dom"))).unwrap();
    let mut scenario = parse_scenario(&fixture(&format!("office_{example}.scn")), &base).unwrap();
    scenario.mode = dutiful_core::ModeConfig::new(auth.parse().unwrap(), obl.parse().unwrap());
    let domain = compile_policy_dynamics(&base, scenario.mode);
    let policy = parse_policy(&fixture(&format!("office_{example}.pol")), &domain).unwrap();
    let engine = Engine::new(&domain, &policy, scenario.horizon);
    let mut loop_state = LoopState::seed(&domain, &scenario);
    let (records, outcome) =
        run_to_quiescence(&engine, &mut loop_state, &scenario, scenario.max_steps).unwrap();
    println!("=== example {example} mode ({auth}, {obl})");
    for r in &records {
        println!(
            "{}: {} [{}] {} {}",
            r.step,
            r.intended,
            r.outcome,
            if r.abduced.is_empty() { String::new() } else { format!("abduced: {}", r.abduced.join(", ")) },
            r.note
        );
    }
    println!("outcome: {outcome:?}");
}

#[test]
fn scratch_example_a() {
    run("a", "paranoid", "subordinate");
}

#[test]
fn scratch_example_b() {
    run("b", "paranoid", "subordinate");
    run("b", "utilitarian", "utilitarian");
}

#[test]
fn scratch_example_c() {
    run("c", "paranoid", "subordinate");
    run("c", "best-effort", "best-effort");
    run("c", "utilitarian", "utilitarian");
}

#[test]
fn scratch_example_d() {
    run("d", "paranoid", "subordinate");
    run("d", "best-effort", "best-effort");
    run("d", "utilitarian", "utilitarian");
}
