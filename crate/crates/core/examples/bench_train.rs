use std::time::Instant;

use rislab_core::environment::{Scenario, SystemConfig};
use rislab_core::explorer::PerturbationMode;
use rislab_core::sac::{AgentConfig, ExplorerConfig, Trainer};

fn main() {
    let sys = SystemConfig {
        scenario: Scenario::Mismatch,
        ..SystemConfig::default()
    };
    for explorer in [false, true] {
        let cfg = AgentConfig {
            explorer: explorer.then_some(ExplorerConfig {
                lambda0: 0.3,
                mode: PerturbationMode::Blended,
                beta_lo: sys.beta_min,
            }),
            ..AgentConfig::default()
        };
        let mut t = Trainer::new(&sys, cfg, 20_000, 1, None).unwrap();
        t.run(50).unwrap();
        let start = Instant::now();
        t.run(500).unwrap();
        println!(
            "explorer={explorer}: {:.2} ms/step",
            start.elapsed().as_secs_f64() * 2.0
        );
    }
    let small = SystemConfig {
        users: 2,
        antennas: 2,
        elements: 4,
        ..SystemConfig::default()
    };
    for hidden in [32, 64] {
        let cfg = AgentConfig {
            hidden,
            ..AgentConfig::default()
        };
        let mut t = Trainer::new(&small, cfg, 20_000, 1, None).unwrap();
        t.run(50).unwrap();
        let start = Instant::now();
        t.run(500).unwrap();
        println!(
            "K=M=2 L=4 hidden={hidden}: {:.3} ms/step",
            start.elapsed().as_secs_f64() * 2.0
        );
    }
}
