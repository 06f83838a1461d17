//! Print the built-in scenario config as JSON.
//!
//! This is the exact document shipped as configs/default.json; pipe it to
//! a file, edit fields, and feed it back through the CLI or
//! `ScenarioConfig::load`.

use etic::config::ScenarioConfig;

fn main() {
    print!("{}", ScenarioConfig::default().to_json());
}
