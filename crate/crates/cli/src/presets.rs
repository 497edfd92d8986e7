//! Named source presets: the six photon-pair correlation profiles studied
//! in the bandwidth scans.

use crate::error::CliError;

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub mu_s: f64,
    pub mu_i: f64,
    /// Run without spectral or temporal filtering (reference curve).
    pub unfiltered: bool,
    pub note: &'static str,
}

pub const PRESETS: [Preset; 6] = [
    Preset {
        name: "state1",
        mu_s: 0.0,
        mu_i: 0.0,
        unfiltered: false,
        note: "frequency-anticorrelated, non-factorable",
    },
    Preset {
        name: "state2",
        mu_s: 10.0,
        mu_i: 0.0,
        unfiltered: false,
        note: "factorable ellipse, slow signal group velocity",
    },
    Preset {
        name: "state3",
        mu_s: 2.6,
        mu_i: 0.0,
        unfiltered: false,
        note: "weakly factorable ellipse",
    },
    Preset {
        name: "state4",
        mu_s: -1.33,
        mu_i: 0.45,
        unfiltered: false,
        note: "circular joint spectrum (KTP-waveguide-like)",
    },
    Preset {
        name: "state5",
        mu_s: -1.3,
        mu_i: 1.3,
        unfiltered: false,
        note: "circular joint spectrum (photonic-crystal-fiber-like)",
    },
    Preset {
        name: "state6",
        mu_s: 25.0,
        mu_i: 0.0,
        unfiltered: true,
        note: "highly factorable, no spectral or temporal filtering",
    },
];

pub fn find(name: &str) -> Result<&'static Preset, CliError> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        CliError::config(format!(
            "unknown preset {name:?}; available: {}",
            names.join(", ")
        ))
    })
}

pub fn list_text() -> String {
    let mut out = String::from("name    mu_s    mu_i    filtering  description\n");
    for p in &PRESETS {
        let filt = if p.unfiltered { "none" } else { "B/T" };
        out.push_str(&format!(
            "{:<7} {:<7} {:<7} {:<10} {}\n",
            p.name, p.mu_s, p.mu_i, filt, p.note
        ));
    }
    out
}
