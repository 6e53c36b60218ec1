//! Provenance strings attached to every resolved parameter.

use crate::config::Device;

const PAIRGEN: &[(&str, &str)] = &[
    ("kappa", "Fig. 2 parameter set: κ/2π = 15 MHz"),
    ("kappa_in", "Fig. 2 parameter set: κ_in = κ/2"),
    ("gamma_m", "Fig. 2 parameter set: γ_m/2π = 0.022 MHz"),
    ("n_th", "Fig. 2(b) caption: n_th ∈ {0, 0.1, 0.2}"),
    ("g_k", "Fig. 2(b) caption: G_k/2π = 0.3 MHz"),
    ("g_mk", "Fig. 2 caption: G_{−k}/2π = 0.1 MHz"),
    ("eps_s", "Fig. 2 caption: ε_{s,k} = 0.1 MHz"),
    ("delta_k", "Fig. 2(b) axis: δ_k = ω_s − ω_{c,k}"),
];

const CONVERT: &[(&str, &str)] = &[
    ("kappa", "Fig. 3 caption: κ/2π = 15 MHz"),
    ("gamma_m1", "Fig. 3 caption: γ_m1/2π = 22×10⁻³ MHz"),
    ("gamma_m2", "Fig. 3 caption: γ_m2/2π = 22×10⁻⁴ MHz"),
    ("c_k1", "Fig. 3 caption: C_k1 = C_{−k1} = 1"),
    ("c_mk1", "Fig. 3 caption: C_k1 = C_{−k1} = 1"),
    ("c_k2", "Fig. 3 caption: C_k2 = C_{−k2} = 2.5"),
    ("c_mk2", "Fig. 3 caption: C_k2 = C_{−k2} = 2.5"),
    (
        "theta",
        "Fig. 3 caption: G_k2 = |G_k2| e^{iθ}; θ = 0 reciprocal, 3π/4 non-reciprocal",
    ),
    (
        "kappa_in",
        "optional per-port external coupling; absent means all of κ is external",
    ),
    ("omega", "Fig. 3(c)(d): ω = −γ_m2"),
];

const PTSYM: &[(&str, &str)] = &[
    ("omega_ml", "Fig. 4 caption: ω_ml/2π = 42.3 MHz"),
    ("gamma_m", "Fig. 4 caption: γ_m/2π = 4 kHz"),
    (
        "g_l",
        "Fig. 5 caption: G_l/2π = 0.14 MHz (unbroken) or 0.2 MHz (broken)",
    ),
    ("g_ml", "Fig. 4 caption: G_{−l}/2π = 0.14 MHz"),
    ("j", "Fig. 4 caption: J/2π = 16 kHz"),
    ("kappa1", "Fig. 4 caption: κ_1/2π = κ_2/2π = 3.5 MHz"),
    ("kappa2", "Fig. 4 caption: κ_1/2π = κ_2/2π = 3.5 MHz"),
    ("kappa_in", "probe coupling, not in captions; absent means κ_1/2"),
    (
        "eps_p",
        "probe amplitude, not in captions; spectral shapes do not depend on it",
    ),
];

const MODES: &[(&str, &str)] = &[
    ("m_max", "enumeration bound on |m|"),
    ("allowed_only", "drop terms that violate the selection rule"),
];

fn table(device: Device) -> &'static [(&'static str, &'static str)] {
    match device {
        Device::Pairgen => PAIRGEN,
        Device::Convert => CONVERT,
        Device::Ptsym => PTSYM,
        Device::Modes => MODES,
    }
}

pub fn cite(device: Device, name: &str) -> &'static str {
    table(device)
        .iter()
        .find(|(n, _)| *n == name)
        .map_or("no citation recorded", |(_, c)| c)
}

/// Parameter names in reporting order.
pub fn order(device: Device) -> Vec<&'static str> {
    table(device).iter().map(|(n, _)| *n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use optomech::nonreciprocity::ConversionParams;
    use optomech::pairgen::PairgenParams;
    use optomech::phonon_pt::PTParams;

    fn fields<T: serde::Serialize>(v: T) -> Vec<String> {
        serde_json::to_value(v)
            .unwrap()
            .as_object()
            .unwrap()
            .keys()
            .cloned()
            .collect()
    }

    #[test]
    fn every_parameter_field_has_a_citation() {
        for (device, names) in [
            (Device::Pairgen, fields(PairgenParams::default())),
            (Device::Convert, fields(ConversionParams::default())),
            (Device::Ptsym, fields(PTParams::default())),
            (Device::Modes, fields(crate::run::ModesParams::default())),
        ] {
            for n in names {
                assert_ne!(cite(device, &n), "no citation recorded", "{device:?}.{n}");
            }
        }
    }
}
