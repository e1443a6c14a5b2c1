//! Run configuration: a flat, line-oriented `key = value` format with dotted
//! section prefixes (`platform.mass_kg = 0.7`). Lines starting with `#` are
//! comments. Every key has a default; files override. Parsing collects every
//! problem before reporting so a bad file is fixed in one pass.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use fsojitter::forcing::{WindForceMode, WindScenario};
use fsojitter::pointing::ProjectionMode;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct PlatformConfig {
    pub mass_kg: f64,
    /// Rotational inertias about x (roll), y (pitch), z (yaw), kg·m².
    pub inertia_kgm2: [f64; 3],
    pub k_trans_n_per_m: f64,
    pub k_rot_nm_per_rad: f64,
    pub damping_alpha: f64,
    /// Optional full 6×6 input matrix, row-major. Identity when omitted.
    pub input_matrix: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropellerConfig {
    pub enabled: bool,
    pub hover: bool,
    pub b_drag: f64,
    pub v_hap_mps: f64,
    pub a_hap_mps2: [f64; 3],
    pub ripple_fraction: f64,
    pub blade_pass_hz: f64,
    pub torque_arm_m: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindConfig {
    pub enabled: bool,
    pub scenario: WindScenario,
    /// Overrides the scenario preset when set.
    pub mean_speed_mps: Option<f64>,
    pub area_m2: f64,
    pub rho_kg_per_m3: f64,
    pub gust_corner_hz: f64,
    pub turbulence_intensity: f64,
    pub force_mode: WindForceMode,
    pub torque_arm_m: f64,
    pub axis_coupling: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkConfig {
    pub range_m: f64,
    pub divergence_rad: f64,
    pub aperture_m: f64,
    pub transmit_power_dbm: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub duration_s: f64,
    pub dt_s: f64,
    pub seed: u64,
    pub start_at_equilibrium: bool,
    pub projection: ProjectionMode,
    pub divergence_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub directory: String,
    pub csv_sig_digits: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub platform: PlatformConfig,
    pub propeller: PropellerConfig,
    pub wind: WindConfig,
    pub link: LinkConfig,
    pub sim: SimConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            platform: PlatformConfig {
                mass_kg: 0.7,
                inertia_kgm2: [0.01, 0.01, 0.02],
                k_trans_n_per_m: 1e3,
                k_rot_nm_per_rad: 1e3,
                damping_alpha: 0.002,
                input_matrix: None,
            },
            propeller: PropellerConfig {
                enabled: true,
                hover: true,
                b_drag: 0.0,
                v_hap_mps: 0.0,
                a_hap_mps2: [0.0; 3],
                ripple_fraction: 0.05,
                blade_pass_hz: 100.0,
                torque_arm_m: 0.05,
            },
            wind: WindConfig {
                enabled: false,
                scenario: WindScenario::Typical,
                mean_speed_mps: None,
                area_m2: 10.0,
                rho_kg_per_m3: 0.1,
                gust_corner_hz: 2.0,
                turbulence_intensity: 0.2,
                force_mode: WindForceMode::AsGiven,
                torque_arm_m: 0.05,
                axis_coupling: [0.5, 1.0, 2.0],
            },
            link: LinkConfig {
                range_m: 10.0,
                divergence_rad: 1e-3,
                aperture_m: 0.037,
                transmit_power_dbm: None,
            },
            sim: SimConfig {
                duration_s: 5.0,
                dt_s: 1e-3,
                seed: 7,
                start_at_equilibrium: true,
                projection: ProjectionMode::AngularOnly,
                divergence_bound: 1e3,
            },
            output: OutputConfig {
                directory: "out".into(),
                csv_sig_digits: 9,
            },
        }
    }
}

fn parse_numbers(value: &str, n: usize, key: &str, problems: &mut Vec<String>) -> Option<Vec<f64>> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != n {
        problems.push(format!("{key}: expected {n} numbers, got {}", parts.len()));
        return None;
    }
    let mut out = Vec::with_capacity(n);
    for p in parts {
        match p.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            _ => {
                problems.push(format!("{key}: {p:?} is not a finite number"));
                return None;
            }
        }
    }
    Some(out)
}

impl RunConfig {
    /// Parses and validates; every problem is reported at once.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut problems = Vec::new();
        let mut entries: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line.split_once('=') {
                Some((key, value)) => {
                    let key = key.trim().to_string();
                    if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                        problems.push(format!("line {}: duplicate key {key}", lineno + 1));
                    }
                }
                None => problems.push(format!("line {}: expected `key = value`", lineno + 1)),
            }
        }

        let mut cfg = RunConfig::default();
        let mut take = |key: &str| entries.remove(key);

        macro_rules! scalar {
            ($key:literal, $slot:expr, $ty:ty) => {
                if let Some(v) = take($key) {
                    match v.parse::<$ty>() {
                        Ok(parsed) => $slot = parsed,
                        Err(_) => problems.push(format!("{}: cannot parse {v:?}", $key)),
                    }
                }
            };
        }

        scalar!("platform.mass_kg", cfg.platform.mass_kg, f64);
        if let Some(v) = take("platform.inertia_kgm2") {
            if let Some(nums) = parse_numbers(&v, 3, "platform.inertia_kgm2", &mut problems) {
                cfg.platform.inertia_kgm2 = [nums[0], nums[1], nums[2]];
            }
        }
        scalar!("platform.k_trans_n_per_m", cfg.platform.k_trans_n_per_m, f64);
        scalar!("platform.k_rot_nm_per_rad", cfg.platform.k_rot_nm_per_rad, f64);
        scalar!("platform.damping_alpha", cfg.platform.damping_alpha, f64);
        if let Some(v) = take("platform.input_matrix") {
            if let Some(nums) = parse_numbers(&v, 36, "platform.input_matrix", &mut problems) {
                cfg.platform.input_matrix = Some(nums);
            }
        }

        scalar!("forcing.propeller.enabled", cfg.propeller.enabled, bool);
        scalar!("forcing.propeller.hover", cfg.propeller.hover, bool);
        scalar!("forcing.propeller.b_drag", cfg.propeller.b_drag, f64);
        scalar!("forcing.propeller.v_hap_mps", cfg.propeller.v_hap_mps, f64);
        if let Some(v) = take("forcing.propeller.a_hap_mps2") {
            if let Some(nums) = parse_numbers(&v, 3, "forcing.propeller.a_hap_mps2", &mut problems)
            {
                cfg.propeller.a_hap_mps2 = [nums[0], nums[1], nums[2]];
            }
        }
        scalar!(
            "forcing.propeller.ripple_fraction",
            cfg.propeller.ripple_fraction,
            f64
        );
        scalar!(
            "forcing.propeller.blade_pass_hz",
            cfg.propeller.blade_pass_hz,
            f64
        );
        scalar!(
            "forcing.propeller.torque_arm_m",
            cfg.propeller.torque_arm_m,
            f64
        );

        scalar!("forcing.wind.enabled", cfg.wind.enabled, bool);
        if let Some(v) = take("forcing.wind.scenario") {
            match WindScenario::from_str(&v) {
                Ok(sc) => cfg.wind.scenario = sc,
                Err(_) => problems.push(format!("forcing.wind.scenario: unknown scenario {v:?}")),
            }
        }
        if let Some(v) = take("forcing.wind.mean_speed_mps") {
            match v.parse::<f64>() {
                Ok(parsed) => cfg.wind.mean_speed_mps = Some(parsed),
                Err(_) => problems.push(format!("forcing.wind.mean_speed_mps: cannot parse {v:?}")),
            }
        }
        scalar!("forcing.wind.area_m2", cfg.wind.area_m2, f64);
        scalar!("forcing.wind.rho_kg_per_m3", cfg.wind.rho_kg_per_m3, f64);
        scalar!("forcing.wind.gust_corner_hz", cfg.wind.gust_corner_hz, f64);
        scalar!(
            "forcing.wind.turbulence_intensity",
            cfg.wind.turbulence_intensity,
            f64
        );
        if let Some(v) = take("forcing.wind.force_mode") {
            match WindForceMode::from_str(&v) {
                Ok(mode) => cfg.wind.force_mode = mode,
                Err(_) => problems.push(format!("forcing.wind.force_mode: unknown mode {v:?}")),
            }
        }
        scalar!("forcing.wind.torque_arm_m", cfg.wind.torque_arm_m, f64);
        if let Some(v) = take("forcing.wind.axis_coupling") {
            if let Some(nums) = parse_numbers(&v, 3, "forcing.wind.axis_coupling", &mut problems) {
                cfg.wind.axis_coupling = [nums[0], nums[1], nums[2]];
            }
        }

        scalar!("link.range_m", cfg.link.range_m, f64);
        scalar!("link.divergence_rad", cfg.link.divergence_rad, f64);
        scalar!("link.aperture_m", cfg.link.aperture_m, f64);
        if let Some(v) = take("link.transmit_power_dbm") {
            match v.parse::<f64>() {
                Ok(parsed) => cfg.link.transmit_power_dbm = Some(parsed),
                Err(_) => problems.push(format!("link.transmit_power_dbm: cannot parse {v:?}")),
            }
        }

        scalar!("sim.duration_s", cfg.sim.duration_s, f64);
        scalar!("sim.dt_s", cfg.sim.dt_s, f64);
        scalar!("sim.seed", cfg.sim.seed, u64);
        scalar!("sim.start_at_equilibrium", cfg.sim.start_at_equilibrium, bool);
        if let Some(v) = take("sim.projection") {
            match ProjectionMode::from_str(&v) {
                Ok(mode) => cfg.sim.projection = mode,
                Err(e) => problems.push(format!("sim.projection: {e}")),
            }
        }
        scalar!("sim.divergence_bound", cfg.sim.divergence_bound, f64);

        if let Some(v) = take("output.directory") {
            cfg.output.directory = v;
        }
        scalar!("output.csv_sig_digits", cfg.output.csv_sig_digits, usize);

        for key in entries.keys() {
            problems.push(format!("{key}: unknown key"));
        }

        cfg.validate_into(&mut problems);
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(CliError::Usage(problems))
        }
    }

    fn validate_into(&self, problems: &mut Vec<String>) {
        let positive = [
            ("platform.mass_kg", self.platform.mass_kg),
            ("platform.k_trans_n_per_m", self.platform.k_trans_n_per_m),
            ("platform.k_rot_nm_per_rad", self.platform.k_rot_nm_per_rad),
            ("link.range_m", self.link.range_m),
            ("link.divergence_rad", self.link.divergence_rad),
            ("link.aperture_m", self.link.aperture_m),
            ("sim.duration_s", self.sim.duration_s),
            ("sim.dt_s", self.sim.dt_s),
            ("sim.divergence_bound", self.sim.divergence_bound),
        ];
        for (name, value) in positive {
            if !(value > 0.0) {
                problems.push(format!("{name}: must be > 0 (got {value})"));
            }
        }
        for (i, inertia) in self.platform.inertia_kgm2.iter().enumerate() {
            if !(*inertia > 0.0) {
                problems.push(format!(
                    "platform.inertia_kgm2[{i}]: must be > 0 (got {inertia})"
                ));
            }
        }
        if !(self.platform.damping_alpha >= 0.0) {
            problems.push(format!(
                "platform.damping_alpha: must be >= 0 (got {})",
                self.platform.damping_alpha
            ));
        }
        if self.propeller.enabled {
            if !(0.0..=1.0).contains(&self.propeller.ripple_fraction) {
                problems.push(format!(
                    "forcing.propeller.ripple_fraction: must be in [0, 1] (got {})",
                    self.propeller.ripple_fraction
                ));
            }
            if !(self.propeller.blade_pass_hz > 0.0) {
                problems.push(format!(
                    "forcing.propeller.blade_pass_hz: must be > 0 (got {})",
                    self.propeller.blade_pass_hz
                ));
            }
        }
        if self.wind.enabled {
            if !(self.wind.rho_kg_per_m3 > 0.0 && self.wind.rho_kg_per_m3 <= 0.2) {
                problems.push(format!(
                    "forcing.wind.rho_kg_per_m3: must be in (0, 0.2] (got {})",
                    self.wind.rho_kg_per_m3
                ));
            }
            if !(self.wind.area_m2 >= 0.0) {
                problems.push(format!(
                    "forcing.wind.area_m2: must be >= 0 (got {})",
                    self.wind.area_m2
                ));
            }
            if !(self.wind.gust_corner_hz > 0.0) {
                problems.push(format!(
                    "forcing.wind.gust_corner_hz: must be > 0 (got {})",
                    self.wind.gust_corner_hz
                ));
            }
            if let Some(speed) = self.wind.mean_speed_mps {
                if !(speed >= 0.0) {
                    problems.push(format!(
                        "forcing.wind.mean_speed_mps: must be >= 0 (got {speed})"
                    ));
                }
            }
        }
        if self.sim.duration_s > 0.0 && self.sim.dt_s > 0.0 && self.sim.duration_s < self.sim.dt_s {
            problems.push(format!(
                "sim.duration_s: must be >= sim.dt_s (got {} < {})",
                self.sim.duration_s, self.sim.dt_s
            ));
        }
        if self.output.csv_sig_digits < 1 || self.output.csv_sig_digits > 17 {
            problems.push(format!(
                "output.csv_sig_digits: must be in [1, 17] (got {})",
                self.output.csv_sig_digits
            ));
        }
        if !self.propeller.enabled && !self.wind.enabled {
            problems.push(
                "forcing: at least one of forcing.propeller.enabled / forcing.wind.enabled must be true"
                    .into(),
            );
        }
    }

    /// Canonical text form; `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let join = |nums: &[f64]| {
            nums.iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(s, "platform.mass_kg = {}", self.platform.mass_kg).unwrap();
        writeln!(
            s,
            "platform.inertia_kgm2 = {}",
            join(&self.platform.inertia_kgm2)
        )
        .unwrap();
        writeln!(s, "platform.k_trans_n_per_m = {}", self.platform.k_trans_n_per_m).unwrap();
        writeln!(
            s,
            "platform.k_rot_nm_per_rad = {}",
            self.platform.k_rot_nm_per_rad
        )
        .unwrap();
        writeln!(s, "platform.damping_alpha = {}", self.platform.damping_alpha).unwrap();
        if let Some(b) = &self.platform.input_matrix {
            writeln!(s, "platform.input_matrix = {}", join(b)).unwrap();
        }
        writeln!(s, "forcing.propeller.enabled = {}", self.propeller.enabled).unwrap();
        writeln!(s, "forcing.propeller.hover = {}", self.propeller.hover).unwrap();
        writeln!(s, "forcing.propeller.b_drag = {}", self.propeller.b_drag).unwrap();
        writeln!(s, "forcing.propeller.v_hap_mps = {}", self.propeller.v_hap_mps).unwrap();
        writeln!(
            s,
            "forcing.propeller.a_hap_mps2 = {}",
            join(&self.propeller.a_hap_mps2)
        )
        .unwrap();
        writeln!(
            s,
            "forcing.propeller.ripple_fraction = {}",
            self.propeller.ripple_fraction
        )
        .unwrap();
        writeln!(
            s,
            "forcing.propeller.blade_pass_hz = {}",
            self.propeller.blade_pass_hz
        )
        .unwrap();
        writeln!(
            s,
            "forcing.propeller.torque_arm_m = {}",
            self.propeller.torque_arm_m
        )
        .unwrap();
        writeln!(s, "forcing.wind.enabled = {}", self.wind.enabled).unwrap();
        writeln!(s, "forcing.wind.scenario = {}", self.wind.scenario.name()).unwrap();
        if let Some(speed) = self.wind.mean_speed_mps {
            writeln!(s, "forcing.wind.mean_speed_mps = {speed}").unwrap();
        }
        writeln!(s, "forcing.wind.area_m2 = {}", self.wind.area_m2).unwrap();
        writeln!(s, "forcing.wind.rho_kg_per_m3 = {}", self.wind.rho_kg_per_m3).unwrap();
        writeln!(s, "forcing.wind.gust_corner_hz = {}", self.wind.gust_corner_hz).unwrap();
        writeln!(
            s,
            "forcing.wind.turbulence_intensity = {}",
            self.wind.turbulence_intensity
        )
        .unwrap();
        writeln!(s, "forcing.wind.force_mode = {}", self.wind.force_mode.name()).unwrap();
        writeln!(s, "forcing.wind.torque_arm_m = {}", self.wind.torque_arm_m).unwrap();
        writeln!(
            s,
            "forcing.wind.axis_coupling = {}",
            join(&self.wind.axis_coupling)
        )
        .unwrap();
        writeln!(s, "link.range_m = {}", self.link.range_m).unwrap();
        writeln!(s, "link.divergence_rad = {}", self.link.divergence_rad).unwrap();
        writeln!(s, "link.aperture_m = {}", self.link.aperture_m).unwrap();
        if let Some(p) = self.link.transmit_power_dbm {
            writeln!(s, "link.transmit_power_dbm = {p}").unwrap();
        }
        writeln!(s, "sim.duration_s = {}", self.sim.duration_s).unwrap();
        writeln!(s, "sim.dt_s = {}", self.sim.dt_s).unwrap();
        writeln!(s, "sim.seed = {}", self.sim.seed).unwrap();
        writeln!(
            s,
            "sim.start_at_equilibrium = {}",
            self.sim.start_at_equilibrium
        )
        .unwrap();
        writeln!(s, "sim.projection = {}", self.sim.projection.name()).unwrap();
        writeln!(s, "sim.divergence_bound = {}", self.sim.divergence_bound).unwrap();
        writeln!(s, "output.directory = {}", self.output.directory).unwrap();
        writeln!(s, "output.csv_sig_digits = {}", self.output.csv_sig_digits).unwrap();
        s
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}
