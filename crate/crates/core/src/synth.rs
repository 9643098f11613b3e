//! Archetype-based synthetic scenarios with planted cluster labels.
//!
//! Each archetype carries three 24-hour templates (workday, Saturday, Sunday)
//! whose shapes follow the residential, business, transport and unclassifiable
//! cell behaviours observed in urban LTE networks.

use chrono::{Duration, NaiveDate};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{midnight, DayClass, HourlyTrace};
use crate::util::rng_for;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeSpec {
    pub name: String,
    pub workday_profile: Vec<f64>,
    pub saturday_profile: Vec<f64>,
    pub sunday_profile: Vec<f64>,
    /// Per-cell amplitude (bytes at profile level 1.0) is drawn uniformly from this range.
    pub amplitude_range: (f64, f64),
    /// Standard deviation of the multiplicative hourly noise.
    pub noise_sigma: f64,
    /// Relative growth per day.
    pub trend_slope: f64,
}

impl ArchetypeSpec {
    pub fn profile(&self, class: DayClass) -> &[f64] {
        match class {
            DayClass::Workday => &self.workday_profile,
            DayClass::Saturday => &self.saturday_profile,
            DayClass::Sunday => &self.sunday_profile,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for class in DayClass::ALL {
            let p = self.profile(class);
            if p.len() != 24 || p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::invalid(format!(
                    "archetype {}: {class:?} profile must hold 24 non-negative values",
                    self.name
                )));
            }
        }
        let (lo, hi) = self.amplitude_range;
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::invalid(format!("archetype {}: bad amplitude range", self.name)));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::invalid(format!("archetype {}: negative noise", self.name)));
        }
        Ok(())
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    pub fn with_amplitude(mut self, lo: f64, hi: f64) -> Self {
        self.amplitude_range = (lo, hi);
        self
    }

    pub fn with_trend(mut self, slope: f64) -> Self {
        self.trend_slope = slope;
        self
    }
}

#[rustfmt::skip]
const R1_WORK: [f64; 24] = [0.55, 0.35, 0.22, 0.15, 0.12, 0.13, 0.22, 0.38, 0.52, 0.48, 0.42, 0.40,
                            0.42, 0.41, 0.40, 0.41, 0.44, 0.50, 0.58, 0.68, 0.82, 1.00, 0.92, 0.74];
#[rustfmt::skip]
const R1_SAT: [f64; 24] = [0.62, 0.45, 0.30, 0.20, 0.15, 0.14, 0.16, 0.22, 0.30, 0.40, 0.48, 0.52,
                           0.55, 0.54, 0.53, 0.54, 0.56, 0.60, 0.66, 0.74, 0.86, 1.00, 0.95, 0.80];
#[rustfmt::skip]
const R1_SUN: [f64; 24] = [0.66, 0.50, 0.34, 0.22, 0.16, 0.14, 0.15, 0.19, 0.26, 0.36, 0.46, 0.52,
                           0.56, 0.55, 0.53, 0.54, 0.57, 0.62, 0.68, 0.76, 0.88, 1.00, 0.93, 0.76];
#[rustfmt::skip]
const R2_WORK: [f64; 24] = [0.58, 0.40, 0.27, 0.19, 0.15, 0.16, 0.26, 0.42, 0.58, 0.66, 0.70, 0.72,
                            0.74, 0.72, 0.70, 0.71, 0.72, 0.74, 0.76, 0.80, 0.86, 0.90, 0.84, 0.72];
#[rustfmt::skip]
const R2_SAT: [f64; 24] = [0.60, 0.44, 0.30, 0.21, 0.16, 0.15, 0.18, 0.25, 0.34, 0.44, 0.52, 0.56,
                           0.58, 0.57, 0.56, 0.57, 0.59, 0.63, 0.69, 0.77, 0.88, 1.00, 0.94, 0.79];
#[rustfmt::skip]
const R2_SUN: [f64; 24] = [0.64, 0.48, 0.33, 0.23, 0.17, 0.15, 0.17, 0.22, 0.30, 0.40, 0.50, 0.56,
                           0.59, 0.58, 0.56, 0.57, 0.60, 0.64, 0.70, 0.78, 0.89, 1.00, 0.92, 0.77];
#[rustfmt::skip]
const B_WORK: [f64; 24] = [0.10, 0.07, 0.05, 0.05, 0.05, 0.07, 0.12, 0.30, 0.62, 0.90, 0.98, 1.00,
                           0.88, 0.90, 0.97, 0.95, 0.86, 0.66, 0.40, 0.24, 0.18, 0.15, 0.13, 0.11];
#[rustfmt::skip]
const B_SAT: [f64; 24] = [0.10, 0.08, 0.06, 0.05, 0.05, 0.06, 0.08, 0.11, 0.15, 0.19, 0.22, 0.24,
                          0.24, 0.23, 0.22, 0.21, 0.20, 0.18, 0.16, 0.15, 0.14, 0.13, 0.12, 0.11];
#[rustfmt::skip]
const T_WORK: [f64; 24] = [0.12, 0.07, 0.05, 0.05, 0.08, 0.20, 0.50, 0.85, 1.00, 0.70, 0.50, 0.45,
                           0.48, 0.45, 0.44, 0.50, 0.68, 0.90, 0.98, 0.72, 0.45, 0.32, 0.24, 0.17];
#[rustfmt::skip]
const T_SAT: [f64; 24] = [0.15, 0.10, 0.07, 0.06, 0.06, 0.08, 0.10, 0.13, 0.16, 0.19, 0.22, 0.24,
                          0.25, 0.25, 0.24, 0.24, 0.25, 0.26, 0.26, 0.24, 0.21, 0.19, 0.17, 0.15];

fn scaled(p: &[f64; 24], f: f64) -> Vec<f64> {
    p.iter().map(|v| v * f).collect()
}

/// Residential (R1), secondary residential (R2), business (B), transport (T)
/// and unclassifiable (U) templates, in that order.
pub fn builtin_archetypes() -> Vec<ArchetypeSpec> {
    vec![
        ArchetypeSpec {
            name: "R1".into(),
            workday_profile: R1_WORK.to_vec(),
            saturday_profile: R1_SAT.to_vec(),
            sunday_profile: R1_SUN.to_vec(),
            amplitude_range: (4.0e8, 8.0e8),
            noise_sigma: 0.05,
            trend_slope: 0.0,
        },
        ArchetypeSpec {
            name: "R2".into(),
            workday_profile: R2_WORK.to_vec(),
            saturday_profile: R2_SAT.to_vec(),
            sunday_profile: R2_SUN.to_vec(),
            amplitude_range: (3.0e8, 6.0e8),
            noise_sigma: 0.05,
            trend_slope: 0.0,
        },
        ArchetypeSpec {
            name: "B".into(),
            workday_profile: B_WORK.to_vec(),
            saturday_profile: B_SAT.to_vec(),
            sunday_profile: scaled(&B_SAT, 0.85),
            amplitude_range: (2.0e8, 5.0e8),
            noise_sigma: 0.05,
            trend_slope: 0.0,
        },
        ArchetypeSpec {
            name: "T".into(),
            workday_profile: T_WORK.to_vec(),
            saturday_profile: T_SAT.to_vec(),
            sunday_profile: scaled(&T_SAT, 0.85),
            amplitude_range: (3.0e8, 6.0e8),
            noise_sigma: 0.05,
            trend_slope: 0.0,
        },
        ArchetypeSpec {
            name: "U".into(),
            workday_profile: vec![0.5; 24],
            saturday_profile: vec![0.5; 24],
            sunday_profile: vec![0.5; 24],
            amplitude_range: (2.0e6, 6.0e6),
            noise_sigma: 0.8,
            trend_slope: 0.0,
        },
    ]
}

pub fn builtin_archetype(name: &str) -> Option<ArchetypeSpec> {
    builtin_archetypes().into_iter().find(|a| a.name == name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub mix: Vec<(ArchetypeSpec, usize)>,
    pub start: NaiveDate,
    pub days: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.mix.iter().map(|(_, n)| n).sum::<usize>() == 0 {
            return Err(Error::invalid("scenario needs at least one cell"));
        }
        if self.days < 7 {
            return Err(Error::invalid("scenario must span at least 7 days"));
        }
        self.mix.iter().try_for_each(|(a, _)| a.validate())
    }

    pub fn cell_count(&self) -> usize {
        self.mix.iter().map(|(_, n)| n).sum()
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub traces: Vec<HourlyTrace>,
    /// `(cell_id, archetype name)` in trace order.
    pub labels: Vec<(String, String)>,
}

impl Scenario {
    pub fn label_of(&self, cell_id: &str) -> Option<&str> {
        self.labels.iter().find(|(c, _)| c == cell_id).map(|(_, a)| a.as_str())
    }
}

pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.validate()?;
    let jobs: Vec<(usize, &ArchetypeSpec, usize)> = spec
        .mix
        .iter()
        .flat_map(|(arch, n)| (0..*n).map(move |i| (arch, i)))
        .enumerate()
        .map(|(global, (arch, local))| (global, arch, local))
        .collect();

    let traces = jobs
        .par_iter()
        .map(|&(global, arch, local)| {
            let cell_id = format!("{}-{:04}", arch.name, local);
            let values = synth_cell(arch, spec.start, spec.days, spec.seed, global as u64);
            HourlyTrace::from_values(cell_id, midnight(spec.start), values)
        })
        .collect::<Result<Vec<_>>>()?;

    let labels =
        jobs.iter().zip(&traces).map(|((_, arch, _), t)| (t.cell_id().to_string(), arch.name.clone())).collect();
    Ok(Scenario { traces, labels })
}

fn synth_cell(arch: &ArchetypeSpec, start: NaiveDate, days: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = rng_for(seed, stream);
    let (lo, hi) = arch.amplitude_range;
    let amplitude = if hi > lo { rng.gen_range(lo..hi) } else { lo };
    let noise = (arch.noise_sigma > 0.0).then(|| Normal::new(0.0, arch.noise_sigma).expect("sigma > 0"));
    let mut values = Vec::with_capacity(days * 24);
    for day in 0..days {
        let date = start + Duration::days(day as i64);
        let profile = arch.profile(DayClass::of(date));
        let growth = 1.0 + arch.trend_slope * day as f64;
        for &level in profile {
            let eps = noise.as_ref().map_or(0.0, |n| n.sample(&mut rng));
            values.push(amplitude * level * growth * (1.0 + eps).max(0.0));
        }
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argmax(xs: &[f64]) -> usize {
        let mut best = 0;
        for (i, &x) in xs.iter().enumerate() {
            if x > xs[best] {
                best = i;
            }
        }
        best
    }

    #[test]
    fn residential_evening_peak() {
        let r1 = builtin_archetype("R1").unwrap();
        assert!([21, 22].contains(&argmax(&r1.workday_profile)));
    }

    #[test]
    fn transport_rush_hours() {
        let t = builtin_archetype("T").unwrap();
        let p = &t.workday_profile;
        for h in [8, 18] {
            assert!(p[h] > p[h - 1] && p[h] > p[h + 1], "hour {h}");
        }
    }

    #[test]
    fn business_weekend_is_quiet() {
        let b = builtin_archetype("B").unwrap();
        let office: f64 = b.workday_profile[9..18].iter().sum::<f64>() / 9.0;
        let weekend: f64 = b.saturday_profile.iter().chain(&b.sunday_profile).sum::<f64>() / 48.0;
        assert!(weekend < 0.4 * office);
        let t = builtin_archetype("T").unwrap();
        let t_week: f64 = t.workday_profile.iter().sum::<f64>() / 24.0;
        let t_end: f64 = t.saturday_profile.iter().sum::<f64>() / 24.0;
        assert!(t_end < 0.6 * t_week);
    }

    #[test]
    fn all_builtins_valid() {
        assert_eq!(builtin_archetypes().len(), 5);
        builtin_archetypes().iter().for_each(|a| a.validate().unwrap());
    }

    fn spec(seed: u64) -> ScenarioSpec {
        let mix = builtin_archetypes().into_iter().take(4).map(|a| (a, 3)).collect();
        ScenarioSpec { mix, start: NaiveDate::from_ymd_opt(2020, 1, 6).unwrap(), days: 14, seed }
    }

    #[test]
    fn deterministic_under_seed() {
        let a = generate_scenario(&spec(3)).unwrap();
        let b = generate_scenario(&spec(3)).unwrap();
        let c = generate_scenario(&spec(4)).unwrap();
        assert_eq!(a.traces, b.traces);
        assert_ne!(a.traces, c.traces);
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.traces.len(), 12);
        assert_eq!(a.label_of("B-0002"), Some("B"));
    }

    #[test]
    fn values_non_negative_even_with_heavy_noise() {
        let u = builtin_archetype("U").unwrap().with_noise(3.0);
        let s =
            ScenarioSpec { mix: vec![(u, 5)], start: NaiveDate::from_ymd_opt(2020, 1, 6).unwrap(), days: 7, seed: 1 };
        let sc = generate_scenario(&s).unwrap();
        assert!(sc.traces.iter().flat_map(|t| t.values()).all(|v| v.unwrap() >= 0.0));
    }

    #[test]
    fn noiseless_cells_follow_template() {
        let r1 = builtin_archetype("R1").unwrap().with_noise(0.0).with_amplitude(10.0, 10.0);
        let s = ScenarioSpec {
            mix: vec![(r1.clone(), 1)],
            start: NaiveDate::from_ymd_opt(2020, 1, 4).unwrap(),
            days: 7,
            seed: 1,
        };
        let sc = generate_scenario(&s).unwrap();
        let v = sc.traces[0].values();
        // 2020-01-04 is a Saturday
        assert_eq!(v[21].unwrap(), 10.0 * r1.saturday_profile[21]);
        assert_eq!(v[24 + 3].unwrap(), 10.0 * r1.sunday_profile[3]);
        assert_eq!(v[48 + 8].unwrap(), 10.0 * r1.workday_profile[8]);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut s = spec(1);
        s.days = 6;
        assert!(generate_scenario(&s).is_err());
        let mut s = spec(1);
        s.mix[0].0.workday_profile.pop();
        assert!(generate_scenario(&s).is_err());
        let s = ScenarioSpec { mix: vec![], ..spec(1) };
        assert!(generate_scenario(&s).is_err());
    }
}
