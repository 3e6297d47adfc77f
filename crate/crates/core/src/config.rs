//! Job configuration: one JSON document covering every stage.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::PartitionConfig;
use crate::pathgen::PrintConfig;
use crate::shell::ShellConfig;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub partition: PartitionConfig,
    pub shell: ShellConfig,
    pub print: PrintConfig,
}

/// Command-line overrides; `None` keeps the configured value.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub gamma: Option<f64>,
    pub bbox: Option<[f64; 3]>,
    pub dq: Option<usize>,
    pub nozzle: Option<f64>,
    pub thickness: Option<f64>,
    pub rib_spacing: Option<usize>,
    pub rib_gap: Option<f64>,
    pub h_target: Option<f64>,
    pub speed_wall: Option<f64>,
    pub speed_support: Option<f64>,
    pub hatch: Option<f64>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Config> {
        Config::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        let p = &mut self.partition;
        let s = &mut self.shell;
        let q = &mut self.print;
        macro_rules! set {
            ($($dst:expr => $src:expr),*) => { $(if let Some(v) = $src { $dst = v; })* };
        }
        set!(p.gamma => o.gamma, p.bbox => o.bbox, p.dq => o.dq,
             s.nozzle => o.nozzle, s.thickness => o.thickness,
             s.rib_spacing => o.rib_spacing, s.rib_gap => o.rib_gap,
             q.h_target => o.h_target, q.speed_wall => o.speed_wall,
             q.speed_support => o.speed_support, q.hatch => o.hatch);
        // the layer width follows the nozzle unless it was set apart from it
        if let Some(n) = o.nozzle {
            if (q.width - ShellConfig::default().nozzle).abs() < 1e-12 {
                q.width = n;
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.partition.validate()?;
        self.shell.validate()?;
        self.print.validate(self.shell.nozzle)
    }

    /// Room taken by the shell thickness and the support platform, kept free
    /// in every direction of the reach box when partitioning.
    pub fn reach_reserve(&self) -> f64 {
        self.shell.thickness + self.print.platform_layers as f64 * self.print.h_target + self.print.lift
    }

    /// Partition settings with the bbox shrunk by the reach reserve.
    pub fn partition_for_print(&self) -> Result<PartitionConfig> {
        let r = self.reach_reserve();
        let mut p = self.partition;
        for b in &mut p.bbox {
            *b -= r;
        }
        if p.bbox.iter().any(|&b| b <= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "bbox {:?} leaves no room after the {r} mm shell and platform reserve",
                self.partition.bbox
            )));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_keeps_defaults() {
        let c = Config::from_json(r#"{"shell":{"thickness":12}}"#).unwrap();
        assert_eq!(c.shell.thickness, 12.0);
        assert_eq!(c.shell.nozzle, 2.5);
        assert_eq!(c.partition, PartitionConfig::default());
        assert_eq!(Config::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn overrides_and_validation() {
        let mut c = Config::default();
        c.apply(&Overrides { bbox: Some([120.0; 3]), h_target: Some(3.0), ..Default::default() });
        assert_eq!(c.partition.bbox, [120.0; 3]);
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        c.apply(&Overrides { nozzle: Some(3.0), thickness: Some(12.0), ..Default::default() });
        assert_eq!(c.print.width, 3.0);
        c.validate().unwrap();
    }

    #[test]
    fn reserve_shrinks_the_box() {
        let c = Config::default();
        assert_eq!(c.reach_reserve(), 14.5);
        assert_eq!(c.partition_for_print().unwrap().bbox, [485.5; 3]);
        let mut tiny = c;
        tiny.partition.bbox = [10.0; 3];
        assert!(tiny.partition_for_print().is_err());
    }
}
