//! Scenario resolution: domain / pinning / field specs from compact spec
//! strings or a flat key=value scenario file. File keys use dotted sections
//! (`domain.kind=disk`), and command-line flags override file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use glpin_core::{Error, FieldSpec, Grid2D, PinningSpec, Result, ScalarField2D};

#[derive(Debug, Clone)]
pub struct Scenario {
    pub domain: DomainSpec,
    pub resolution: usize,
    pub pinning: PinningSpec,
    pub field: FieldSpec,
    pub seed: u64,
    /// All resolved keys, for the manifest.
    pub resolved: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub enum DomainSpec {
    Square { side: f64, origin: (f64, f64) },
    Disk { center: (f64, f64), r: f64 },
}

impl DomainSpec {
    pub fn build(&self, resolution: usize) -> Result<Arc<Grid2D>> {
        match self {
            DomainSpec::Square { side, origin } => {
                Ok(Arc::new(Grid2D::square(resolution, *side, *origin)?))
            }
            DomainSpec::Disk { center, r } => Ok(Arc::new(Grid2D::disk(resolution, *center, *r)?)),
        }
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| Error::invalid(format!("{what}: {e} in `{s}`")))
}

pub fn parse_domain(s: &str) -> Result<DomainSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["square"] => Ok(DomainSpec::Square { side: 1.0, origin: (0.0, 0.0) }),
        ["square", side] => {
            let side = parse_f64(side, "domain.side")?;
            Ok(DomainSpec::Square { side, origin: (-side / 2.0, -side / 2.0) })
        }
        ["square", side, ox, oy] => Ok(DomainSpec::Square {
            side: parse_f64(side, "domain.side")?,
            origin: (parse_f64(ox, "domain.origin")?, parse_f64(oy, "domain.origin")?),
        }),
        ["disk", r] => Ok(DomainSpec::Disk { center: (0.0, 0.0), r: parse_f64(r, "domain.r")? }),
        ["disk", cx, cy, r] => Ok(DomainSpec::Disk {
            center: (parse_f64(cx, "domain.center")?, parse_f64(cy, "domain.center")?),
            r: parse_f64(r, "domain.r")?,
        }),
        _ => Err(Error::invalid(format!(
            "domain `{s}`: expected square | square:SIDE[:OX:OY] | disk:[CX:CY:]R"
        ))),
    }
}

pub fn parse_pinning(s: &str) -> Result<PinningSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["constant", c] => Ok(PinningSpec::Constant(parse_f64(c, "pinning.constant")?)),
        ["linear", a0, gx, gy] => Ok(PinningSpec::Linear {
            a0: parse_f64(a0, "pinning.a0")?,
            gx: parse_f64(gx, "pinning.gx")?,
            gy: parse_f64(gy, "pinning.gy")?,
        }),
        ["radial", cx, cy, peak, decay] => Ok(PinningSpec::RadialBump {
            center: (parse_f64(cx, "pinning.cx")?, parse_f64(cy, "pinning.cy")?),
            peak: parse_f64(peak, "pinning.peak")?,
            decay: parse_f64(decay, "pinning.decay")?,
        }),
        ["periodic", base, amp, t1, t2] => Ok(PinningSpec::PeriodicOsc {
            base: parse_f64(base, "pinning.base")?,
            amp: parse_f64(amp, "pinning.amp")?,
            t1_period: parse_f64(t1, "pinning.t1")?,
            t2_period: parse_f64(t2, "pinning.t2")?,
        }),
        ["sum", a0, gx, gy, base, amp, t1, t2] => Ok(PinningSpec::Sum(
            Box::new(PinningSpec::Linear {
                a0: parse_f64(a0, "pinning.a0")?,
                gx: parse_f64(gx, "pinning.gx")?,
                gy: parse_f64(gy, "pinning.gy")?,
            }),
            Box::new(PinningSpec::PeriodicOsc {
                base: parse_f64(base, "pinning.base")?,
                amp: parse_f64(amp, "pinning.amp")?,
                t1_period: parse_f64(t1, "pinning.t1")?,
                t2_period: parse_f64(t2, "pinning.t2")?,
            }),
        )),
        ["csv", path] => {
            if !Path::new(path).exists() {
                return Err(Error::invalid(format!("pinning table `{path}` does not exist")));
            }
            let f = ScalarField2D::read_csv(Path::new(path))?;
            Ok(PinningSpec::Tabulated(Arc::new(f)))
        }
        _ => Err(Error::invalid(format!(
            "pinning `{s}`: expected constant:C | linear:A0:GX:GY | radial:CX:CY:PEAK:DECAY | periodic:BASE:AMP:T1:T2 | sum:A0:GX:GY:BASE:AMP:T1:T2 | csv:PATH"
        ))),
    }
}

pub fn parse_field(s: &str) -> Result<FieldSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["constant", c] => Ok(FieldSpec::Constant(parse_f64(c, "field.constant")?)),
        ["linear-x1", scale] => Ok(FieldSpec::LinearX1 { scale: parse_f64(scale, "field.scale")? }),
        ["ring", cx, cy, r0] => Ok(FieldSpec::RadialRing {
            center: (parse_f64(cx, "field.cx")?, parse_f64(cy, "field.cy")?),
            r0: parse_f64(r0, "field.r0")?,
        }),
        ["csv", path] => {
            if !Path::new(path).exists() {
                return Err(Error::invalid(format!("field table `{path}` does not exist")));
            }
            let f = ScalarField2D::read_csv(Path::new(path))?;
            Ok(FieldSpec::Tabulated(Arc::new(f)))
        }
        _ => Err(Error::invalid(format!(
            "field `{s}`: expected constant:C | linear-x1:SCALE | ring:CX:CY:R0 | csv:PATH"
        ))),
    }
}

/// Flat `key = value` file with `#` comments.
pub fn read_kv_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{}:{}: expected key = value", path.display(), ln + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Resolve a scenario from an optional file plus flag overrides.
pub fn resolve(
    file: Option<&Path>,
    domain_flag: Option<&str>,
    resolution_flag: Option<usize>,
    pinning_flag: Option<&str>,
    field_flag: Option<&str>,
    seed_flag: Option<u64>,
) -> Result<Scenario> {
    let file_map = match file {
        Some(p) => read_kv_file(p)?,
        None => BTreeMap::new(),
    };
    let pick = |flag: Option<&str>, key: &str, default: &str| -> String {
        flag.map(str::to_string)
            .or_else(|| file_map.get(key).cloned())
            .unwrap_or_else(|| default.to_string())
    };
    let domain_s = pick(domain_flag, "domain.spec", "square");
    let pinning_s = pick(pinning_flag, "pinning.spec", "constant:1.0");
    let field_s = pick(field_flag, "field.spec", "constant:1.0");
    let resolution = match resolution_flag {
        Some(r) => r,
        None => file_map
            .get("domain.resolution")
            .map(|s| s.parse::<usize>().map_err(|e| Error::invalid(format!("resolution: {e}"))))
            .transpose()?
            .unwrap_or(128),
    };
    let seed = match seed_flag {
        Some(s) => s,
        None => file_map
            .get("run.seed")
            .map(|s| s.parse::<u64>().map_err(|e| Error::invalid(format!("seed: {e}"))))
            .transpose()?
            .unwrap_or(7),
    };
    let mut resolved = BTreeMap::new();
    resolved.insert("domain.spec".into(), domain_s.clone());
    resolved.insert("domain.resolution".into(), resolution.to_string());
    resolved.insert("pinning.spec".into(), pinning_s.clone());
    resolved.insert("field.spec".into(), field_s.clone());
    resolved.insert("run.seed".into(), seed.to_string());
    Ok(Scenario {
        domain: parse_domain(&domain_s)?,
        resolution,
        pinning: parse_pinning(&pinning_s)?,
        field: parse_field(&field_s)?,
        seed,
        resolved,
    })
}
