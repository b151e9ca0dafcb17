//! Text configuration for spaces.
//!
//! Spaces load from TOML. Closed-form models need only a `kind`; graphs
//! list nodes and weighted edges; grids give spacing, stencil, density,
//! and a mask. Masks are either named shapes with parameters or explicit
//! rows, where each row is a run-length string like `"12x1 3x0 5x1"`
//! (count `x` value) or a plain bit string like `"110111"`.

use crate::error::{Error, Result};
use crate::space::grid::{DensitySpec, GridSpec, MaskSpec, Stencil};
use crate::space::Space;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceConfig {
    kind: String,
    #[serde(default)]
    spacing: Option<f64>,
    #[serde(default)]
    stencil: Option<u32>,
    #[serde(default)]
    density: Option<String>,
    #[serde(default)]
    puncture_step: Option<f64>,
    #[serde(default)]
    mask: Option<MaskConfig>,
    #[serde(default)]
    graph: Option<GraphConfig>,
    #[serde(default)]
    sampling_window: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaskConfig {
    shape: String,
    #[serde(default)]
    radius: Option<f64>,
    #[serde(default)]
    x_min: Option<f64>,
    #[serde(default)]
    x_max: Option<f64>,
    #[serde(default)]
    puncture_step: Option<f64>,
    #[serde(default)]
    puncture_radius: Option<f64>,
    #[serde(default)]
    x0: Option<f64>,
    #[serde(default)]
    y0: Option<f64>,
    #[serde(default)]
    rows: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphConfig {
    nodes: usize,
    edges: Vec<(usize, usize, f64)>,
}

/// Build a space from its TOML description.
pub fn space_from_toml(text: &str) -> Result<Space> {
    let cfg: SpaceConfig =
        toml::from_str(text).map_err(|e| Error::config(format!("bad space config: {e}")))?;
    let space = match cfg.kind.as_str() {
        "poincare-disk" => Space::poincare_disk(),
        "hyperbolic-strip" => Space::hyperbolic_strip(),
        "flat-cylinder" => Space::flat_cylinder(),
        "l1-slab" => Space::l1_slab(),
        "graph" => {
            let g = cfg
                .graph
                .ok_or_else(|| Error::config("kind \"graph\" needs a [graph] table"))?;
            Space::graph(g.nodes, &g.edges)?
        }
        "conformal-grid" => {
            let spacing = cfg
                .spacing
                .ok_or_else(|| Error::config("conformal-grid needs spacing"))?;
            let stencil = match cfg.stencil.unwrap_or(16) {
                8 => Stencil::Eight,
                16 => Stencil::Sixteen,
                other => {
                    return Err(Error::config(format!(
                        "stencil must be 8 or 16, got {other}"
                    )))
                }
            };
            let density_name = cfg
                .density
                .ok_or_else(|| Error::config("conformal-grid needs density"))?;
            let density = parse_density(&density_name, cfg.puncture_step)?;
            let mask_cfg = cfg
                .mask
                .ok_or_else(|| Error::config("conformal-grid needs a [mask] table"))?;
            let mask = parse_mask(&mask_cfg, spacing)?;
            Space::conformal_grid(&GridSpec {
                spacing,
                stencil,
                density,
                mask,
            })?
        }
        other => {
            return Err(Error::config(format!(
                "unknown space kind \"{other}\"; expected poincare-disk, hyperbolic-strip, \
                 flat-cylinder, l1-slab, graph, or conformal-grid"
            )))
        }
    };
    Ok(match cfg.sampling_window {
        Some(w) if w > 0.0 => space.with_sampling_window(w),
        Some(w) => return Err(Error::config(format!("sampling_window must be > 0, got {w}"))),
        None => space,
    })
}

fn parse_density(name: &str, puncture_step: Option<f64>) -> Result<DensitySpec> {
    match name {
        "poincare-disk" => Ok(DensitySpec::PoincareDisk),
        "hyperbolic-strip" => Ok(DensitySpec::HyperbolicStrip),
        "quasihyperbolic-punctured-strip" => Ok(DensitySpec::QuasihyperbolicPuncturedStrip {
            puncture_step: puncture_step.unwrap_or(1.0),
        }),
        other => Err(Error::config(format!("unknown density \"{other}\""))),
    }
}

fn parse_mask(cfg: &MaskConfig, spacing: f64) -> Result<MaskSpec> {
    match cfg.shape.as_str() {
        "disk" => Ok(MaskSpec::Disk {
            radius: cfg
                .radius
                .ok_or_else(|| Error::config("disk mask needs radius"))?,
        }),
        "strip" => Ok(MaskSpec::Strip {
            x_min: cfg
                .x_min
                .ok_or_else(|| Error::config("strip mask needs x_min"))?,
            x_max: cfg
                .x_max
                .ok_or_else(|| Error::config("strip mask needs x_max"))?,
        }),
        "punctured-strip" => Ok(MaskSpec::PuncturedStrip {
            x_min: cfg
                .x_min
                .ok_or_else(|| Error::config("punctured-strip mask needs x_min"))?,
            x_max: cfg
                .x_max
                .ok_or_else(|| Error::config("punctured-strip mask needs x_max"))?,
            puncture_step: cfg.puncture_step.unwrap_or(1.0),
            puncture_radius: cfg.puncture_radius.or(Some(spacing)),
        }),
        "rows" => {
            let rows_text = cfg
                .rows
                .as_ref()
                .ok_or_else(|| Error::config("rows mask needs rows"))?;
            let rows = rows_text
                .iter()
                .map(|r| parse_mask_row(r))
                .collect::<Result<Vec<_>>>()?;
            Ok(MaskSpec::Rows {
                x0: cfg.x0.unwrap_or(0.0),
                y0: cfg.y0.unwrap_or(0.0),
                rows,
            })
        }
        other => Err(Error::config(format!("unknown mask shape \"{other}\""))),
    }
}

/// One mask row: either whitespace-separated `COUNTxBIT` runs or a plain
/// string of `0`/`1` characters.
pub fn parse_mask_row(row: &str) -> Result<Vec<bool>> {
    let trimmed = row.trim();
    if trimmed.is_empty() {
        return Err(Error::config("empty mask row"));
    }
    if trimmed.contains('x') {
        let mut out = Vec::new();
        for token in trimmed.split_whitespace() {
            let (count, bit) = token
                .split_once('x')
                .ok_or_else(|| Error::config(format!("bad run token \"{token}\"")))?;
            let count: usize = count
                .parse()
                .map_err(|_| Error::config(format!("bad run count in \"{token}\"")))?;
            let bit = match bit {
                "0" => false,
                "1" => true,
                _ => return Err(Error::config(format!("bad run value in \"{token}\""))),
            };
            out.extend(std::iter::repeat_n(bit, count));
        }
        Ok(out)
    } else {
        trimmed
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::config(format!("bad mask character '{other}'"))),
            })
            .collect()
    }
}
