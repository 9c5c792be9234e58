use serde::{Deserialize, Serialize};

use super::Tensor4Field;
use crate::error::{Error, Result};
use crate::geodesic::{field_point_to_region, Aabb, RegionResult, SeedRegion, TrackingParams};

/// Seeds and target for one diagonal-component layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingLayer {
    pub seeds: SeedRegion,
    pub target: Aabb,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerTracks {
    /// 0 for the `T_xx` layer, 1 for `T_yy`.
    pub layer: usize,
    pub result: RegionResult,
}

/// Track each fiber population on its own diagonal-component field: layer 1
/// is built from the `T_xx` blocks, layer 2 from `T_yy`.
pub fn track_crossing(field4: &Tensor4Field, layers: &[CrossingLayer; 2], params: &TrackingParams) -> Result<Vec<LayerTracks>> {
    if field4.grid().dim != 2 {
        return Err(Error::Dimension(field4.grid().dim));
    }
    let fields = field4.diagonal_fields()?;
    fields
        .iter()
        .zip(layers)
        .enumerate()
        .map(|(layer, (f, spec))| {
            Ok(LayerTracks { layer, result: field_point_to_region(f, &spec.seeds, &spec.target, params)? })
        })
        .collect()
}
