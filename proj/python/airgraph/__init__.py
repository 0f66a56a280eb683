"""Graph-based PM2.5 forecasting: geometry, metrics, datasets and the CLI."""

from airgraph._core import (
    City,
    ConfigError,
    DataError,
    ElevationGrid,
    Error,
    GeometryError,
    GraphTopology,
    ShapeError,
    TrainingAborted,
    __version__,
    advection_coefficient,
    bearing_deg,
    build_adjacency,
    csi_pod_far,
    haversine_km,
    load_dataset,
    ridge_height,
    rmse_mae,
    run_cli,
)

__all__ = [
    "City",
    "ConfigError",
    "DataError",
    "ElevationGrid",
    "Error",
    "GeometryError",
    "GraphTopology",
    "ShapeError",
    "TrainingAborted",
    "__version__",
    "advection_coefficient",
    "bearing_deg",
    "build_adjacency",
    "csi_pod_far",
    "haversine_km",
    "load_dataset",
    "ridge_height",
    "rmse_mae",
    "run_cli",
]
