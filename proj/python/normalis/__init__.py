"""Surface normals from depth images (SNE+ and baselines)."""

from ._core import (
    CameraIntrinsics,
    DegenerateInput,
    FormatError,
    InvalidInput,
    IoError,
    add_noise,
    angular_error,
    axial_optimal_inclination,
    back_project,
    estimate_normals,
    estimators,
    fscore,
    grid_search_inclination,
    iou,
    mean_angular_error,
    oracle_check,
    read_depth,
    read_normals,
    render_plane,
    render_sphere,
    write_depth,
    write_normals,
)

__all__ = [
    "CameraIntrinsics",
    "DegenerateInput",
    "FormatError",
    "InvalidInput",
    "IoError",
    "add_noise",
    "angular_error",
    "axial_optimal_inclination",
    "back_project",
    "estimate_normals",
    "estimators",
    "fscore",
    "grid_search_inclination",
    "iou",
    "mean_angular_error",
    "oracle_check",
    "read_depth",
    "read_normals",
    "render_plane",
    "render_sphere",
    "write_depth",
    "write_normals",
]
