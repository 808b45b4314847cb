"""Selects the clipping kernel: compiled extension if built, else pure Python."""

try:
    from ._clipcore import tri_disk_area, tri_disk_areas

    BACKEND = "cython"
except ImportError:  # extension not built; identical semantics
    from ._clippy import tri_disk_area, tri_disk_areas

    BACKEND = "python"

__all__ = ["tri_disk_area", "tri_disk_areas", "BACKEND"]
