"""Snap-to-surface haptic interaction toolkit.

Procedural surface generation, voxel distance fields, snap/spring force
models, a fixed-rate stylus/proxy simulator, brushed-curve recording, and
the evaluation metrics and bootstrap statistics that score them.
"""

__version__ = "0.1.0"
