"""Sub-level module 'utils' of the implicit-shape-matching package."""
