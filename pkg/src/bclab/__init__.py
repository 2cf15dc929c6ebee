"""Numerical construction and verification of H-hypersurfaces in E^{n+1}."""
