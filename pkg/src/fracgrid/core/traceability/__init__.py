"""
Rastreabilidade do fracgrid.

- **manifest**: `RunManifest` (estado de Steps + Event Log), criação,
  persistência e restauração em JSON.
"""

from .manifest import RunManifest, create_manifest, load_manifest, save_manifest

__all__ = ["RunManifest", "create_manifest", "load_manifest", "save_manifest"]
