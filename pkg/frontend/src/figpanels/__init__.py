"""Panel rendering for simulator contrast curves."""

from .render import PanelError, PanelSpec, load_manifest, render_panels

__version__ = "0.1.0"

__all__ = ["PanelError", "PanelSpec", "load_manifest", "render_panels", "__version__"]
