"""CSV-to-SVG figure renderer for the lattice-clock simulation outputs.

Consumes only the documented CSV/JSON schemas of the simulation package; no
physics is recomputed here.
"""

from . import render

__version__ = "0.1.0"

__all__ = ["render", "__version__"]
