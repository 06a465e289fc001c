"""Figure rendering for staged tree benchmark and classification CSVs."""

from .panels import PanelSpec, PlotkitError, render_classification, render_grid

__version__ = "0.1.0"
