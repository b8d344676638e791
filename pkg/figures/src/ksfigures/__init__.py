"""Figure regeneration for bkevd pipeline outputs.

Reads the pipeline's persisted CSV/JSON/binary artifacts and renders four
figure kinds: space-time heatmaps with sampled-pivot overlays,
eigenfunction comparison grids, eigenvalue decay curves with a leading-20
inset, and true-vs-projected heatmap triptychs.
"""

from .figspec import FIGURE_KINDS, FigureSpec, load_spec
from .readers import FigureInputError
from .render import render

__version__ = "0.1.0"
