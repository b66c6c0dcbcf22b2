"""Sharp Extension - numerical toolkit for sharp Fourier extension on planar convex arcs."""

__version__ = "0.1.0"
