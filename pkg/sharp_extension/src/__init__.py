"""Core modules for sharp Fourier extension on convex arcs."""
