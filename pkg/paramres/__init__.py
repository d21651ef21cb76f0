"""paramres: classical and quantum parametric resonance of driven linear oscillators."""

__version__ = "1.0.0"
