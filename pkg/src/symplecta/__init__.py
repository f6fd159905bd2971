"""symplecta - normal modes of star-coupled harmonic oscillators via symplectic maps."""

__version__ = "0.1.0"
