"""Stream reasoning over sliding time and tuple windows."""

__version__ = "0.1.0"
