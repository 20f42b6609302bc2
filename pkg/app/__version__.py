"""Version information for QTPD Lab."""

__version__ = "0.1.0"
