"""QTPD Lab - tensor product decomposition of unitaries from simulated quantum snapshots."""

from .__version__ import __version__
