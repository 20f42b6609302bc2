# This file marks the 'quantum' directory as a Python package.
