# This file marks the 'analysis' directory as a Python package.
