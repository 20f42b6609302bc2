# This file marks the 'experiments' directory as a Python package.
