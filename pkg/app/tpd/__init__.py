# This file marks the 'tpd' directory as a Python package.
