# This file marks the 'qtpd' directory as a Python package.
