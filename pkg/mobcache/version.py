"""
The version breakdown:

# The first number is the major version of the library.
# The second number is the minor version of the library.
# The third number counts releases which changed experiment output
  (CSV rows produced by a shipped config), so results can be matched to
  the release that produced them.
"""

__version__ = "0.1.0"
