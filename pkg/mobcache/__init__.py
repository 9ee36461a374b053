"""
Mobility-aware cache placement at base stations and user terminals.
"""
from .version import __version__
