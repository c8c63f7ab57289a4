"""Inverse limits of covering spaces, computed on towers of groups."""

__version__ = "0.1.0"

from .cli import main
from .gallery import make_gallery
from .specfile import parse_spec

__all__ = ["main", "make_gallery", "parse_spec"]
