"""libpin: third-party library and version detection over class profiles."""

from .detector import LibraryDetector

__version__ = "0.1.0"
