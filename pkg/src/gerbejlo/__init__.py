"""Exact gerbe, Dixmier-Douady and JLO computations on torus translation groupoids."""

from __future__ import annotations

__version__ = "0.1.0"
