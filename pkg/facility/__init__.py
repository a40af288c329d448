"""
Private facility location.

This module contains:
- DPClientCover: bicriteria client cover for MobileVaccClinic with outliers
"""

from .client_cover import DPClientCover

__all__ = ['DPClientCover']
