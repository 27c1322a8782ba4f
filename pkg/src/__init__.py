"""OrderForge - circular orders, order trees and left-orderability certificates."""

__version__ = "0.1.0"
