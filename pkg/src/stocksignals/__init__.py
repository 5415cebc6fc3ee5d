"""Price, text and sentiment signals for stock-return studies."""

__version__ = "0.1.0"
