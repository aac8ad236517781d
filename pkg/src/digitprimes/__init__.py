"""Primes of the form m^2 + l^2 with l restricted to digit-avoiding integers."""

from .digits import GENUINE, PADDED, DigitConvention, ExcludedDigits

__version__ = "0.1.0"

__all__ = ["DigitConvention", "ExcludedDigits", "GENUINE", "PADDED", "__version__"]
