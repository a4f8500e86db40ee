"""ncstar: certificates for partial-commutation *-algebras and their quantum symmetries."""

__version__ = "0.1.0"
