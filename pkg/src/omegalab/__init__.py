"""Computability workbench: a self-delimiting toy language, dovetailed bounds on
its halting probability, diagonal reals, coverings and program-size estimates."""

__version__ = "0.1.0"
