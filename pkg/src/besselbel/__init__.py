"""Bessel-process semigroup derivatives and their Monte-Carlo representation."""
