"""Certificates for congruent and non-congruent numbers.

Families n = p0 p1 ... pk (p1..pk = 1 mod 8) satisfying the 4-rank condition come with an explicit
Heegner point and a rational right triangle; small non-congruent numbers come with a 2-isogeny descent.
"""

__version__ = "0.1.0"

from .ntheory import InputError, SquarefreeProduct, parse_target, validate_tian_input  # noqa: E402

__all__ = ["InputError", "SquarefreeProduct", "parse_target", "validate_tian_input", "__version__"]
