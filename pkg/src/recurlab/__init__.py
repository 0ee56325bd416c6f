"""Numerical laboratory for recurrence counting in interval maps.

The package checks, on concrete expanding maps of [0, 1], that the number of
close returns ``T^k(x) in B_k(x)`` with prescribed ball masses grows like the
sum of those masses, together with the summation lemmas behind that fact and
the return-time exponent it implies.
"""

__version__ = "0.1.0"
