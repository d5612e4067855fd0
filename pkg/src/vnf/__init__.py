"""Numerical checks of the divisor summation identity over Q and quadratic fields."""
