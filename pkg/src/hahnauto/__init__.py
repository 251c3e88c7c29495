"""Automatic generalized power series over finite fields."""
