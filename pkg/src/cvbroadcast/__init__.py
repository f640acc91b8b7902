"""Optimal broadcasting of continuous-variable states."""
