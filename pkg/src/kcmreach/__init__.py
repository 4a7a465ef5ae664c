"""Exact reachability toolkit for kinetically constrained models."""
