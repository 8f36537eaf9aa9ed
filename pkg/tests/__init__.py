"""
Tests package.
"""
