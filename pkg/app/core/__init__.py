"""
Core module for the application.
"""
