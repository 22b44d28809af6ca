"""
Test suite for the information-theoretic feature selection library and CLI.
"""
